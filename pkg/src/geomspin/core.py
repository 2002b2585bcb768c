"""Dense complex linear algebra for 2x2/4x4 spin systems, time-ordered
propagation, and gate-fidelity metrics.

Unit system: hbar = 1, Hamiltonian entries in rad/ns, times in ns.
User-facing frequencies quoted in MHz convert as  f MHz -> 2*pi*f*1e-3 rad/ns
(use :func:`mhz`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

UNITARITY_TOL = 1e-8
HERMITICITY_TOL = 1e-10


def mhz(f):
    """Convert a frequency in MHz to angular units (rad/ns)."""
    return TWO_PI * 1e-3 * np.asarray(f, dtype=float)


def rad_per_ns_to_mhz(w):
    """Inverse of :func:`mhz`."""
    return np.asarray(w, dtype=float) / (TWO_PI * 1e-3)


def hermiticity_defect(a) -> float:
    a = np.asarray(a)
    return float(np.linalg.norm(a - a.conj().T))


def unitarity_defect(u) -> float:
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid on [t0, t1] with `steps` integration steps."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if self.t1 <= self.t0:
            raise ValueError(f"TimeGrid requires t1 > t0, got [{self.t0}, {self.t1}]")
        if self.steps < 1:
            raise ValueError(f"TimeGrid requires steps >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps + 1)

    def midpoints(self) -> np.ndarray:
        return self.t0 + (np.arange(self.steps) + 0.5) * self.dt


def auto_steps(ham: Callable[[float], np.ndarray], t0: float, t1: float,
               target: float = 0.01, probes: int = 33, min_steps: int = 8) -> int:
    """Step count such that max||H|| * dt <= target (spectral norm, probed)."""
    ts = np.linspace(t0, t1, probes)
    norm = max(float(np.linalg.norm(ham(t), ord=2)) for t in ts)
    if norm == 0.0:
        return min_steps
    return max(min_steps, int(np.ceil(norm * (t1 - t0) / target)))


def mat_exp(h, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H, via eigendecomposition.

    Unitary to machine precision by construction.  Raises ValueError if the
    input is not Hermitian within tolerance.
    """
    h = np.asarray(h, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(h)))
    if hermiticity_defect(h) > HERMITICITY_TOL * scale:
        raise ValueError(
            f"mat_exp expects a Hermitian matrix; defect {hermiticity_defect(h):.3e}")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


class PiecewiseConstantHamiltonian:
    """Hamiltonian that is constant on a list of contiguous time segments.

    `boundaries` are the segment edges t_0 < t_1 < ... < t_n and `matrices`
    the n Hermitian matrices on the half-open segments [t_k, t_{k+1}).
    Propagation through such a schedule is exact (one matrix exponential per
    segment), which :func:`propagate` exploits.
    """

    def __init__(self, boundaries: Sequence[float], matrices: Sequence[np.ndarray]):
        self.boundaries = np.asarray(boundaries, dtype=float)
        if len(matrices) != len(self.boundaries) - 1:
            raise ValueError("need exactly one matrix per segment")
        if np.any(np.diff(self.boundaries) <= 0):
            raise ValueError("segment boundaries must be strictly increasing")
        self.matrices = [np.asarray(m, dtype=complex) for m in matrices]

    @property
    def t0(self) -> float:
        return float(self.boundaries[0])

    @property
    def t1(self) -> float:
        return float(self.boundaries[-1])

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    def __call__(self, t: float) -> np.ndarray:
        idx = int(np.searchsorted(self.boundaries, t, side="right")) - 1
        idx = min(max(idx, 0), len(self.matrices) - 1)
        return self.matrices[idx]

    def propagator(self, t0: float, t1: float) -> np.ndarray:
        """Exact time-ordered propagator from t0 to t1."""
        if not (self.t0 - 1e-12 <= t0 <= t1 <= self.t1 + 1e-12):
            raise ValueError("requested window outside the schedule")
        dim = self.matrices[0].shape[0]
        u = np.eye(dim, dtype=complex)
        t = t0
        while t < t1 - 1e-15:
            idx = int(np.searchsorted(self.boundaries, t, side="right")) - 1
            idx = min(max(idx, 0), len(self.matrices) - 1)
            seg_end = min(float(self.boundaries[idx + 1]), t1)
            u = mat_exp(self.matrices[idx], seg_end - t) @ u
            t = seg_end
        return u


def propagate(ham, grid: TimeGrid) -> np.ndarray:
    """Time-ordered propagator of a time-dependent Hamiltonian.

    Uses the midpoint exponential-product rule (second order in dt); each
    factor is exactly unitary, so the result is unitary regardless of step
    size.  Piecewise-constant schedules are propagated exactly.

    Parameters
    ----------
    ham : callable t -> Hermitian ndarray, or PiecewiseConstantHamiltonian
    grid : TimeGrid
    """
    if isinstance(ham, PiecewiseConstantHamiltonian):
        u = ham.propagator(grid.t0, grid.t1)
    else:
        dt = grid.dt
        u = np.eye(np.asarray(ham(grid.t0)).shape[0], dtype=complex)
        for tm in grid.midpoints():
            u = mat_exp(ham(tm), dt) @ u
    defect = unitarity_defect(u)
    if defect > UNITARITY_TOL:
        raise RuntimeError(f"propagator lost unitarity: defect {defect:.3e}")
    return u


def fidelity(u, u_ideal) -> float:
    """Two-qubit gate fidelity  [Tr(U U^+) + |Tr(U_ideal^+ U)|^2] / (d(d+1)).

    Invariant under a global phase of either argument.  For unitary U the
    first trace equals d and the value lies in [d/(d(d+1)), 1].
    """
    u = np.asarray(u, dtype=complex)
    u_ideal = np.asarray(u_ideal, dtype=complex)
    if u.shape != u_ideal.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {u_ideal.shape}")
    d = u.shape[0]
    t1 = np.trace(u @ u.conj().T).real
    t2 = abs(np.trace(u_ideal.conj().T @ u)) ** 2
    return float((t1 + t2) / (d * (d + 1)))


def equal_up_to_global_phase(a, b, tol: float) -> bool:
    """True iff min over theta of ||A - e^{i theta} B||_F <= tol.

    The optimal phase is the phase of Tr(B^+ A).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    overlap = np.trace(b.conj().T @ a)
    if abs(overlap) < 1e-300:
        phase = 1.0
    else:
        phase = overlap / abs(overlap)
    return bool(np.linalg.norm(a - phase * b) <= tol)
