"""Two-spin Hamiltonians for a double quantum dot: lab frame, rotating frame
with RWA, adiabatic basis, effective two-block form, and the exchange-driven
interaction picture.

Basis conventions
-----------------
Magnetic-drive forms (`build_lab`, `build_rot_rwa`, `effective_blocks`) use
the product basis {uu, du, ud, dd} where the first arrow is the left spin.
Exchange-drive forms (`exchange_interaction`) use {uu, ud, du, dd}.  Both are
valid two-qubit tensor orderings; local invariants and the gate targets in
:mod:`geomspin.gates` are stated per construction.

All energies are angular frequencies in rad/ns (hbar = 1).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

REGIME_WARN_RATIO = 0.1
REGIME_ERROR_RATIO = 0.5


class ExchangeRegimeWarning(UserWarning):
    """Exchange is not small compared to the Zeeman gradient."""


@dataclass(frozen=True)
class DeviceParams:
    """Static device energies and drive settings (all rad/ns, phases in rad).

    ez, dez       average Zeeman splitting and static splitting difference
    ez1, dez1     set-and-hold Zeeman shifts (average and difference)
    bext_z        homogeneous external field contribution (informational)
    j             static exchange coupling
    by_l1, by_r1  transverse AC drive amplitudes on the left/right dot
    omega, varphi drive frequency and phase of cos(omega*t + varphi)
    """

    ez: float
    dez: float
    ez1: float = 0.0
    dez1: float = 0.0
    bext_z: float = 0.0
    j: float = 0.0
    by_l1: float = 0.0
    by_r1: float = 0.0
    omega: float = 0.0
    varphi: float = 0.0

    def __post_init__(self):
        if self.j < 0:
            raise ValueError(f"exchange must be nonnegative, got {self.j}")
        grad = self.gradient
        if grad > 0 and self.j / grad > REGIME_ERROR_RATIO:
            raise ValueError(
                f"J/(dEz+dEz1) = {self.j / grad:.3f} exceeds {REGIME_ERROR_RATIO}; "
                "the block-diagonal treatment is invalid")
        if grad > 0 and self.j / grad > REGIME_WARN_RATIO:
            warnings.warn(
                f"J/(dEz+dEz1) = {self.j / grad:.3f} above {REGIME_WARN_RATIO}; "
                "effective-block accuracy degrades",
                ExchangeRegimeWarning, stacklevel=2)

    @property
    def gradient(self) -> float:
        """Total Zeeman gradient dEz + dEz1 between the dots."""
        return self.dez + self.dez1


def _drive_amplitudes(p: DeviceParams, t: float):
    osc = np.cos(p.omega * t + p.varphi)
    return p.by_l1 * osc, p.by_r1 * osc


def build_lab(p: DeviceParams, t: float) -> np.ndarray:
    """Lab-frame two-spin Hamiltonian in the basis {uu, du, ud, dd}.

    Heisenberg exchange J(S_L.S_R - 1/4) plus Zeeman terms and the transverse
    AC drives B_{y,q}(t) = B^1_{y,q} cos(omega t + varphi) (zero static
    transverse component).
    """
    by_l, by_r = _drive_amplitudes(p, t)
    e = p.ez + p.ez1
    grad = p.gradient
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = e
    h[1, 1] = 0.5 * (-p.j + grad)
    h[2, 2] = 0.5 * (-p.j - grad)
    h[3, 3] = -e
    h[1, 2] = h[2, 1] = 0.5 * p.j
    h[0, 1] = -0.5j * by_l
    h[2, 3] = -0.5j * by_l
    h[0, 2] = -0.5j * by_r
    h[1, 3] = -0.5j * by_r
    h[1, 0] = np.conj(h[0, 1])
    h[3, 2] = np.conj(h[2, 3])
    h[2, 0] = np.conj(h[0, 2])
    h[3, 1] = np.conj(h[1, 3])
    return h


def build_rot_rwa(p: DeviceParams, t: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian after the RWA, basis {uu, du, ud, dd}.

    Time independent for fixed amplitudes and phase; the frame rotates at the
    drive frequency about z on both spins.  All four upper drive entries
    carry exp(-i varphi)/4 (fixed by Hermiticity and by numerically
    transforming the lab frame).  This is the full model used for fidelity
    simulations; set by_r1 = 0 for the reduced left-drive-only form.
    """
    del t
    e = p.ez + p.ez1
    grad = p.gradient
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = e - p.omega
    h[1, 1] = 0.5 * (-p.j + grad)
    h[2, 2] = 0.5 * (-p.j - grad)
    h[3, 3] = -(e - p.omega)
    h[1, 2] = h[2, 1] = 0.5 * p.j
    c_l = -0.25j * p.by_l1 * np.exp(-1j * p.varphi)
    c_r = -0.25j * p.by_r1 * np.exp(-1j * p.varphi)
    h[0, 1] = c_l
    h[2, 3] = c_l
    h[0, 2] = c_r
    h[1, 3] = c_r
    h[1, 0] = np.conj(c_l)
    h[3, 2] = np.conj(c_l)
    h[2, 0] = np.conj(c_r)
    h[3, 1] = np.conj(c_r)
    return h


def rotating_frame_map(p: DeviceParams, t: float) -> np.ndarray:
    """Frame transformation U_w(t) = exp(i omega t (S_zL + S_zR)), diagonal."""
    return np.diag(np.exp(1j * p.omega * t * np.array([1.0, 0.0, 0.0, -1.0])))


class AdiabaticFrame(NamedTuple):
    theta: float
    basis: np.ndarray  # columns are the mixed middle states in {uu,du,ud,dd}


def mixing_angle(j: float, gradient: float) -> float:
    """Central-block mixing angle for arbitrary (j, gradient), in (0, pi/2].

    tan(theta) = (gradient + sqrt(j^2 + gradient^2)) / j; the j = 0 limit is
    theta = pi/2 exactly.  Valid for any ratio (no regime restriction).
    """
    if j == 0.0:
        return np.pi / 2
    alpha = gradient / j
    beta = np.sqrt(j ** 2 + gradient ** 2) / j
    s = (alpha + beta) / np.sqrt((alpha + beta) ** 2 + 1.0)
    return float(np.arcsin(np.clip(s, -1.0, 1.0)))


def adiabatic_angle(p: DeviceParams) -> AdiabaticFrame:
    """Mixing angle of the instantaneous eigenstates of the central block.

    The middle basis pair {du, ud} mixes into {~du, ~ud}; theta -> pi/2 as
    J -> 0.  Returns the angle and the orthogonal 4x4 basis matrix
    (determinant +1).
    """
    theta = mixing_angle(p.j, p.gradient)
    s, c = np.sin(theta), np.cos(theta)
    w = np.eye(4)
    w[1, 1] = s
    w[2, 1] = c
    w[1, 2] = -c
    w[2, 2] = s
    return AdiabaticFrame(theta=theta, basis=w)


@dataclass(frozen=True)
class EffectiveBlocks:
    """Resonant effective model: identity shift c1, S2 projector shift c2,
    and the two 2x2 blocks acting in S1 = {uu, ~du} and S2 = {~ud, dd}."""

    h_s1: np.ndarray
    h_s2: np.ndarray
    c1: float
    c2: float
    h: float
    phi: float
    theta: float
    omega_res: float
    regime_warning: Optional[str] = None


def effective_blocks(p: DeviceParams) -> EffectiveBlocks:
    """Reduce the rotating-frame model to two resonant 2x2 blocks.

    With k = grad + J^2/(2 grad) the resonance frequency is
    omega = ez + ez1 + (J - k)/2, which degenerates the S1 pair.  The
    diagonal decomposes as c1*I - c2*P_S2 + diag(0, 0, -J/2, +J/2) with
    c1 = (k - J)/2 and c2 = k - J/2.  The common drive parameters are
    h = by_l1/2 and phi = varphi + pi/2.
    """
    grad = p.gradient
    if grad <= 0:
        raise ValueError("effective blocks need a positive Zeeman gradient")
    ratio = p.j / grad
    warning = None
    if ratio > REGIME_WARN_RATIO:
        warning = f"J/gradient = {ratio:.3f} above {REGIME_WARN_RATIO}"
    k = grad + p.j ** 2 / (2.0 * grad)
    c1 = 0.5 * (k - p.j)
    c2 = k - 0.5 * p.j
    h = 0.5 * p.by_l1
    phi = p.varphi + np.pi / 2
    omega_res = p.ez + p.ez1 + 0.5 * (p.j - k)
    off = 0.5 * h * np.exp(-1j * phi)
    h_s1 = np.array([[0.0, off], [np.conj(off), 0.0]], dtype=complex)
    h_s2 = np.array([[-0.5 * p.j, off], [np.conj(off), 0.5 * p.j]], dtype=complex)
    theta = adiabatic_angle(p).theta
    return EffectiveBlocks(h_s1=h_s1, h_s2=h_s2, c1=c1, c2=c2, h=h, phi=phi,
                           theta=theta, omega_res=omega_res, regime_warning=warning)


def reconstruct_from_blocks(blocks: EffectiveBlocks, basis: np.ndarray) -> np.ndarray:
    """Rebuild the 4x4 rotating-frame model from the effective blocks.

    Assembles c1*I + (H_S1 (+) (-c2*I + H_S2)) in the adiabatic basis and
    rotates back to {uu, du, ud, dd} with the supplied basis matrix.
    """
    h = np.zeros((4, 4), dtype=complex)
    h += blocks.c1 * np.eye(4)
    h[0:2, 0:2] += blocks.h_s1
    h[2:4, 2:4] += blocks.h_s2 - blocks.c2 * np.eye(2)
    return basis @ h @ basis.conj().T


@dataclass(frozen=True)
class ExchangeDrive:
    """Microwave-modulated exchange J(t) = j0 + j1(t) cos(omega_p t + phi_p).

    alpha_p and beta_p are the Zeeman parameters of the static part
    diag(alpha', -beta'/2, beta'/2, -alpha') in the basis {uu, ud, du, dd};
    resonance means omega_p = beta_p.  The Rabi rate is Omega(t) = j1(t)/2.
    """

    j0: float
    j1: Callable[[float], float]
    omega_p: float
    phi_p: float = 0.0
    alpha_p: float = 0.0
    beta_p: float = 0.0

    def __post_init__(self):
        if self.j0 < 0:
            raise ValueError(f"static exchange must be nonnegative, got {self.j0}")
        scale = min(abs(self.alpha_p), abs(self.beta_p))
        if scale > 0 and self.j0 > REGIME_WARN_RATIO * scale:
            warnings.warn(
                f"j0/min(alpha', beta') = {self.j0 / scale:.3f} above "
                f"{REGIME_WARN_RATIO}; the interaction-picture reduction degrades",
                ExchangeRegimeWarning, stacklevel=2)

    def omega(self, t):
        """Rabi rate Omega(t) = j1(t)/2."""
        return 0.5 * np.asarray(self.j1(t))

    @property
    def eta_rate(self) -> float:
        """Rate of the local S3 phase eta(t) = j0*t/2 accumulated from the
        static exchange (the S3 block of the propagator carries exp(i eta))."""
        return 0.5 * self.j0

    def on_resonance(self) -> bool:
        return abs(self.omega_p - self.beta_p) <= 1e-12 * max(1.0, abs(self.beta_p))


def exchange_interaction(d: ExchangeDrive, t: float):
    """Interaction-picture exchange Hamiltonian (resonant RWA form).

    Returns (h4, h2): the 4x4 matrix with zero outer rows/columns and middle
    block [[-j0/2, (j1/4) e^{i phi'}], [c.c., -j0/2]] in {uu, ud, du, dd},
    and the reduced traceless 2x2 block with off-diagonal (Omega/2) e^{i phi'}.
    Off resonance the RWA form is not trusted; a warning is attached via
    ValueError unless the caller overrides.
    """
    if not d.on_resonance():
        warnings.warn(
            f"exchange drive off resonance (omega_p={d.omega_p}, beta_p={d.beta_p}); "
            "RWA interaction form not guaranteed", ExchangeRegimeWarning, stacklevel=2)
    j1 = float(np.asarray(d.j1(t)))
    coup = 0.25 * j1 * np.exp(1j * d.phi_p)   # = (Omega/2) e^{i phi'}
    h4 = np.zeros((4, 4), dtype=complex)
    h4[1, 1] = h4[2, 2] = -0.5 * d.j0
    h4[1, 2] = coup
    h4[2, 1] = np.conj(coup)
    h2 = np.array([[0.0, coup], [np.conj(coup), 0.0]], dtype=complex)
    return h4, h2


def exchange_static(d: ExchangeDrive) -> np.ndarray:
    """Static Zeeman part diag(alpha', -beta'/2, beta'/2, -alpha') of the
    exchange-driven model, basis {uu, ud, du, dd}."""
    return np.diag(np.array(
        [d.alpha_p, -0.5 * d.beta_p, 0.5 * d.beta_p, -d.alpha_p], dtype=complex))
