"""Dressed-state path engineering on the Bloch sphere.

A two-level evolution is parametrized by the polar angle chi(t), the azimuth
xi(t) and, for the exchange-driven construction, an auxiliary phase f(t).
Forward integration maps a control schedule to a path; the inverse maps turn
a designed path back into drive controls.  The two supported frames are

* ``S1-magnetic``: block Hamiltonian [[0, (h/2)e^{-i phi}], [c.c., 0]] with
  Bloch equations  dchi/dt = h sin(phi - xi),  dxi/dt = -h cot(chi) cos(phi - xi).
* ``S3-exchange``: block Hamiltonian [[0, (W/2)e^{+i phi}], [c.c., 0]] with
  dchi/dt = -W sin(xi + phi),  dxi/dt = -W cot(chi) cos(xi + phi) and the
  consistency condition dxi/dt = -df/dt cos(chi) for a chosen f(t).

Both inversions are branch-free:  amplitude = sqrt(dchi^2 + (dxi tan chi)^2)
with the angle recovered by atan2, so the amplitude is nonnegative and
reversals become pi jumps of the phase.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import TimeGrid

POLE_TOL = 1e-9
CYCLIC_TOL = 1e-8

S1_FRAME = "S1-magnetic"
S3_FRAME = "S3-exchange"


class SingularControlError(ValueError):
    """The requested path needs an unbounded control amplitude."""


# --------------------------------------------------------------------------
# path and control containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSegment:
    """One smooth piece of a Bloch path; callables accept scalar or ndarray."""

    t0: float
    t1: float
    chi: Callable
    xi: Callable
    dchi: Optional[Callable] = None
    dxi: Optional[Callable] = None
    f: Optional[Callable] = None
    df: Optional[Callable] = None


@dataclass(frozen=True)
class PathSpec:
    """Piecewise-smooth Bloch-sphere trajectory with optional azimuth jumps.

    xi_jumps is a sequence of (time, delta_xi) applied instantaneously at
    segment boundaries (the polar angle is continuous there; jumps placed at
    the poles cost no drive amplitude).
    """

    segments: tuple
    xi_jumps: tuple = ()

    @property
    def t0(self) -> float:
        return self.segments[0].t0

    @property
    def t1(self) -> float:
        return self.segments[-1].t1

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def has_f(self) -> bool:
        return all(s.f is not None for s in self.segments)

    def segment_at(self, t: float) -> PathSegment:
        for seg in self.segments:
            if t <= seg.t1 or seg is self.segments[-1]:
                return seg
        return self.segments[-1]

    def chi(self, t: float) -> float:
        return float(np.asarray(self.segment_at(t).chi(t)))

    def xi(self, t: float) -> float:
        return float(np.asarray(self.segment_at(t).xi(t)))

    def endpoint_mismatch(self) -> float:
        """Closure defect of (chi, xi mod 2pi); jumps are already folded into
        the per-segment xi definitions."""
        dchi = abs(self.chi(self.t1) - self.chi(self.t0))
        dxi = abs((self.xi(self.t1) - self.xi(self.t0) + np.pi) % (2 * np.pi) - np.pi)
        return max(dchi, dxi)

    def is_cyclic(self, tol: float = CYCLIC_TOL) -> bool:
        return self.endpoint_mismatch() <= tol

    def rescaled(self, duration: float) -> "PathSpec":
        """Same geometric path traversed over a different total duration."""
        scale = self.duration / duration
        t_base = self.t0

        def remap(fun, rate=False, s=scale, tb=t_base):
            if fun is None:
                return None
            if rate:
                return lambda t: np.asarray(fun(tb + (t - tb) * s)) * s
            return lambda t: fun(tb + (t - tb) * s)

        segs = tuple(
            PathSegment(
                t0=t_base + (seg.t0 - t_base) / scale,
                t1=t_base + (seg.t1 - t_base) / scale,
                chi=remap(seg.chi), xi=remap(seg.xi),
                dchi=remap(seg.dchi, rate=True), dxi=remap(seg.dxi, rate=True),
                f=remap(seg.f), df=remap(seg.df, rate=True))
            for seg in self.segments)
        jumps = tuple((t_base + (tj - t_base) / scale, dx) for tj, dx in self.xi_jumps)
        return PathSpec(segments=segs, xi_jumps=jumps)


@dataclass(frozen=True)
class PhaseDecomposition:
    total: float
    dynamical: float
    geometric: float
    cyclic: bool = True


@dataclass(frozen=True)
class ControlSchedule:
    """Drive amplitude (rad/ns) and phase (rad) over [0, duration].

    `boundaries` mark control discontinuities; amplitude and phase are smooth
    between them.  `frame` is one of S1_FRAME / S3_FRAME.
    """

    amplitude: Callable
    phase: Callable
    duration: float
    frame: str
    boundaries: tuple = ()

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"duration must be positive, got {self.duration}")

    def sample(self, times) -> tuple:
        t = np.asarray(times, dtype=float)
        return np.asarray(self.amplitude(t), dtype=float), np.asarray(self.phase(t), dtype=float)

    def rows(self, n: int = 2001):
        """(t_ns, amplitude_rad_per_ns, phase_rad) table for export."""
        ts = np.linspace(0.0, self.duration, n)
        amp, ph = self.sample(ts)
        return np.column_stack([ts, amp, ph])


def sampled_path(times, chi, xi, f=None) -> PathSpec:
    """Wrap sampled Bloch angles into a single-segment interpolating path."""
    times = np.asarray(times, dtype=float)
    chi = np.asarray(chi, dtype=float)
    xi = np.asarray(xi, dtype=float)
    dchi = np.gradient(chi, times)
    dxi = np.gradient(xi, times)

    def interp(values):
        return lambda t: np.interp(t, times, values)

    f_fun = df_fun = None
    if f is not None:
        f = np.asarray(f, dtype=float)
        f_fun = interp(f)
        df_fun = interp(np.gradient(f, times))
    seg = PathSegment(t0=float(times[0]), t1=float(times[-1]),
                      chi=interp(chi), xi=interp(xi),
                      dchi=interp(dchi), dxi=interp(dxi), f=f_fun, df=df_fun)
    return PathSpec(segments=(seg,))


# --------------------------------------------------------------------------
# forward integration
# --------------------------------------------------------------------------

def _field_vector(amp, phase, frame):
    if frame == S3_FRAME:
        return np.stack([amp * np.cos(phase), -amp * np.sin(phase),
                         np.zeros_like(amp)], axis=-1)
    return np.stack([amp * np.cos(phase), amp * np.sin(phase),
                     np.zeros_like(amp)], axis=-1)


def forward_angles(ctrl: ControlSchedule, chi0: float, xi0: float,
                   grid: TimeGrid) -> PathSpec:
    """Integrate the Bloch-angle equations of motion under a control schedule.

    Internally evolves the Cartesian Bloch vector with exact per-step
    rotations (midpoint field), so the poles are handled without coordinate
    singularities; the angles are recovered afterwards, holding the azimuth
    across pole touches.
    """
    if not (POLE_TOL < chi0 < np.pi - POLE_TOL):
        raise ValueError("initial polar angle must avoid the poles")
    n = np.array([np.sin(chi0) * np.cos(xi0), np.sin(chi0) * np.sin(xi0), np.cos(chi0)])
    amp, ph = ctrl.sample(grid.midpoints())
    fields = _field_vector(amp, ph, ctrl.frame)
    dt = grid.dt
    out = np.empty((grid.steps + 1, 3))
    out[0] = n
    for k in range(grid.steps):
        w = fields[k]
        norm = np.linalg.norm(w)
        if norm * dt > 1e-14:
            axis = w / norm
            ang = norm * dt
            n = (n * np.cos(ang) + np.cross(axis, n) * np.sin(ang)
                 + axis * np.dot(axis, n) * (1.0 - np.cos(ang)))
        out[k + 1] = n
    chi = np.arccos(np.clip(out[:, 2], -1.0, 1.0))
    xi = np.zeros(len(chi))
    prev = xi0
    for k in range(len(chi)):
        if np.hypot(out[k, 0], out[k, 1]) < POLE_TOL:
            xi[k] = prev
        else:
            raw = np.arctan2(out[k, 1], out[k, 0])
            xi[k] = raw + 2 * np.pi * np.round((prev - raw) / (2 * np.pi))
            prev = xi[k]
    return sampled_path(grid.times(), chi, xi)


# --------------------------------------------------------------------------
# inverse engineering
# --------------------------------------------------------------------------

def _segment_samples(seg: PathSegment, n: int):
    ts = np.linspace(seg.t0, seg.t1, n)
    chi = np.asarray(seg.chi(ts), dtype=float)
    if seg.dchi is not None:
        dchi = np.asarray(seg.dchi(ts), dtype=float)
    else:
        dchi = np.gradient(chi, ts)
    xi = np.asarray(seg.xi(ts), dtype=float)
    if seg.dxi is not None:
        dxi = np.asarray(seg.dxi(ts), dtype=float)
    else:
        dxi = np.gradient(xi, ts)
    return ts, chi, dchi, xi, dxi


def _check_equator(ts, chi, dxi, what="drive"):
    """Reject azimuthal motion that touches or crosses chi = pi/2."""
    cos = np.cos(chi)
    mask = np.abs(dxi) > 1e-14
    near = mask & (np.abs(cos) < POLE_TOL * 10)
    crossing = (cos[:-1] * cos[1:] < 0) & (mask[:-1] | mask[1:])
    if np.any(near) or np.any(crossing):
        k = int(np.argmax(near)) if np.any(near) else int(np.argmax(crossing))
        raise SingularControlError(
            f"azimuthal motion across chi = pi/2 makes the {what} unbounded "
            f"near t = {ts[k]:.6g} ns")


def _xi_rate_times_tan(seg, ts, chi, dxi):
    """dxi/dt * tan(chi), computed in the pole-regular form when f exists."""
    if seg.df is not None:
        return -np.asarray(seg.df(ts), dtype=float) * np.sin(chi)
    _check_equator(ts, chi, dxi)
    sin, cos = np.sin(chi), np.cos(chi)
    out = np.zeros_like(chi)
    mask = np.abs(dxi) > 1e-14
    out[mask] = dxi[mask] * sin[mask] / cos[mask]
    return out


def _interp_schedule(seg_tables, frame, duration) -> ControlSchedule:
    """Assemble a ControlSchedule from per-segment (ts, amp, phase) tables."""
    starts = np.array([tab[0][0] for tab in seg_tables])

    def lookup(t, col):
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        idx = np.clip(np.searchsorted(starts, t_arr, side="right") - 1, 0, len(seg_tables) - 1)
        for k, tab in enumerate(seg_tables):
            m = idx == k
            if np.any(m):
                out[m] = np.interp(t_arr[m], tab[0], tab[col])
        return float(out[0]) if scalar else out

    boundaries = tuple(float(tab[0][0]) for tab in seg_tables[1:])
    return ControlSchedule(amplitude=lambda t: lookup(t, 1),
                           phase=lambda t: lookup(t, 2),
                           duration=duration, frame=frame, boundaries=boundaries)


def invert_controls_s1(path: PathSpec, samples_per_segment: int = 2000) -> ControlSchedule:
    """Drive (h, phi) reproducing a given path in the S1 frame.

    h = sqrt(dchi^2 + (dxi tan chi)^2) >= 0 and
    phi = xi + atan2(dchi, -dxi tan chi); feeding the result back through
    forward_angles reproduces the path.  Interior points at the poles with
    azimuthal motion raise SingularControlError.
    """
    tables = []
    for seg in path.segments:
        ts, chi, dchi, xi, dxi = _segment_samples(seg, samples_per_segment)
        u = _xi_rate_times_tan(seg, ts, chi, dxi)
        h = np.hypot(dchi, u)
        phi = xi + np.arctan2(dchi, -u)
        tables.append((ts, h, np.unwrap(phi)))
    return _interp_schedule(tables, S1_FRAME, path.duration)


def invert_controls_s3(path: PathSpec, omega_max: float,
                       samples_per_segment: int = 2000) -> ControlSchedule:
    """Drive (Omega, phi') for the exchange frame, rescaled to a peak rate.

    The path must carry the auxiliary phase f (which fixes dxi/dt through
    dxi/dt = -df/dt cos chi).  The returned schedule is time-rescaled so that
    max Omega equals `omega_max`, which fixes the physical gate duration.
    """
    if omega_max <= 0:
        raise ValueError(f"omega_max must be positive, got {omega_max}")
    if not path.has_f:
        raise ValueError("S3 inversion needs the auxiliary phase f on every segment")
    tables = []
    peak = 0.0
    for seg in path.segments:
        ts, chi, dchi, xi, dxi = _segment_samples(seg, samples_per_segment)
        u = _xi_rate_times_tan(seg, ts, chi, dxi)
        om = np.hypot(dchi, u)
        ang = np.arctan2(-dchi, -u)
        phi = np.unwrap(ang) - xi
        peak = max(peak, float(om.max()))
        tables.append((ts, om, phi))
    if peak == 0.0:
        raise ValueError("stationary path has no drive to normalize")
    tau = peak * path.duration / omega_max
    scale = path.duration / tau
    t_base = path.t0
    scaled = [(t_base + (tab[0] - t_base) / scale, tab[1] * scale, tab[2])
              for tab in tables]
    return _interp_schedule(scaled, S3_FRAME, tau)


# --------------------------------------------------------------------------
# phases
# --------------------------------------------------------------------------

def phase_decompose(path: PathSpec, samples_per_segment: int = 4001) -> PhaseDecomposition:
    """Split the dressed-state phase over a path into dynamical + geometric.

    total     = integral of (dxi/2)(1/cos chi - 1) dt  (plus jump terms)
    dynamical = integral of (dxi/2) sin^2 chi / cos chi dt
              = -(1/2) integral of df sin^2 chi dt  when f is available
    geometric = total - dynamical

    On f-driven paths the integrands are regular everywhere (including the
    equator); otherwise a path with azimuthal motion crossing chi = pi/2 is
    refused.  Azimuth jumps contribute through the same formulas with the
    jump's delta replacing dxi dt; at the poles they are purely geometric.
    """
    total = 0.0
    dyn = 0.0
    for seg in path.segments:
        ts, chi, dchi, xi, dxi = _segment_samples(seg, samples_per_segment)
        sin, cos = np.sin(chi), np.cos(chi)
        if seg.df is not None:
            df = np.asarray(seg.df(ts), dtype=float)
            total += np.trapezoid(0.5 * (-df - dxi), ts)
            dyn += np.trapezoid(-0.5 * df * sin ** 2, ts)
        else:
            _check_equator(ts, chi, dxi, what="phase integrand")
            mask = np.abs(dxi) > 1e-14
            integ_t = np.zeros_like(ts)
            integ_d = np.zeros_like(ts)
            integ_t[mask] = 0.5 * dxi[mask] * (1.0 / cos[mask] - 1.0)
            integ_d[mask] = 0.5 * dxi[mask] * sin[mask] ** 2 / cos[mask]
            total += np.trapezoid(integ_t, ts)
            dyn += np.trapezoid(integ_d, ts)
    for tj, dxi_j in path.xi_jumps:
        cos_j = np.cos(path.chi(tj))
        if abs(cos_j) < 1e-12:
            raise SingularControlError(f"azimuth jump on the equator at t = {tj:.6g} ns")
        total += 0.5 * dxi_j * (1.0 / cos_j - 1.0)
        dyn += 0.5 * dxi_j * (1.0 - cos_j ** 2) / cos_j
    return PhaseDecomposition(total=total, dynamical=dyn, geometric=total - dyn,
                              cyclic=path.is_cyclic())


def aa_phase(states) -> float:
    """Gauge-invariant geometric phase of a cyclic state history.

    Uses the discrete Pancharatnam form
    arg<z_0|z_N> - sum_k arg<z_k|z_{k+1}>, which is exactly invariant under
    arbitrary per-sample phase changes.  The first and last states must be
    parallel (cyclic evolution).
    """
    z = np.asarray(states, dtype=complex)
    if z.ndim != 2 or z.shape[0] < 3:
        raise ValueError("need a (n_samples, dim) array with n_samples >= 3")
    norms = np.linalg.norm(z, axis=1)
    z = z / norms[:, None]
    closure = abs(np.vdot(z[0], z[-1]))
    if closure < 1.0 - 1e-6:
        raise ValueError(
            f"state history is not cyclic: |<z(0)|z(T)>| = {closure:.8f} "
            f"(deficit {1.0 - closure:.2e})")
    overlaps = np.einsum("ki,ki->k", z[:-1].conj(), z[1:])
    if np.any(np.abs(overlaps) < 1e-12):
        raise ValueError("consecutive samples are orthogonal; sample the path more densely")
    gamma = np.angle(np.vdot(z[0], z[-1])) - np.sum(np.angle(overlaps))
    return float((gamma + np.pi) % (2.0 * np.pi) - np.pi)


def dressed_states(path: PathSpec, t: float):
    """Orthonormal dressed pair (symmetric phase convention) at time t."""
    seg = path.segment_at(t)
    chi = float(np.asarray(seg.chi(t)))
    xi = float(np.asarray(seg.xi(t)))
    f = float(np.asarray(seg.f(t))) if seg.f is not None else 0.0
    c, s = np.cos(chi / 2.0), np.sin(chi / 2.0)
    up = np.exp(-0.5j * f) * np.array([c * np.exp(-0.5j * xi), s * np.exp(0.5j * xi)])
    dn = np.exp(0.5j * f) * np.array([-s * np.exp(-0.5j * xi), c * np.exp(0.5j * xi)])
    return up, dn


# --------------------------------------------------------------------------
# designed paths
# --------------------------------------------------------------------------

def cz_path(chi1: float, xi1: float, h0: float):
    """Meridian out-and-back path for the geometric identity in S1.

    Starting at (chi1, xi1) the polar angle runs to the north pole at the
    constant rate h0 and returns along the same meridian; the drive phase is
    xi1 - pi/2 on the way up and xi1 + pi/2 on the way back.  Segment areas
    are chi1 each, so the total duration is 2 chi1 / h0.  The azimuth is
    constant, hence the accumulated dynamical phase vanishes identically.
    """
    if not (0.0 < chi1 < np.pi / 2):
        raise ValueError(f"chi1 must lie in (0, pi/2), got {chi1}")
    if h0 <= 0:
        raise ValueError(f"h0 must be positive, got {h0}")
    tau1 = chi1 / h0

    def const(v):
        return lambda t: np.full_like(np.asarray(t, dtype=float), v, dtype=float)

    seg1 = PathSegment(t0=0.0, t1=tau1,
                       chi=lambda t: chi1 - h0 * np.asarray(t, dtype=float),
                       xi=const(xi1), dchi=const(-h0), dxi=const(0.0))
    seg2 = PathSegment(t0=tau1, t1=2 * tau1,
                       chi=lambda t: h0 * (np.asarray(t, dtype=float) - tau1),
                       xi=const(xi1), dchi=const(h0), dxi=const(0.0))
    path = PathSpec(segments=(seg1, seg2))

    def amplitude(t):
        return np.full_like(np.asarray(t, dtype=float), h0, dtype=float)

    def phase(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < tau1, xi1 - np.pi / 2, xi1 + np.pi / 2)

    ctrl = ControlSchedule(amplitude=amplitude, phase=phase, duration=2 * tau1,
                           frame=S1_FRAME, boundaries=(tau1,))
    return path, ctrl


def xy_loop(gamma: float = np.pi / 2) -> PathSpec:
    """Four-segment cyclic loop generating a rotation exp(i gamma sigma_x).

    Over unit duration the polar angle sweeps equator -> south pole ->
    equator -> north pole -> equator as pi[1 +/- sin^2(2 pi s)]/2, with the
    auxiliary phase f = cos(2 chi)/5 and azimuth xi = -(4/15) cos^3(chi) plus
    a segment offset.  Azimuth jumps of -gamma at s = 1/4 (south pole) and
    +gamma at s = 3/4 (north pole) close the loop and set its geometric
    phase to gamma while the dynamical phase cancels over the four segments.
    """

    def chi_south(t):
        return np.pi * (1.0 + np.sin(2 * np.pi * np.asarray(t, dtype=float)) ** 2) / 2.0

    def chi_north(t):
        return np.pi * (1.0 - np.sin(2 * np.pi * np.asarray(t, dtype=float)) ** 2) / 2.0

    def dchi_south(t):
        return np.pi ** 2 * np.sin(4 * np.pi * np.asarray(t, dtype=float))

    def dchi_north(t):
        return -np.pi ** 2 * np.sin(4 * np.pi * np.asarray(t, dtype=float))

    def make(chi_fun, dchi_fun, offset, t0, t1):
        def xi(t):
            return offset - (4.0 / 15.0) * np.cos(chi_fun(t)) ** 3

        def dxi(t):
            c = np.cos(chi_fun(t))
            return (4.0 / 5.0) * c ** 2 * np.sin(chi_fun(t)) * dchi_fun(t)

        def f(t):
            return np.cos(2.0 * chi_fun(t)) / 5.0

        def df(t):
            return -(2.0 / 5.0) * np.sin(2.0 * chi_fun(t)) * dchi_fun(t)

        return PathSegment(t0=t0, t1=t1, chi=chi_fun, xi=xi,
                           dchi=dchi_fun, dxi=dxi, f=f, df=df)

    segs = (
        make(chi_south, dchi_south, 0.0, 0.0, 0.25),
        make(chi_south, dchi_south, -gamma, 0.25, 0.50),
        make(chi_north, dchi_north, -gamma, 0.50, 0.75),
        make(chi_north, dchi_north, 0.0, 0.75, 1.0),
    )
    return PathSpec(segments=segs, xi_jumps=((0.25, -gamma), (0.75, gamma)))
