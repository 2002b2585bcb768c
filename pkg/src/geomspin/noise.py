"""Quasistatic exchange-noise model and Monte Carlo infidelity estimation.

The only noise channel is a Gaussian quasistatic shift of the exchange,
constant during one gate and resampled between repetitions.  Draws are
counter-based (Philox keyed by the seed), so a given (seed, k) always yields
the same shift and results are bit-reproducible for any worker count: the
full draw array is generated once up front and per-sample results are
reduced in sample order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .core import (PiecewiseConstantHamiltonian, TimeGrid, auto_steps, fidelity,
                   propagate, rad_per_ns_to_mhz, unitarity_defect, UNITARITY_TOL)
from .gates import ExchangeScheduleHamiltonian, GateTarget

THREADS_ENV = "GEOMSPIN_THREADS"


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian quasistatic exchange noise: std sigma_j (rad/ns), draw count,
    and the 64-bit seed of the counter-based generator."""

    sigma_j: float
    samples: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.sigma_j < 0:
            raise ValueError(f"sigma_j must be nonnegative, got {self.sigma_j}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")


def sample_delta_j(m: NoiseModel) -> np.ndarray:
    """The model's exchange shifts; draw k is a pure function of (seed, k)."""
    if m.sigma_j == 0.0:
        return np.zeros(m.samples)
    gen = np.random.Generator(np.random.Philox(key=np.uint64(m.seed)))
    return m.sigma_j * gen.standard_normal(m.samples)


def _propagate_schedule(sched, t_final: Optional[float]) -> np.ndarray:
    if isinstance(sched, ExchangeScheduleHamiltonian):
        return sched.propagator(t_final)
    if isinstance(sched, PiecewiseConstantHamiltonian):
        end = sched.t1 if t_final is None else t_final
        return sched.propagator(sched.t0, end)
    duration = getattr(sched, "duration", None)
    end = duration if t_final is None else t_final
    if end is None:
        raise ValueError("generic schedules need an explicit t_final")
    steps = auto_steps(sched, 0.0, end)
    return propagate(sched, TimeGrid(0.0, end, steps))


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "0") or "0")
    if threads <= 0:
        return 1
    return threads


def mc_infidelity(schedule_factory: Callable, target, m: NoiseModel,
                  t_final: Optional[float] = None,
                  threads: Optional[int] = None):
    """Mean and standard error of 1 - F over the quasistatic ensemble.

    `schedule_factory` maps an exchange shift delta_j to a schedule; the
    same shift must reach every appearance of the exchange in that schedule.
    `target` is a GateTarget or a plain unitary (for milestone gates whose
    reference is the noiseless propagator).  Every propagated sample is
    checked for unitarity; a propagation failure aborts with the offending
    delta_j.
    """
    u_ideal = target.matrix if isinstance(target, GateTarget) else np.asarray(target)
    shifts = sample_delta_j(m)

    def one(k: int) -> float:
        dj = float(shifts[k])
        try:
            u = _propagate_schedule(schedule_factory(dj), t_final)
        except Exception as exc:
            raise RuntimeError(f"propagation failed at delta_j = {dj:.6g} rad/ns") from exc
        defect = unitarity_defect(u)
        if defect > UNITARITY_TOL:
            raise RuntimeError(
                f"sample at delta_j = {dj:.6g} lost unitarity (defect {defect:.3e})")
        return 1.0 - fidelity(u, u_ideal)

    n_threads = _resolve_threads(threads)
    if n_threads == 1:
        infids = np.array([one(k) for k in range(m.samples)])
    else:
        chunks = np.array_split(np.arange(m.samples), n_threads)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            parts = list(pool.map(lambda idx: [one(int(k)) for k in idx], chunks))
        infids = np.array([v for part in parts for v in part])
    mean = float(np.mean(infids))
    stderr = float(np.std(infids, ddof=1) / np.sqrt(m.samples)) if m.samples > 1 else 0.0
    return mean, stderr


class SweepGate(NamedTuple):
    """One row source for a sweep: a named noisy-schedule factory and its
    fidelity reference (GateTarget or unitary), with an optional evaluation
    time for milestone gates."""

    name: str
    factory: Callable
    target: object
    t_final: Optional[float] = None


@dataclass(frozen=True)
class SweepRow:
    gate: str
    sigma_j: float
    mean_infidelity: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class SweepResult:
    """Noise-robustness table; h0 is the reference rate for the CSV units."""

    rows: tuple
    h0: float

    CSV_HEADER = "gate,sigma_j_over_h0,sigma_j_mhz,mean_infidelity,stderr,samples,seed"

    def to_csv_text(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(",".join([
                r.gate,
                f"{r.sigma_j / self.h0:.17g}",
                f"{rad_per_ns_to_mhz(r.sigma_j):.17g}",
                f"{r.mean_infidelity:.17g}",
                f"{r.stderr:.17g}",
                str(r.samples),
                str(r.seed),
            ]))
        return "\n".join(lines) + "\n"

    def by_gate(self, name: str):
        return [r for r in self.rows if r.gate == name]


def _cell_seed(base_seed: int, gate_idx: int, sigma_idx: int) -> int:
    ss = np.random.SeedSequence(entropy=int(base_seed) & (2 ** 63 - 1),
                                spawn_key=(gate_idx, sigma_idx))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sweep(gates: Sequence[SweepGate], sigma_grid: Sequence[float], m: NoiseModel,
          h0: float, threads: Optional[int] = None) -> SweepResult:
    """Mean infidelity for every (gate, sigma) pair.

    Each cell uses an independent substream derived from (seed, gate index,
    sigma index), so the table is reproducible row by row and independent of
    evaluation order or worker count.
    """
    if len(sigma_grid) == 0:
        raise ValueError("sigma grid must not be empty")
    rows = []
    for gi, gate in enumerate(gates):
        for si, sigma in enumerate(sigma_grid):
            cell = NoiseModel(sigma_j=float(sigma), samples=m.samples,
                              seed=_cell_seed(m.seed, gi, si))
            mean, err = mc_infidelity(gate.factory, gate.target, cell,
                                      t_final=gate.t_final, threads=threads)
            rows.append(SweepRow(gate=gate.name, sigma_j=float(sigma),
                                 mean_infidelity=mean, stderr=err,
                                 samples=m.samples, seed=m.seed))
    return SweepResult(rows=tuple(rows), h0=h0)
