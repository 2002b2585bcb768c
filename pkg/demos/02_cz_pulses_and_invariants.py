#!/usr/bin/env python3
"""Pulse shapes and entangling-class trajectory of the CZ construction.

The drive amplitude is a flat 2 MHz with a pi phase flip at the midpoint.
Watching the Makhlin invariants (G1, G2, G3) along the evolution shows the
gate passing through the sqrt-CNOT class near 3.3 ns and reaching the
CZ/CNOT class near 6.7 ns and again, as the designed gate, at 20 ns.
"""
import os
import warnings

import numpy as np

import geomspin as gs

warnings.simplefilter("ignore")
OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

H0 = gs.mhz(2.0)
cal = gs.calibrate_cz(H0, 145.15 * H0, np.pi / 25, 1.5 * np.pi)
sched, _ = gs.synthesize_cz(cal)

path, ctrl = gs.cz_path(np.pi / 25, 1.5 * np.pi, H0)
ts = np.linspace(0, ctrl.duration, 801)
amp, phase = ctrl.sample(ts)

times, invs = gs.invariant_trajectory(sched, gs.TimeGrid(0.0, cal.duration, 800))

for t_ref, label in ((3.342, "sqrt-CNOT class"), (6.669, "CZ class"),
                     (20.0, "designed CZ")):
    k = int(np.argmin(np.abs(times - t_ref)))
    g = invs[k]
    print(f"t = {times[k]:6.3f} ns  G = ({g[0]:+.3f}, {g[1]:+.3f}, {g[2]:+.3f})  <- {label}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    axes[0].plot(ts, gs.rad_per_ns_to_mhz(amp))
    axes[0].set_ylabel("h(t) / 2pi  (MHz)")
    axes[1].plot(ts, phase / np.pi)
    axes[1].set_ylabel("phi(t) / pi")
    for k, name in enumerate(("G1", "G2", "G3")):
        axes[2].plot(times, invs[:, k], label=name)
    for t_ref in (3.342, 6.669):
        axes[2].axvline(t_ref, color="gray", ls=":", lw=0.8)
    axes[2].set_xlabel("t (ns)")
    axes[2].set_ylabel("local invariants")
    axes[2].legend()
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "cz_pulses_invariants.png"), dpi=150)
    print(f"figure written to {OUT}/cz_pulses_invariants.png")
except ImportError:
    print("matplotlib not available; skipped the figure")
