"""Store a probe pulse as a spin wave, hold it, read it back out.

Runs the stationary store-and-retrieve scenario for a ladder of storage
times, plots the retrieved pulse next to the input reference, and fits
the efficiency decay with an exponential to recover the storage lifetime.
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from storedlight.config import paper_config
from storedlight.protocols import fit_exponential, sweep

OUT = Path(os.environ.get("OUTPUT_DIR", Path(__file__).parent / "out"))
OUT.mkdir(parents=True, exist_ok=True)

cfg = paper_config()
storage_times = [5.0, 200.0, 800.0, 2000.0]   # us

results = []
points = sweep(cfg, "storage_time", storage_times, protocol="store_retrieve",
               results=results)

print("storage time (us)   efficiency")
for p in points:
    print(f"{p.abscissa:14.0f}   {p.efficiency:.4f}")

fit = fit_exponential(points)
print(f"fitted lifetime tau = {fit.tau * 1e-3:.3f} ms "
      f"(configured {cfg.medium.tau_storage * 1e-3:.3f} ms)")
print(f"fitted zero-time efficiency = {fit.amplitude:.4f}")

# --- retrieved pulse for the shortest hold ---------------------------------
r = results[0]
events = r.series.events
fig, ax = plt.subplots(figsize=(7.0, 4.2))
ax.semilogy(r.series.t, np.abs(r.series.field_out) ** 2 + 1e-12,
            label="with medium")
ax.semilogy(r.reference_series.t, np.abs(r.reference_series.field_out) ** 2 + 1e-12,
            "--", label="no medium (reference)")
for name in ("control_off", "control_reon"):
    if name in events:
        ax.axvline(events[name], color="k", lw=0.8, alpha=0.5)
        ax.text(events[name], ax.get_ylim()[1] * 0.5, " " + name,
                rotation=90, va="top", fontsize=8)
ax.set_ylim(1e-10, None)
ax.set_xlabel("time (us)")
ax.set_ylabel("|E_out|^2 (probe Rabi units)")
ax.set_title(f"store and retrieve, {storage_times[0]:.0f} us hold, "
             f"efficiency {r.efficiency:.3f}")
ax.legend(loc="upper right")
fig.tight_layout()
fig.savefig(OUT / "store_retrieve_series.png", dpi=150)

# --- efficiency decay -------------------------------------------------------
tt = np.linspace(0.0, max(storage_times) * 1.05, 300)
fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.plot([p.abscissa * 1e-3 for p in points],
        [p.efficiency for p in points], "o", label="simulated")
ax.plot(tt * 1e-3, fit.amplitude * np.exp(-tt / fit.tau), "-",
        label=f"fit: tau = {fit.tau * 1e-3:.2f} ms")
ax.set_xlabel("storage time (ms)")
ax.set_ylabel("storage efficiency")
ax.set_title("efficiency decay in the stationary lattice")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "storage_decay.png", dpi=150)
print(f"wrote 2 figures to {OUT}")
