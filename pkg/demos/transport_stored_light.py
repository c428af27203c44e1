"""Transport stored light along the fiber and compare with staying put.

While the probe pulse is stored as a spin wave, the conveyor accelerates,
cruises at its rated speed and decelerates, carrying the cloud (and the
stored excitation) down the bore.  The scenario is compared with a
stationary hold of equal duration: the mover pays a fixed ramp penalty on
top of the common lifetime decay, so the efficiency ratio is flat versus
transport time.
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from storedlight.config import paper_config
from storedlight.protocols import run_store_retrieve, run_transport_inside

OUT = Path(os.environ.get("OUTPUT_DIR", Path(__file__).parent / "out"))
OUT.mkdir(parents=True, exist_ok=True)

cfg = paper_config()
transport_times = [500.0, 1000.0, 2000.0, 3000.0]   # us

rows = []
for t_tr in transport_times:
    moved = run_transport_inside(cfg, t_tr)
    held = run_store_retrieve(cfg, storage_time=moved.metadata["storage_time_us"])
    rows.append((t_tr, moved, held))

print("transport (us)  displacement (mm)  eta_moved  eta_held   ratio")
for t_tr, moved, held in rows:
    ratio = moved.efficiency / held.efficiency
    print(f"{t_tr:13.0f}  {moved.metadata['displacement_mm']:16.3f}  "
          f"{moved.efficiency:9.4f}  {held.efficiency:9.4f}  {ratio:.3f}")

last = rows[-1][1]
print(f"cruise speed {last.metadata['cruise_speed_mps']:.3f} m/s, "
      f"ramp penalty {last.metadata['ramp_penalty_factor']:.4f}")

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 6.4), sharex=True)
t_ms = [row[0] * 1e-3 for row in rows]
ax1.plot(t_ms, [row[1].efficiency for row in rows], "o-", label="transported")
ax1.plot(t_ms, [row[2].efficiency for row in rows], "s--", label="stationary")
ax1.set_ylabel("storage efficiency")
ax1.legend()
ax1.set_title("stored-light transport vs stationary hold")
ax2.plot(t_ms, [row[1].efficiency / row[2].efficiency for row in rows], "o-")
ax2.axhline(rows[-1][1].metadata["ramp_penalty_factor"], color="k", lw=0.8,
            alpha=0.6, label="ramp penalty")
ax2.set_ylabel("efficiency ratio")
ax2.set_xlabel("transport time (ms)")
ax2.set_ylim(0.0, 1.05)
ax2.legend()
fig.tight_layout()
fig.savefig(OUT / "transport_comparison.png", dpi=150)
print(f"wrote {OUT / 'transport_comparison.png'}")
