"""Carry stored light across the fiber tip, and store inside a moving lattice.

Two scenarios beyond plain in-fiber transport.  First, the write happens
with the cloud straddling the fiber entrance, so only part of the density
sits in the guided mode; the conveyor then pulls the spin wave fully into
the bore (or back out of it).  Second, the co-moving case: write and read
both happen while the lattice is already running at constant speed, which
Doppler-shifts the carrier but costs no ramp during storage.
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from storedlight.config import paper_config
from storedlight.protocols import run_comoving, run_transport_interface

OUT = Path(os.environ.get("OUTPUT_DIR", Path(__file__).parent / "out"))
OUT.mkdir(parents=True, exist_ok=True)

cfg = paper_config()
distances = [0.0, 0.75, 1.5]   # mm of transport after the write

print("interface transport (write at the fiber tip)")
print("direction  distance (mm)  OD at write  OD at read  efficiency")
curves = {}
for direction in ("inward", "outward"):
    res = run_transport_interface(cfg, direction, distances)
    curves[direction] = res
    for r in res:
        m = r.metadata
        print(f"{direction:>8}  {m['distance_mm']:12.2f}  {m['od_at_start']:11.2f}"
              f"  {m['od_at_end']:10.2f}  {r.efficiency:9.4f}")

fig, ax = plt.subplots(figsize=(6.4, 4.2))
for direction, res in curves.items():
    ax.plot([r.metadata["distance_mm"] for r in res],
            [r.efficiency for r in res], "o-", label=direction)
ax.set_xlabel("transport distance (mm)")
ax.set_ylabel("storage efficiency")
ax.set_title("storage across the fiber interface")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "interface_transport.png", dpi=150)

# --- co-moving storage ------------------------------------------------------
storage_time = 2540.0   # us
tau_moving = 2600.0     # us; the running lattice scatters more light
speeds = [0.0, 0.243, 0.486]   # m/s

print("\nco-moving storage, {:.2f} ms hold".format(storage_time * 1e-3))
print("speed (m/s)  efficiency  Doppler 1-ph (MHz)  Doppler 2-ph (Hz)")
comoving = []
for v in speeds:
    r = run_comoving(cfg, speed=v, storage_time=storage_time,
                     tau_storage=tau_moving)
    comoving.append(r)
    m = r.metadata
    print(f"{v:10.3f}  {r.efficiency:9.4f}  {m['doppler_single_photon_mhz']:17.3f}"
          f"  {m['doppler_two_photon_hz']:16.3f}")

last = comoving[-1].metadata
print(f"displacement at full speed: {last['displacement_mm']:.2f} mm")

fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.plot(speeds, [r.efficiency for r in comoving], "o-")
ax.set_xlabel("lattice speed (m/s)")
ax.set_ylabel("storage efficiency")
ax.set_title(f"co-moving storage, {storage_time * 1e-3:.2f} ms hold")
fig.tight_layout()
fig.savefig(OUT / "comoving_storage.png", dpi=150)
print(f"wrote 2 figures to {OUT}")
