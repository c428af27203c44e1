"""Plan the optical-conveyor frequency ramp for the full fiber approach.

Walks through the kinematic relations (detuning to belt speed, trap depth
to maximum acceleration), builds the 1 ms / 14 ms / 1 ms trapezoid that
covers the 6.3 mm free-space distance plus the first millimetre inside the
bore, checks it against the acceleration budget, and plots the ramp.
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from storedlight.config import paper_config
from storedlight.conveyor import (TrajectorySpec, check_feasible,
                                  detuning_from_speed, doppler_single_photon,
                                  speed_from_detuning, trajectory_from_spec)

OUT = Path(os.environ.get("OUTPUT_DIR", Path(__file__).parent / "out"))
OUT.mkdir(parents=True, exist_ok=True)

cfg = paper_config()
lam = cfg.lattice.lambda_lattice_m

v_cruise = speed_from_detuning(1.2e6, lam)
a_limit = cfg.lattice.a_max(cfg.species.mass)
print(f"belt speed at 1.2 MHz detuning : {v_cruise:.4f} m/s")
print(f"trap-depth acceleration limit  : {a_limit:.3e} m/s^2")
print(f"Doppler shift at cruise speed  : "
      f"{doppler_single_photon(v_cruise, cfg.species.lambda_probe_m) / 1e6:+.3f} MHz")

spec = TrajectorySpec.trapezoid(1.2e6, 1e-3, 14e-3, 1e-3)
traj = trajectory_from_spec(spec, lam)
report = check_feasible(traj, a_limit, cfg.numerics.safety_factor)
print(f"planned displacement           : {traj.displacement * 1e3:.3f} mm "
      f"over {traj.t_total * 1e3:.1f} ms")
print(f"peak acceleration              : {traj.max_abs_acceleration():.0f} "
      f"m/s^2 (limit x safety = {report.limit:.3e}) "
      f"-> {'ok' if report.ok else 'INFEASIBLE'}")

t = np.linspace(0.0, traj.t_total, 1601)
x, v, a = traj.sample_array(t)

fig, axes = plt.subplots(3, 1, figsize=(6.4, 7.0), sharex=True)
axes[0].plot(t * 1e3, np.array([detuning_from_speed(vi, lam) for vi in v]) / 1e3)
axes[0].set_ylabel("detuning (kHz)")
axes[1].plot(t * 1e3, v)
axes[1].set_ylabel("belt speed (m/s)")
axes[2].plot(t * 1e3, x * 1e3)
axes[2].set_ylabel("displacement (mm)")
axes[2].set_xlabel("time (ms)")
axes[0].set_title("conveyor ramp plan, MOT to 1 mm inside the bore")
fig.tight_layout()
fig.savefig(OUT / "conveyor_ramp.png", dpi=150)
print(f"wrote {OUT / 'conveyor_ramp.png'}")
