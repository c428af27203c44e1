"""Map the transparency window of the in-fiber medium.

Three views of the same physics: CW transmission versus two-photon
detuning, the amplitude transfer function across the window, and a
time-domain pulse that crosses the cloud with the control field on
(slowed, mostly transmitted) and off (absorbed).
"""
import os
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from storedlight.config import config_from_dict, paper_config
from storedlight.dynamics import (ControlSchedule, ProbePulse, group_delay,
                                  simulate, steady_state_transmission,
                                  transfer_function)

OUT = Path(os.environ.get("OUTPUT_DIR", Path(__file__).parent / "out"))
OUT.mkdir(parents=True, exist_ok=True)

cfg = paper_config()
gamma = cfg.species.gamma
wc = cfg.control.on_level
od = cfg.medium.od_fiber
gamma_s = 1.0 / (2.0 * cfg.medium.tau_storage)

# --- CW transmission across the two-photon resonance -----------------------
delta2 = np.linspace(-3.0, 3.0, 601) * gamma
t_eit = [steady_state_transmission(od, d, wc, gamma_s, d, gamma) for d in delta2]
t_bare = [steady_state_transmission(od, d, 0.0, gamma_s, d, gamma) for d in delta2]

print(f"OD {od:g}, control {wc / gamma:.2f} gamma, "
      f"spin decay {gamma_s:.2e} rad/us")
print(f"on-resonance transmission: bare {np.exp(-od):.4f}, "
      f"EIT {steady_state_transmission(od, 0.0, wc, gamma_s, 0.0, gamma):.6f}")

fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.plot(delta2 / gamma, t_bare, label="control off")
ax.plot(delta2 / gamma, t_eit, label="control on")
ax.set_xlabel("probe detuning (units of gamma)")
ax.set_ylabel("power transmission")
ax.set_title(f"CW transmission, OD = {od:g}")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "cw_transmission.png", dpi=150)

# --- spectral transfer function --------------------------------------------
omega = np.linspace(-1.5, 1.5, 801) * gamma
h = transfer_function(omega, od, 0.0, wc, gamma_s, 0.0, gamma)
fig, ax = plt.subplots(figsize=(6.4, 4.2))
ax.plot(omega / gamma, np.abs(h) ** 2, label="|H|^2")
ax.plot(omega / gamma, np.unwrap(np.angle(h)), "--", label="arg H (rad)")
ax.set_xlabel("envelope frequency (units of gamma)")
ax.set_title("amplitude transfer function inside the window")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "transfer_function.png", dpi=150)

# --- time domain: a pulse through the cloud --------------------------------
# Park the cloud deep inside the bore so the full OD acts on the pulse,
# and use a narrowband probe that fits inside the transparency window.
deep = config_from_dict({"cloud": {"center_mm": 10.0}})
probe = ProbePulse(peak_rabi=0.01 * gamma, center=16.0, fwhm=4.0)

runs = {
    "no medium": simulate(deep, probe=probe, schedule=ControlSchedule(wc),
                          include_atoms=False, gamma_s=0.0),
    "control on": simulate(deep, probe=probe, schedule=ControlSchedule(wc),
                           gamma_s=0.0),
    "control off": simulate(deep, probe=probe, schedule=ControlSchedule(0.0),
                            gamma_s=0.0),
}

fig, ax = plt.subplots(figsize=(6.4, 4.2))
for label, ts in runs.items():
    ax.plot(ts.t, np.abs(ts.field_out) ** 2, label=label)
ax.set_xlabel("time (us)")
ax.set_ylabel("|E_out|^2 (probe Rabi units)")
ax.set_title("pulse propagation through the in-fiber cloud")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "pulse_propagation.png", dpi=150)

ref = runs["no medium"]
eit = runs["control on"]


def centroid(ts):
    p = np.abs(ts.field_out) ** 2
    return np.trapezoid(ts.t * p, ts.t) / np.trapezoid(p, ts.t)


delay = centroid(eit) - centroid(ref)
print(f"measured group delay {delay * 1e3:.1f} ns "
      f"(narrowband formula {group_delay(od, wc, gamma) * 1e3:.1f} ns)")
energy = np.trapezoid(np.abs(eit.field_out) ** 2, eit.t)
energy_ref = np.trapezoid(np.abs(ref.field_out) ** 2, ref.t)
print(f"EIT pulse transmission {energy / energy_ref:.4f}")
print(f"wrote 3 figures to {OUT}")
