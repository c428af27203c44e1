"""End-to-end storage and transport scenarios, efficiency and lifetime fits.

Every protocol runs the field solver twice: once with the atoms and once
without (the reference).  Storage efficiency is the energy retrieved in the
read window divided by the reference pulse energy; the reported number is

    eta = eta_raw * efficiency_scale * eps^(n_ramp_pairs * v_peak/v_ref),

with ``efficiency_scale`` the one-time overall calibration from the config
and ``eps`` the measured per-pair penalty of a conveyor accelerate/
decelerate pair at the reference belt speed; scaling the exponent with the
actual peak speed keeps the penalty continuous down to v = 0.  Lifetime
decay is not applied here: the solver's spin decoherence rate is tied to
the configured storage lifetime, so exp(-t/tau) emerges from the dynamics
(analytically across dark intervals).

Protocols place all conveyor motion strictly inside the dark interval,
except the co-moving scenario where the belt runs at constant speed through
write, storage and read, exposing both stages to the Doppler shift.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from . import config as _config
from .conveyor import (check_feasible, constant_velocity, doppler_single_photon,
                       plan_distance, plan_trapezoid, speed_from_detuning,
                       spin_wave_wavelength, two_photon_doppler)
from .dynamics import TimeSeries, output_pulse_energy, simulate
from .medium import effective_od, ramp_penalty


class ProtocolError(RuntimeError):
    """A scenario precondition failed or a run produced unusable output."""


class InfeasibleTrajectoryError(ProtocolError):
    """A requested transport exceeds the lattice acceleration limit."""


@dataclass(frozen=True)
class ProtocolResult:
    """One executed scenario: raw series, reference and scaled efficiency."""

    series: TimeSeries
    reference_series: TimeSeries
    efficiency: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.efficiency < 0.0:
            raise ValueError("efficiency must be non-negative")
        ref = self.metadata.get("reference_energy")
        if ref is not None and ref <= 0.0:
            raise ValueError("reference energy must be positive")


@dataclass(frozen=True)
class EfficiencyPoint:
    """One (abscissa, efficiency) sample of a sweep; sigma = 0 means exact."""

    abscissa: float
    efficiency: float
    sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class FitResult:
    """Exponential-decay fit A exp(-t/tau) with standard errors."""

    amplitude: float
    tau: float
    amplitude_err: float
    tau_err: float
    residual_norm: float

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("fitted lifetime must be positive")


def storage_efficiency(retrieved: TimeSeries, retrieved_window,
                       reference: TimeSeries, reference_window) -> float:
    """Ratio of retrieved to reference pulse energy over the given windows."""
    e_ref = output_pulse_energy(reference, reference_window)
    if e_ref <= 0.0:
        raise ProtocolError("reference pulse energy is zero; nothing to normalise by")
    e_ret = output_pulse_energy(retrieved, retrieved_window)
    return e_ret / e_ref


# ---------------------------------------------------------------------------
# scenario plumbing
# ---------------------------------------------------------------------------

def _dark_schedule(cfg, t_dark_after_write: float):
    """Schedule whose dark interval extends ``t_dark_after_write`` us past
    the end of the write phase, with margins so any conveyor motion started
    at the gap start has finished before the read lead begins.

    Returns (schedule, motion_start_us).
    """
    ctrl = cfg.control
    probe = cfg.probe
    num = cfg.numerics
    write_end = max(ctrl.t_off + ctrl.edge,
                    probe.center + probe.truncation_fwhms * probe.fwhm)
    write_end += num.write_settle
    t_reon = write_end + t_dark_after_write + num.write_settle + num.read_lead
    schedule = ctrl.schedule(storage_time=t_reon - ctrl.t_off)
    return schedule, write_end


def _windows(cfg, schedule):
    probe = cfg.probe
    ref_win = (probe.onset, probe.center + probe.truncation_fwhms * probe.fwhm)
    ret_win = (schedule.t_reon, schedule.t_reon + cfg.numerics.retrieval_window)
    return ref_win, ret_win


def _execute(cfg, schedule, trajectory=None, motion_start=None, name="",
             extra=None) -> ProtocolResult:
    """Run atoms + reference simulations and assemble a ProtocolResult."""
    ref_win, ret_win = _windows(cfg, schedule)
    series = simulate(cfg, trajectory=trajectory, schedule=schedule,
                      motion_start=motion_start)
    reference = simulate(cfg, trajectory=trajectory, schedule=schedule,
                         motion_start=motion_start, include_atoms=False)
    e_ref = output_pulse_energy(reference, ref_win)
    if e_ref <= 0.0:
        raise ProtocolError("reference pulse energy is zero; check the probe")
    raw = output_pulse_energy(series, ret_win) / e_ref
    meta = {
        "protocol": name,
        "raw_efficiency": raw,
        "efficiency_scale": cfg.calibration.efficiency_scale,
        "ramp_pairs": 0.0,
        "ramp_penalty_eps": cfg.medium.ramp_penalty_eps,
        "ramp_speed_ratio": 1.0,
        "ramp_penalty_factor": 1.0,
        "storage_time_us": schedule.storage_time,
        "reference_energy": e_ref,
        "reference_window_us": ref_win,
        "retrieval_window_us": ret_win,
        "events": dict(series.events),
    }
    if extra:
        meta.update(extra)
    eta = raw * cfg.calibration.efficiency_scale
    return ProtocolResult(series=series, reference_series=reference,
                          efficiency=eta, metadata=meta)


def _scaled(result: ProtocolResult, ramp_pairs: float,
            speed_ratio: float = 1.0) -> ProtocolResult:
    """Re-apply the ramp penalty for a given pair count and speed ratio."""
    meta = dict(result.metadata)
    factor = ramp_penalty(ramp_pairs, meta["ramp_penalty_eps"], speed_ratio)
    meta["ramp_pairs"] = ramp_pairs
    meta["ramp_speed_ratio"] = speed_ratio
    meta["ramp_penalty_factor"] = factor
    eta = meta["raw_efficiency"] * meta["efficiency_scale"] * factor
    return replace(result, efficiency=eta, metadata=meta)


def _lattice_speed(cfg) -> float:
    """Signed cruise speed (m/s) of the configured detuning program."""
    return (cfg.trajectory_spec.direction
            * speed_from_detuning(cfg.trajectory_spec.peak_detuning,
                                  cfg.lattice.lambda_lattice_m))


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def run_store_retrieve(cfg, storage_time: Optional[float] = None) -> ProtocolResult:
    """Store the probe pulse at rest and retrieve it after ``storage_time`` us.

    The reported efficiency carries the calibration scale but no ramp
    penalty; lifetime decay over the dark interval comes out of the solver.
    """
    if storage_time is None:
        storage_time = cfg.control.default_storage_time
    if storage_time < 0.0:
        raise ValueError("storage time must be non-negative")
    schedule = cfg.control.schedule(storage_time=storage_time)
    return _execute(cfg, schedule, name="store_retrieve",
                    extra={"storage_time_us": storage_time})


def run_transport_inside(cfg, t_transport: float) -> ProtocolResult:
    """Store at rest, transport for ``t_transport`` us in the dark, retrieve.

    The transport is a symmetric velocity trapezoid at the configured peak
    detuning, fitted entirely inside the dark interval; the single
    accelerate/decelerate pair costs eps**(v/v_ref) regardless of distance
    (a zero-length move still exercises the ramp pair by definition, at the
    configured cruise speed).
    """
    if t_transport < 0.0:
        raise ValueError("transport time must be non-negative")
    v = _lattice_speed(cfg)
    ramp_s = cfg.trajectory_spec.ramp_time
    t_move_s = t_transport * 1e-6
    if t_transport > 0.0:
        ramp_s = min(ramp_s, 0.5 * t_move_s)
        if ramp_s <= 0.0:
            raise ProtocolError("transport needs a positive ramp time")
        traj = plan_trapezoid(v, ramp_s, t_move_s - 2.0 * ramp_s, ramp_s)
        report = check_feasible(traj, cfg.lattice.a_max(cfg.species.mass),
                                cfg.numerics.safety_factor)
        if not report.ok:
            raise InfeasibleTrajectoryError(
                "acceleration infeasible: " + "; ".join(report.violations))
    else:
        traj = None
    schedule, motion_start = _dark_schedule(cfg, t_transport)
    result = _execute(cfg, schedule, trajectory=traj, motion_start=motion_start,
                      name="transport_inside",
                      extra={
                          "transport_time_us": t_transport,
                          "displacement_mm": (traj.displacement * 1e3) if traj else 0.0,
                          "cruise_speed_mps": v,
                      })
    ratio = abs(v) / cfg.medium.ramp_penalty_ref_speed
    return _scaled(result, ramp_pairs=1, speed_ratio=ratio)


def run_transport_interface(cfg, direction: str,
                            distances: Sequence[float]) -> list:
    """Transport stored light across the fiber tip, one run per distance (mm).

    ``direction``: "inward" stores with the cloud centred 1 mm outside the
    tip and moves it into the fiber; "outward" stores 0.5 mm inside and
    moves it out.  A zero distance skips the conveyor entirely (plain
    store/retrieve at the start position, no ramp penalty).  The effective
    optical depth at write and read positions differs through the
    divergence falloff outside the bore; that asymmetry is the physics of
    interest here.
    """
    if direction == "inward":
        start = cfg.fiber.tip_position - 1.0
        sign = 1.0
    elif direction == "outward":
        start = cfg.fiber.tip_position + 0.5
        sign = -1.0
    else:
        raise ValueError("direction must be 'inward' or 'outward'")
    cfg = _config.with_field(cfg, "cloud.center", start)
    v = sign * abs(_lattice_speed(cfg))
    ramp_s = cfg.trajectory_spec.ramp_time
    a_limit = cfg.lattice.a_max(cfg.species.mass)

    results = []
    for d_mm in distances:
        if d_mm < 0.0:
            raise ValueError("transport distance must be non-negative")
        if d_mm > 0.0:
            traj = plan_distance(sign * d_mm * 1e-3, v, ramp_s)
            report = check_feasible(traj, a_limit, cfg.numerics.safety_factor)
            if not report.ok:
                raise InfeasibleTrajectoryError(
                    "acceleration infeasible: " + "; ".join(report.violations))
            t_move = traj.t_total * 1e6
            pairs = 1.0
            # short moves never reach cruise; the penalty follows the
            # actual peak speed of the planned profile
            ratio = traj.peak_speed() / cfg.medium.ramp_penalty_ref_speed
        else:
            traj = None
            t_move = 0.0
            pairs = 0.0
            ratio = 0.0
        schedule, motion_start = _dark_schedule(cfg, t_move)
        end = start + sign * d_mm
        result = _execute(cfg, schedule, trajectory=traj,
                          motion_start=motion_start,
                          name=f"transport_{direction}",
                          extra={
                              "direction": direction,
                              "distance_mm": d_mm,
                              "transport_time_us": t_move,
                              "start_center_mm": start,
                              "end_center_mm": end,
                              "od_at_start": effective_od(cfg.cloud, cfg.medium, cfg.fiber),
                              "od_at_end": effective_od(cfg.cloud, cfg.medium,
                                                        cfg.fiber,
                                                        center_offset=sign * d_mm),
                          })
        results.append(_scaled(result, ramp_pairs=pairs, speed_ratio=ratio))
    return results


def run_comoving(cfg, speed: Optional[float] = None,
                 storage_time: Optional[float] = None,
                 tau_storage: Optional[float] = None) -> ProtocolResult:
    """Store and retrieve while the lattice runs at constant ``speed`` (m/s).

    Both write and read happen in the moving medium, so each sees the full
    single-photon Doppler shift -v/lambda (and the tiny two-photon one).
    No ramps occur during the storage interval, but bringing the belt up to
    speed before the write pulse costs half a ramp pair (the matching
    slow-down happens after read-out and cannot touch the result):
    amplitude factor eps**(v / (2 v_ref)), which is 1 at v = 0 so the
    resting case reduces to run_store_retrieve exactly.  ``tau_storage``
    (us) overrides the configured lifetime for this scenario, because the
    moving-lattice background light differs from the stationary case.
    """
    if speed is None:
        speed = _lattice_speed(cfg)
    if storage_time is None:
        storage_time = cfg.control.default_storage_time
    if storage_time < 0.0:
        raise ValueError("storage time must be non-negative")
    v_rated = abs(speed_from_detuning(cfg.trajectory_spec.peak_detuning,
                                      cfg.lattice.lambda_lattice_m))
    if v_rated > 0.0 and abs(speed) > v_rated * (1.0 + 1e-9):
        raise ProtocolError(
            f"requested speed {speed:.4g} m/s exceeds the configured lattice "
            f"rating {v_rated:.4g} m/s")
    if tau_storage is not None:
        cfg = _config.with_field(cfg, "medium.tau_storage", tau_storage)

    schedule = cfg.control.schedule(storage_time=storage_time)
    t_end_est = (schedule.t_reon + schedule.edge
                 + cfg.numerics.retrieval_window + 0.5)
    if speed != 0.0:
        traj = constant_velocity(speed, t_end_est * 1e-6)
        drift_mm = speed * t_end_est * 1e-3
        for center in (cfg.cloud.center, cfg.cloud.center + drift_mm):
            if not (cfg.fiber.tip_position <= center <= cfg.fiber.far_end):
                raise ProtocolError(
                    f"cloud centre reaches {center:.3f} mm and leaves the fiber "
                    "during the co-moving run")
    else:
        traj = None
        drift_mm = 0.0
    lam_sw_m = spin_wave_wavelength(cfg.species.delta_hf_hz)
    result = _execute(cfg, schedule, trajectory=traj, motion_start=0.0,
                      name="comoving",
                      extra={
                          "storage_time_us": storage_time,
                          "speed_mps": speed,
                          "displacement_mm": drift_mm,
                          "doppler_single_photon_mhz":
                              doppler_single_photon(speed, cfg.species.lambda_probe_m) * 1e-6,
                          "doppler_two_photon_hz":
                              two_photon_doppler(speed, lam_sw_m),
                          "tau_storage_us": cfg.medium.tau_storage,
                      })
    ratio = abs(speed) / cfg.medium.ramp_penalty_ref_speed
    return _scaled(result, ramp_pairs=0.5, speed_ratio=ratio)


# ---------------------------------------------------------------------------
# fitting and sweeps
# ---------------------------------------------------------------------------

def fit_exponential(points: Sequence[EfficiencyPoint]) -> FitResult:
    """Least-squares fit of A exp(-t/tau) to efficiency-vs-time samples.

    Needs at least three points with distinct abscissae and positive
    efficiencies (the seed comes from a log-linear regression).  Standard
    errors come from the fit covariance; with per-point sigmas given they
    are treated as absolute measurement errors.
    """
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("exponential fit needs at least three points")
    t = np.array([p.abscissa for p in pts], dtype=float)
    y = np.array([p.efficiency for p in pts], dtype=float)
    sig = np.array([p.sigma for p in pts], dtype=float)
    if len(np.unique(t)) != len(t):
        raise ValueError("abscissae must be distinct")
    if np.any(y <= 0.0):
        raise ValueError("efficiencies must be positive for the log-space seed")

    slope, intercept = np.polyfit(t, np.log(y), 1)
    tau0 = -1.0 / slope if slope < 0.0 else 100.0 * (t.max() - t.min() + 1.0)
    a0 = math.exp(intercept)

    def model(tt, a, tau):
        return a * np.exp(-tt / tau)

    use_sigma = sig if np.all(sig > 0.0) else None
    try:
        popt, pcov = curve_fit(model, t, y, p0=[a0, tau0], sigma=use_sigma,
                               absolute_sigma=use_sigma is not None,
                               maxfev=20000, xtol=1e-14, ftol=1e-14)
    except RuntimeError as exc:
        raise ProtocolError(f"exponential fit did not converge: {exc}") from exc
    a_fit, tau_fit = popt
    if tau_fit <= 0.0 or not np.all(np.isfinite(popt)):
        raise ProtocolError("exponential fit converged to a non-physical lifetime")
    errs = np.sqrt(np.maximum(np.diag(pcov), 0.0)) if np.all(np.isfinite(pcov)) \
        else np.array([math.nan, math.nan])
    residual = float(np.linalg.norm(model(t, *popt) - y))
    return FitResult(amplitude=float(a_fit), tau=float(tau_fit),
                     amplitude_err=float(errs[0]), tau_err=float(errs[1]),
                     residual_norm=residual)


def add_efficiency_noise(points: Sequence[EfficiencyPoint], rel_sigma: float,
                         rng: np.random.Generator) -> list:
    """Multiplicative Gaussian noise for fitter validation, seeded RNG only."""
    if rel_sigma < 0.0:
        raise ValueError("relative noise must be non-negative")
    out = []
    for p in points:
        noisy = p.efficiency * (1.0 + rel_sigma * rng.standard_normal())
        out.append(EfficiencyPoint(abscissa=p.abscissa,
                                   efficiency=max(noisy, 0.0),
                                   sigma=rel_sigma * p.efficiency))
    return out


#: protocol name -> (sweepable argument, runner returning one ProtocolResult)
PROTOCOLS = {
    "store_retrieve": ("storage_time", run_store_retrieve),
    "transport_inside": ("t_transport", run_transport_inside),
    "comoving": ("storage_time", run_comoving),
    "transport_inward": ("distance",
                         lambda cfg, distance, **kw:
                         run_transport_interface(cfg, "inward", [distance], **kw)[0]),
    "transport_outward": ("distance",
                          lambda cfg, distance, **kw:
                          run_transport_interface(cfg, "outward", [distance], **kw)[0]),
}


def sweep(cfg, parameter: str, values: Sequence[float],
          protocol: str = "store_retrieve", results: Optional[list] = None,
          **kwargs) -> list:
    """Run ``protocol`` once per value, returning EfficiencyPoints in order.

    ``parameter`` is either the protocol's natural argument (for example
    ``storage_time`` for store_retrieve, in us) or a dotted internal config
    path such as ``medium.od_fiber``, in which case each run uses a
    modified config and the protocol's default arguments.  Unknown names
    raise ``KeyError``.  Pass a list as ``results`` to also collect the
    full ProtocolResults in order.
    """
    if protocol not in PROTOCOLS:
        raise KeyError(f"unknown protocol '{protocol}'; "
                       f"known: {', '.join(sorted(PROTOCOLS))}")
    arg_name, runner = PROTOCOLS[protocol]
    points = []
    for value in values:
        if parameter == arg_name:
            result = runner(cfg, **{arg_name: value}, **kwargs)
        else:
            cfg_i = _config.with_field(cfg, parameter, value)  # KeyError if unknown
            result = runner(cfg_i, **kwargs)
        if results is not None:
            results.append(result)
        points.append(EfficiencyPoint(abscissa=float(value),
                                      efficiency=result.efficiency))
    return points
