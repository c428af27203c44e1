"""Experiment configuration: schema, loading, validation, serialisation.

Configuration files are YAML (JSON is accepted as an alternative ingest
format) with nested sections and lab-friendly units carried in the key
names (``tau_storage_ms``, ``wavelength_nm``, ...).  Loading converts
everything once into the internal unit system (us, mm, rad/us; see
:mod:`storedlight.constants`) and returns a frozen :class:`ExperimentConfig`.
Every key has a default taken from the reference cold-ensemble setup this
package models, so a minimal file like ``{"species": "Rb87"}`` is complete.

The schema is strict: unknown sections or keys raise, and the top-level
``schema_version`` must match.  ``validate_config`` performs the semantic
cross-checks (pulse timing, trajectory feasibility, weak-probe sanity) and
returns a report instead of raising.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .constants import C, H_PLANCK, kelvin_to_joule, joule_to_kelvin, linewidth_hz_to_rad_us
from .conveyor import (TrajectorySpec, check_feasible, max_acceleration,
                       speed_from_detuning, trajectory_from_spec)
from .dynamics import ControlSchedule, ProbePulse
from .medium import CloudState, FiberGeometry, MediumModel

TWO_PI = 2.0 * math.pi

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Base class for configuration failures."""


class ConfigParseError(ConfigError):
    """The file could not be read as YAML or JSON."""


class ConfigSchemaError(ConfigError):
    """Unknown or missing keys, or an unsupported schema version."""


class ConfigUnitError(ConfigError):
    """A value is outside its physical domain."""


# ---------------------------------------------------------------------------
# leaf types that are not owned by another module
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomSpecies:
    """Atomic species constants in internal units.

    mass          kg
    gamma         excited-state decay rate, rad/us
    lambda_probe  probe wavelength, mm
    delta_hf      ground-state hyperfine splitting, MHz
    """

    name: str
    mass: float
    gamma: float
    lambda_probe: float
    delta_hf: float

    def __post_init__(self):
        for fname in ("mass", "gamma", "lambda_probe", "delta_hf"):
            if getattr(self, fname) <= 0.0:
                raise ValueError(f"species {fname} must be positive")

    # SI views for the kinematics layer
    @property
    def gamma_rad_s(self) -> float:
        return self.gamma * 1e6

    @property
    def lambda_probe_m(self) -> float:
        return self.lambda_probe * 1e-3

    @property
    def delta_hf_hz(self) -> float:
        return self.delta_hf * 1e6


@dataclass(frozen=True)
class LatticeConfig:
    """Moving-lattice parameters.

    lambda_lattice  mm
    trap_depth      J
    omega_z         axial trap frequency, rad/us
    omega_r         radial trap frequency, rad/us
    """

    lambda_lattice: float
    trap_depth: float
    omega_z: float
    omega_r: float

    def __post_init__(self):
        if self.lambda_lattice <= 0.0:
            raise ValueError("lattice wavelength must be positive")
        if self.trap_depth < 0.0:
            raise ValueError("trap depth must be non-negative")
        if self.omega_z < 0.0 or self.omega_r < 0.0:
            raise ValueError("trap frequencies must be non-negative")

    @property
    def lambda_lattice_m(self) -> float:
        return self.lambda_lattice * 1e-3

    def a_max(self, mass: float) -> float:
        """Trap acceleration limit in m/s^2 for an atom of ``mass`` kg."""
        return max_acceleration(self.trap_depth, self.lambda_lattice_m, mass)


@dataclass(frozen=True)
class ControlSettings:
    """Control-field settings from which per-run schedules are built.

    on_level              control Rabi frequency while on, rad/us
    t_off                 default switch-off start, us
    edge                  linear switch edge duration, us
    default_storage_time  re-on delay when a run does not override it, us
    """

    on_level: float
    t_off: float
    edge: float = 0.05
    default_storage_time: float = 5.0

    def __post_init__(self):
        if self.on_level < 0.0:
            raise ValueError("control level must be non-negative")
        if self.edge < 0.0:
            raise ValueError("edge duration must be non-negative")
        if self.default_storage_time < 0.0:
            raise ValueError("negative storage time")

    def schedule(self, storage_time: Optional[float] = None) -> ControlSchedule:
        """Realise a write/read schedule with the given storage time (us)."""
        t = self.default_storage_time if storage_time is None else storage_time
        return ControlSchedule(on_level=self.on_level, t_off=self.t_off,
                               t_reon=self.t_off + t, edge=self.edge)

    def always_on(self) -> ControlSchedule:
        return ControlSchedule(on_level=self.on_level, t_off=None,
                               t_reon=None, edge=self.edge)


@dataclass(frozen=True)
class NumericsConfig:
    """Grid, stepping and windowing knobs for the field solver."""

    points_per_width: int = 20     # grid points per cloud 1/e half-width
    dt_per_fastest: int = 20       # steps per fastest rate and per edge
    window_pad_widths: float = 4.0  # grid margin around the cloud, in widths
    retrieval_window: float = 5.0  # us after control re-on
    write_settle: float = 0.5      # us after the write phase before a gap
    read_lead: float = 0.5         # us integrated before control re-on
    gap_min: float = 1.0           # us; shorter gaps are integrated through
    safety_factor: float = 0.9     # fraction of a_max a plan may use

    def __post_init__(self):
        if self.points_per_width < 20:
            raise ValueError("need at least 20 grid points per cloud width")
        if self.dt_per_fastest < 4:
            raise ValueError("need at least 4 steps per fastest time scale")
        if self.window_pad_widths < 2.0:
            raise ValueError("window padding below two cloud widths")
        if self.retrieval_window <= 0.0:
            raise ValueError("retrieval window must be positive")
        if not 0.0 < self.safety_factor <= 1.0:
            raise ValueError("safety factor must be in (0, 1]")


@dataclass(frozen=True)
class CalibrationConstants:
    """One-time calibration output stored with the configuration.

    efficiency_scale multiplies every reported protocol efficiency; it is
    the single overall normalisation that maps the model's write/read
    efficiency onto the reference experiment.  1.0 means uncalibrated.
    """

    efficiency_scale: float = 1.0

    def __post_init__(self):
        if self.efficiency_scale <= 0.0:
            raise ValueError("efficiency scale must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, internally consistent description of one experiment."""

    species: AtomSpecies
    lattice: LatticeConfig
    cloud: CloudState
    fiber: FiberGeometry
    medium: MediumModel
    probe: ProbePulse
    control: ControlSettings
    trajectory_spec: TrajectorySpec
    numerics: NumericsConfig
    calibration: CalibrationConstants
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION


# ---------------------------------------------------------------------------
# species table and schema defaults
# ---------------------------------------------------------------------------

#: Built-in species data, overridable per config file.
SPECIES_TABLE = {
    "Rb87": {
        "mass_kg": 1.44316e-25,
        "linewidth_mhz": 6.065,          # gamma / 2 pi of the probe transition
        "wavelength_nm": 780.24,
        "hyperfine_splitting_ghz": 6.834683,
    },
}

# Calibrated constants, frozen output of `python -m storedlight.calibration`:
# od_scale_length_mm solves (store 1 mm outside + transport in) / all-inside
# efficiency = 1/2 at matched duration; efficiency_scale then anchors the
# stationary efficiency at a 5 us storage time to 0.11.
_CAL_OD_SCALE_LENGTH_MM = 0.835161
_CAL_EFFICIENCY_SCALE = 1.354281

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "species": {
        "name": "Rb87",
        "mass_kg": None,
        "linewidth_mhz": None,
        "wavelength_nm": None,
        "hyperfine_splitting_ghz": None,
    },
    "lattice": {
        "wavelength_nm": 810.0,
        "trap_depth_uk": 740.0,
        "axial_frequency_khz": 460.0,
        "radial_frequency_khz": 4.0,
    },
    "cloud": {
        "atom_number": 1.2e5,
        "center_mm": 1.0,
        "width_1e_mm": 1.2,
        "radial_temperature_uk": 190.0,
    },
    "fiber": {
        "tip_position_mm": 0.0,
        "length_mm": 100.0,
        "mode_field_diameter_um": 42.0,
        "mot_distance_mm": 6.3,
    },
    "medium": {
        "od_fiber": 5.0,
        "tau_storage_ms": 3.1,
        "ramp_penalty": 0.75,
        "od_scale_length_mm": _CAL_OD_SCALE_LENGTH_MM,
        "od_scale_floor": 1e-3,
        "loss_rate_hz": 0.0,
        "scale_od_with_atom_number": False,
        "reference_atom_number": 1.2e5,
        "ramp_penalty_ref_speed_mps": None,
    },
    "probe": {
        "peak_rabi_over_gamma": 0.108,
        "peak_power_nw": None,
        "center_us": 2.0,
        "fwhm_us": 0.4,
        "detuning_mhz": 0.0,
        "truncation_fwhms": 4.0,
    },
    "control": {
        "rabi_over_gamma": 1.4,
        "power_uw": None,
        "off_us": 2.1,
        "storage_time_us": 5.0,
        "edge_us": 0.05,
    },
    "trajectory": {
        "peak_detuning_khz": 1225.0,
        "ramp_ms": 0.1,
        "direction": 1,
        "segments": None,
    },
    "numerics": {
        "points_per_width": 20,
        "dt_per_fastest": 20,
        "window_pad_widths": 4.0,
        "retrieval_window_us": 5.0,
        "write_settle_us": 0.5,
        "read_lead_us": 0.5,
        "gap_min_us": 1.0,
        "safety_factor": 0.9,
    },
    "calibration": {
        "efficiency_scale": _CAL_EFFICIENCY_SCALE,
    },
    "metadata": {
        "bias_field_gauss": 3.57,
    },
}


def rabi_from_power(power: float, mode_field_diameter: float, gamma_rad_s: float,
                    wavelength: float, dipole_factor: float = 1.0) -> float:
    """Peak Rabi frequency (rad/s) of a Gaussian beam of ``power`` watts.

    Uses the two-level saturation intensity I_sat = pi h c gamma / (3
    lambda^3) and W = gamma sqrt(I / (2 I_sat)); ``dipole_factor`` absorbs
    the transition-dependent matrix element.  This is a convenience with a
    broad-brush dipole model, which is why a directly configured Rabi
    frequency always wins over a configured power.
    """
    if power < 0.0:
        raise ValueError("power must be non-negative")
    w0 = 0.5 * mode_field_diameter
    intensity = 2.0 * power / (math.pi * w0 * w0)
    i_sat = math.pi * H_PLANCK * C * gamma_rad_s / (3.0 * wavelength ** 3)
    return gamma_rad_s * math.sqrt(intensity / (2.0 * i_sat)) * dipole_factor


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def _merge(defaults: dict, user: dict, path: str = "") -> dict:
    out = {}
    for key, dval in defaults.items():
        if isinstance(dval, dict) and key != "metadata":
            sub = user.get(key, {})
            if sub is None:
                sub = {}
            if not isinstance(sub, dict):
                raise ConfigSchemaError(f"section '{path}{key}' must be a mapping")
            out[key] = _merge(dval, sub, path=f"{path}{key}.")
        else:
            out[key] = user.get(key, dval)
    unknown = set(user) - set(defaults)
    if unknown:
        names = ", ".join(sorted(f"{path}{k}" for k in unknown))
        raise ConfigSchemaError(f"unknown configuration keys: {names}")
    return out


def _require_number(section: str, key: str, value, positive=False,
                    nonnegative=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigSchemaError(f"{section}.{key} must be a number, got {value!r}")
    v = float(value)
    if positive and v <= 0.0:
        raise ConfigUnitError(f"{section}.{key} must be positive, got {v}")
    if nonnegative and v < 0.0:
        raise ConfigUnitError(f"{section}.{key} must be non-negative, got {v}")
    return v


def _build_species(sec: dict) -> AtomSpecies:
    name = sec["name"]
    if name == "species":  # guard against a stray mapping
        raise ConfigSchemaError("species.name missing")
    base = SPECIES_TABLE.get(name)
    if base is None and any(sec[k] is None for k in
                            ("mass_kg", "linewidth_mhz", "wavelength_nm",
                             "hyperfine_splitting_ghz")):
        known = ", ".join(sorted(SPECIES_TABLE))
        raise ConfigSchemaError(
            f"unknown species '{name}' (known: {known}); either pick one or "
            "give mass_kg, linewidth_mhz, wavelength_nm and hyperfine_splitting_ghz")
    merged = dict(base or {})
    for key in ("mass_kg", "linewidth_mhz", "wavelength_nm", "hyperfine_splitting_ghz"):
        if sec[key] is not None:
            merged[key] = _require_number("species", key, sec[key], positive=True)
    return AtomSpecies(
        name=name,
        mass=merged["mass_kg"],
        gamma=linewidth_hz_to_rad_us(merged["linewidth_mhz"] * 1e6),
        lambda_probe=merged["wavelength_nm"] * 1e-6,
        delta_hf=merged["hyperfine_splitting_ghz"] * 1e3,
    )


def _wrap_unit_errors(section: str, builder):
    try:
        return builder()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigUnitError(f"{section}: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a (possibly partial) mapping."""
    if not isinstance(data, dict):
        raise ConfigSchemaError("configuration root must be a mapping")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigSchemaError(
            f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION}")
    raw = dict(data)
    if isinstance(raw.get("species"), str):
        raw["species"] = {"name": raw["species"]}
    cfg = _merge(DEFAULTS, raw)

    species = _wrap_unit_errors("species", lambda: _build_species(cfg["species"]))

    lat = cfg["lattice"]
    lattice = _wrap_unit_errors("lattice", lambda: LatticeConfig(
        lambda_lattice=_require_number("lattice", "wavelength_nm", lat["wavelength_nm"], positive=True) * 1e-6,
        trap_depth=kelvin_to_joule(_require_number("lattice", "trap_depth_uk", lat["trap_depth_uk"], nonnegative=True) * 1e-6),
        omega_z=TWO_PI * _require_number("lattice", "axial_frequency_khz", lat["axial_frequency_khz"], nonnegative=True) * 1e-3,
        omega_r=TWO_PI * _require_number("lattice", "radial_frequency_khz", lat["radial_frequency_khz"], nonnegative=True) * 1e-3,
    ))

    cl = cfg["cloud"]
    cloud = _wrap_unit_errors("cloud", lambda: CloudState(
        atom_number=_require_number("cloud", "atom_number", cl["atom_number"], nonnegative=True),
        center=_require_number("cloud", "center_mm", cl["center_mm"]),
        width_1e=_require_number("cloud", "width_1e_mm", cl["width_1e_mm"], positive=True),
        temperature_radial=_require_number("cloud", "radial_temperature_uk", cl["radial_temperature_uk"], nonnegative=True) * 1e-6,
    ))

    fb = cfg["fiber"]
    fiber = _wrap_unit_errors("fiber", lambda: FiberGeometry(
        tip_position=_require_number("fiber", "tip_position_mm", fb["tip_position_mm"]),
        length=_require_number("fiber", "length_mm", fb["length_mm"], positive=True),
        mode_field_diameter=_require_number("fiber", "mode_field_diameter_um", fb["mode_field_diameter_um"], positive=True) * 1e-3,
        mot_distance=_require_number("fiber", "mot_distance_mm", fb["mot_distance_mm"], positive=True),
    ))

    md = cfg["medium"]
    # Reference belt speed for the ramp penalty: the 1225 kHz standard plan
    # at this lattice wavelength, unless set explicitly.
    if md["ramp_penalty_ref_speed_mps"] is None:
        ref_speed = speed_from_detuning(1.225e6, lattice.lambda_lattice_m)
    else:
        ref_speed = _require_number("medium", "ramp_penalty_ref_speed_mps",
                                    md["ramp_penalty_ref_speed_mps"], positive=True)
    medium = _wrap_unit_errors("medium", lambda: MediumModel(
        od_fiber=_require_number("medium", "od_fiber", md["od_fiber"], nonnegative=True),
        tau_storage=_require_number("medium", "tau_storage_ms", md["tau_storage_ms"], positive=True) * 1e3,
        ramp_penalty_eps=_require_number("medium", "ramp_penalty", md["ramp_penalty"]),
        od_scale_length=_require_number("medium", "od_scale_length_mm", md["od_scale_length_mm"], positive=True),
        od_scale_floor=_require_number("medium", "od_scale_floor", md["od_scale_floor"]),
        loss_rate=_require_number("medium", "loss_rate_hz", md["loss_rate_hz"], nonnegative=True) * 1e-6,
        scale_od_with_atom_number=bool(md["scale_od_with_atom_number"]),
        reference_atom_number=_require_number("medium", "reference_atom_number", md["reference_atom_number"], positive=True),
        ramp_penalty_ref_speed=ref_speed,
    ))

    pr = cfg["probe"]
    if pr["peak_rabi_over_gamma"] is not None:
        peak_rabi = _require_number("probe", "peak_rabi_over_gamma", pr["peak_rabi_over_gamma"], nonnegative=True) * species.gamma
    elif pr["peak_power_nw"] is not None:
        peak_rabi = rabi_from_power(
            _require_number("probe", "peak_power_nw", pr["peak_power_nw"], nonnegative=True) * 1e-9,
            fiber.mode_field_diameter * 1e-3, species.gamma_rad_s,
            species.lambda_probe_m) * 1e-6
    else:
        raise ConfigSchemaError("probe needs peak_rabi_over_gamma or peak_power_nw")
    probe = _wrap_unit_errors("probe", lambda: ProbePulse(
        peak_rabi=peak_rabi,
        center=_require_number("probe", "center_us", pr["center_us"]),
        fwhm=_require_number("probe", "fwhm_us", pr["fwhm_us"], positive=True),
        detuning=TWO_PI * _require_number("probe", "detuning_mhz", pr["detuning_mhz"]),
        truncation_fwhms=_require_number("probe", "truncation_fwhms", pr["truncation_fwhms"], positive=True),
    ))

    ct = cfg["control"]
    if ct["rabi_over_gamma"] is not None:
        on_level = _require_number("control", "rabi_over_gamma", ct["rabi_over_gamma"], nonnegative=True) * species.gamma
    elif ct["power_uw"] is not None:
        on_level = rabi_from_power(
            _require_number("control", "power_uw", ct["power_uw"], nonnegative=True) * 1e-6,
            fiber.mode_field_diameter * 1e-3, species.gamma_rad_s,
            species.lambda_probe_m) * 1e-6
    else:
        raise ConfigSchemaError("control needs rabi_over_gamma or power_uw")
    control = _wrap_unit_errors("control", lambda: ControlSettings(
        on_level=on_level,
        t_off=_require_number("control", "off_us", ct["off_us"]),
        edge=_require_number("control", "edge_us", ct["edge_us"], nonnegative=True),
        default_storage_time=_require_number("control", "storage_time_us", ct["storage_time_us"]),
    ))

    tj = cfg["trajectory"]
    direction = tj["direction"]
    if direction not in (-1, 1):
        raise ConfigUnitError("trajectory.direction must be +1 or -1")
    if tj["segments"] is not None:
        segs = []
        for i, seg in enumerate(tj["segments"]):
            if not isinstance(seg, (list, tuple)) or len(seg) != 3:
                raise ConfigSchemaError(
                    f"trajectory.segments[{i}] must be [duration_ms, start_khz, end_khz]")
            dur = _require_number("trajectory", f"segments[{i}].duration_ms", seg[0], nonnegative=True)
            segs.append((dur * 1e-3, float(seg[1]) * 1e3, float(seg[2]) * 1e3))
        spec = _wrap_unit_errors("trajectory", lambda: TrajectorySpec(
            segments=tuple(segs), direction=direction))
    else:
        peak = _require_number("trajectory", "peak_detuning_khz", tj["peak_detuning_khz"], nonnegative=True) * 1e3
        ramp = _require_number("trajectory", "ramp_ms", tj["ramp_ms"], nonnegative=True) * 1e-3
        spec = _wrap_unit_errors("trajectory", lambda: TrajectorySpec.trapezoid(
            peak_detuning=peak, t_up=ramp, t_hold=0.0, t_down=ramp,
            direction=direction))

    nm = cfg["numerics"]
    numerics = _wrap_unit_errors("numerics", lambda: NumericsConfig(
        points_per_width=int(_require_number("numerics", "points_per_width", nm["points_per_width"], positive=True)),
        dt_per_fastest=int(_require_number("numerics", "dt_per_fastest", nm["dt_per_fastest"], positive=True)),
        window_pad_widths=_require_number("numerics", "window_pad_widths", nm["window_pad_widths"], positive=True),
        retrieval_window=_require_number("numerics", "retrieval_window_us", nm["retrieval_window_us"], positive=True),
        write_settle=_require_number("numerics", "write_settle_us", nm["write_settle_us"], nonnegative=True),
        read_lead=_require_number("numerics", "read_lead_us", nm["read_lead_us"], nonnegative=True),
        gap_min=_require_number("numerics", "gap_min_us", nm["gap_min_us"], nonnegative=True),
        safety_factor=_require_number("numerics", "safety_factor", nm["safety_factor"], positive=True),
    ))

    calibration = _wrap_unit_errors("calibration", lambda: CalibrationConstants(
        efficiency_scale=_require_number("calibration", "efficiency_scale", cfg["calibration"]["efficiency_scale"], positive=True),
    ))

    return ExperimentConfig(
        species=species, lattice=lattice, cloud=cloud, fiber=fiber,
        medium=medium, probe=probe, control=control, trajectory_spec=spec,
        numerics=numerics, calibration=calibration,
        metadata=dict(cfg["metadata"] or {}),
    )


def load_config(path) -> ExperimentConfig:
    """Read a YAML or JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"{path}: invalid JSON: {exc}") from exc
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigParseError(f"{path}: invalid YAML: {exc}") from exc
    if data is None:
        data = {}
    return config_from_dict(data)


def paper_config(calibrated: bool = True) -> ExperimentConfig:
    """The built-in default configuration.

    ``calibrated=False`` resets the efficiency scale to 1.0 so protocol
    efficiencies come out in raw model units.
    """
    cfg = config_from_dict({})
    if not calibrated:
        cfg = with_field(cfg, "calibration.efficiency_scale", 1.0)
    return cfg


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def serialize_config(cfg: ExperimentConfig) -> dict:
    """Render a config back into the file schema (lab units)."""
    sp = cfg.species
    return {
        "schema_version": cfg.schema_version,
        "species": {
            "name": sp.name,
            "mass_kg": sp.mass,
            "linewidth_mhz": sp.gamma / TWO_PI,
            "wavelength_nm": sp.lambda_probe * 1e6,
            "hyperfine_splitting_ghz": sp.delta_hf * 1e-3,
        },
        "lattice": {
            "wavelength_nm": cfg.lattice.lambda_lattice * 1e6,
            "trap_depth_uk": joule_to_kelvin(cfg.lattice.trap_depth) * 1e6,
            "axial_frequency_khz": cfg.lattice.omega_z / TWO_PI * 1e3,
            "radial_frequency_khz": cfg.lattice.omega_r / TWO_PI * 1e3,
        },
        "cloud": {
            "atom_number": cfg.cloud.atom_number,
            "center_mm": cfg.cloud.center,
            "width_1e_mm": cfg.cloud.width_1e,
            "radial_temperature_uk": cfg.cloud.temperature_radial * 1e6,
        },
        "fiber": {
            "tip_position_mm": cfg.fiber.tip_position,
            "length_mm": cfg.fiber.length,
            "mode_field_diameter_um": cfg.fiber.mode_field_diameter * 1e3,
            "mot_distance_mm": cfg.fiber.mot_distance,
        },
        "medium": {
            "od_fiber": cfg.medium.od_fiber,
            "tau_storage_ms": cfg.medium.tau_storage * 1e-3,
            "ramp_penalty": cfg.medium.ramp_penalty_eps,
            "od_scale_length_mm": cfg.medium.od_scale_length,
            "od_scale_floor": cfg.medium.od_scale_floor,
            "loss_rate_hz": cfg.medium.loss_rate * 1e6,
            "scale_od_with_atom_number": cfg.medium.scale_od_with_atom_number,
            "reference_atom_number": cfg.medium.reference_atom_number,
            "ramp_penalty_ref_speed_mps": cfg.medium.ramp_penalty_ref_speed,
        },
        "probe": {
            "peak_rabi_over_gamma": cfg.probe.peak_rabi / sp.gamma,
            "peak_power_nw": None,
            "center_us": cfg.probe.center,
            "fwhm_us": cfg.probe.fwhm,
            "detuning_mhz": cfg.probe.detuning / TWO_PI,
            "truncation_fwhms": cfg.probe.truncation_fwhms,
        },
        "control": {
            "rabi_over_gamma": cfg.control.on_level / sp.gamma,
            "power_uw": None,
            "off_us": cfg.control.t_off,
            "storage_time_us": cfg.control.default_storage_time,
            "edge_us": cfg.control.edge,
        },
        "trajectory": {
            "peak_detuning_khz": cfg.trajectory_spec.peak_detuning * 1e-3,
            "ramp_ms": cfg.trajectory_spec.ramp_time * 1e3,
            "direction": cfg.trajectory_spec.direction,
            "segments": [[d * 1e3, d0 * 1e-3, d1 * 1e-3]
                         for d, d0, d1 in cfg.trajectory_spec.segments],
        },
        "numerics": {
            "points_per_width": cfg.numerics.points_per_width,
            "dt_per_fastest": cfg.numerics.dt_per_fastest,
            "window_pad_widths": cfg.numerics.window_pad_widths,
            "retrieval_window_us": cfg.numerics.retrieval_window,
            "write_settle_us": cfg.numerics.write_settle,
            "read_lead_us": cfg.numerics.read_lead,
            "gap_min_us": cfg.numerics.gap_min,
            "safety_factor": cfg.numerics.safety_factor,
        },
        "calibration": {
            "efficiency_scale": cfg.calibration.efficiency_scale,
        },
        "metadata": dict(cfg.metadata),
    }


def save_config(cfg: ExperimentConfig, path) -> None:
    """Write a config to YAML (or JSON if the suffix says so)."""
    path = Path(path)
    data = serialize_config(cfg)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        path.write_text(yaml.safe_dump(data, sort_keys=False))


def with_field(cfg: ExperimentConfig, dotted: str, value) -> ExperimentConfig:
    """Return a copy of ``cfg`` with one dotted internal field replaced.

    Paths address internal-unit dataclass fields, e.g.
    ``medium.tau_storage`` or ``cloud.center``.  Unknown paths raise
    ``KeyError``.
    """
    parts = dotted.split(".")
    if len(parts) == 1:
        if not hasattr(cfg, parts[0]):
            raise KeyError(f"unknown config field '{dotted}'")
        return dataclasses.replace(cfg, **{parts[0]: value})
    if len(parts) != 2:
        raise KeyError(f"config paths have at most two components, got '{dotted}'")
    section_name, field_name = parts
    section = getattr(cfg, section_name, None)
    if section is None or not dataclasses.is_dataclass(section):
        raise KeyError(f"unknown config section '{section_name}'")
    if field_name not in {f.name for f in dataclasses.fields(section)}:
        raise KeyError(f"unknown field '{field_name}' in config section '{section_name}'")
    new_section = dataclasses.replace(section, **{field_name: value})
    return dataclasses.replace(cfg, **{section_name: new_section})


# ---------------------------------------------------------------------------
# semantic validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    severity: str = "error"   # "error" | "warning"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def errors(self):
        return tuple(v for v in self.violations if v.severity == "error")

    @property
    def warnings(self):
        return tuple(v for v in self.violations if v.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok


def validate_config(cfg: ExperimentConfig) -> ValidationReport:
    """Cross-field semantic checks; returns a report, never raises."""
    out = []

    def err(path, msg):
        out.append(Violation(path=path, message=msg, severity="error"))

    def warn(path, msg):
        out.append(Violation(path=path, message=msg, severity="warning"))

    # re-run every section constructor so hand-mutated configs are caught
    for name in ("species", "lattice", "cloud", "fiber", "medium", "probe",
                 "control", "trajectory_spec", "numerics", "calibration"):
        section = getattr(cfg, name)
        try:
            dataclasses.replace(section)
        except ValueError as exc:
            err(name, str(exc))

    # pulse timing
    if cfg.probe.onset < 0.0:
        err("probe.center_us", "probe pulse begins before t = 0; move its centre later")
    if cfg.control.t_off < cfg.probe.center:
        warn("control.off_us", "control switches off before the probe peak arrives; "
                               "most of the pulse will be reflected or lost")
    if cfg.control.t_off > cfg.probe.center + 3.0 * cfg.probe.fwhm:
        warn("control.off_us", "control switches off long after the probe has left; "
                               "little light will be captured")

    # weak probe
    limit = min(cfg.species.gamma, cfg.control.on_level) if cfg.control.on_level > 0 \
        else cfg.species.gamma
    if cfg.probe.peak_rabi > limit / 3.0:
        warn("probe.peak_rabi_over_gamma",
             "weak-probe assumption strained: peak probe Rabi frequency is not "
             "small against the control and the linewidth")

    # trajectory feasibility at the configured safety margin
    try:
        traj = trajectory_from_spec(cfg.trajectory_spec, cfg.lattice.lambda_lattice_m)
        report = check_feasible(traj, cfg.lattice.a_max(cfg.species.mass),
                                cfg.numerics.safety_factor)
        if not report.ok:
            for v in report.violations:
                err("trajectory", f"acceleration infeasible: {v}")
    except ValueError as exc:
        err("trajectory", str(exc))

    # geometry sanity
    if cfg.cloud.center < cfg.fiber.tip_position - cfg.fiber.mot_distance:
        err("cloud.center_mm", "cloud starts behind the MOT position")
    if cfg.cloud.center > cfg.fiber.far_end:
        err("cloud.center_mm", "cloud starts beyond the far end of the fiber")

    return ValidationReport(violations=tuple(out))
