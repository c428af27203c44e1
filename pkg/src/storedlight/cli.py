"""Command-line front end: simulate | sweep | plan | fit | validate.

Every subcommand reads an optional YAML/JSON config (defaults apply without
one), accepts dotted ``--set section.key=value`` overrides in the file
schema's lab units, and writes its outputs plus a provenance manifest into
--out-dir (or $OUTPUT_DIR, or ./out).  Data files are deterministic:
identical config and command line give byte-identical CSV/JSON data; only
the manifest carries a timestamp.

Exit codes: 0 success, 1 configuration or validation failure, 2 solver or
fit failure.  Failures also emit a machine-readable JSON object on stdout.
"""

import argparse
import json
import math
import re
import sys

import numpy as np
import yaml

from . import __version__
from .config import (ConfigError, config_from_dict, load_config, paper_config,
                     save_config, validate_config)
from .conveyor import (check_feasible, detuning_from_speed, plan_distance,
                       plan_trapezoid, speed_from_detuning, trajectory_from_spec)
from .dynamics import ResolutionError, SolverError
from .outputs import (RunManifest, config_hash, read_points_csv,
                      resolve_out_dir, write_csv, write_events, write_json,
                      write_manifest, write_snapshots, write_sweep_table,
                      write_time_series)
from .protocols import (PROTOCOLS, InfeasibleTrajectoryError, ProtocolError,
                        add_efficiency_noise, fit_exponential, sweep)

_DURATION_RE = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([a-zA-Z]*)\s*$")

_TIME_SCALE_US = {"": 1.0, "ns": 1e-3, "us": 1.0, "ms": 1e3, "s": 1e6}
_LENGTH_SCALE_MM = {"": 1.0, "nm": 1e-6, "um": 1e-3, "mm": 1.0, "cm": 10.0, "m": 1e3}
_FREQ_SCALE_HZ = {"": 1.0, "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


def _parse_scaled(text: str, scales: dict, what: str) -> float:
    m = _DURATION_RE.match(str(text))
    if not m:
        raise ValueError(f"cannot parse {what} {text!r}")
    value, unit = m.groups()
    key = unit if unit in scales else unit.lower()
    if key not in scales:
        raise ValueError(f"unknown {what} unit {unit!r} in {text!r}")
    return float(value) * scales[key]


def parse_duration_us(text: str) -> float:
    """'5us', '3ms', '0.1s' or a bare number (us) -> microseconds."""
    return _parse_scaled(text, _TIME_SCALE_US, "duration")


def parse_length_mm(text: str) -> float:
    """'1.5mm', '500um' or a bare number (mm) -> millimetres."""
    return _parse_scaled(text, _LENGTH_SCALE_MM, "length")


def parse_frequency_hz(text: str) -> float:
    """'1200kHz', '1.2MHz' or a bare number (Hz) -> hertz."""
    return _parse_scaled(text, _FREQ_SCALE_HZ, "frequency")


def _fail(code: int, exc_type: str, message: str) -> int:
    print(json.dumps({"error": {"type": exc_type, "message": message,
                                "exit_code": code}}, sort_keys=True))
    print(f"error: {message}", file=sys.stderr)
    return code


def _apply_sets(data: dict, assignments) -> dict:
    for item in assignments or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key.path=value, got {item!r}")
        path, raw_value = item.split("=", 1)
        keys = [k for k in path.strip().split(".") if k]
        if not keys:
            raise ConfigError(f"--set has an empty key path in {item!r}")
        value = yaml.safe_load(raw_value)
        node = data
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set path {path!r} crosses a non-section key")
        node[keys[-1]] = value
    return data


def _build_config(args):
    if getattr(args, "config", None):
        if args.set:
            data = _load_raw(args.config)
            return config_from_dict(_apply_sets(data, args.set))
        return load_config(args.config)
    if getattr(args, "set", None):
        return config_from_dict(_apply_sets({}, args.set))
    return paper_config()


def _load_raw(path) -> dict:
    text = open(path).read()
    data = yaml.safe_load(text)
    return data if data is not None else {}


def _validated_config(args):
    """Build + semantically validate; raises ConfigError on hard violations."""
    cfg = _build_config(args)
    report = validate_config(cfg)
    for w in report.warnings:
        print(f"warning: {w.path}: {w.message}", file=sys.stderr)
    if not report.ok:
        msgs = "; ".join(f"{v.path}: {v.message}" for v in report.errors)
        raise ConfigError(msgs)
    return cfg


def _start_manifest(args, cfg=None) -> RunManifest:
    return RunManifest(command=list(sys.argv[1:] or []),
                       config_sha256=config_hash(cfg) if cfg is not None else "")


def _finish(manifest: RunManifest, out_dir, written) -> None:
    manifest.outputs = sorted(str(p.name if hasattr(p, "name") else p) for p in written)
    write_manifest(manifest, out_dir)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _validated_config(args)
    if args.protocol not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {args.protocol!r}; "
                          f"known: {', '.join(sorted(PROTOCOLS))}")
    kwargs = _protocol_kwargs(args)
    _, runner = PROTOCOLS[args.protocol]
    result = runner(cfg, **kwargs)

    out_dir = resolve_out_dir(args.out_dir)
    manifest = _start_manifest(args, cfg)
    written = []
    series_path = out_dir / "series.csv"
    write_time_series(result.series, series_path)
    written.append(series_path)
    ref_path = out_dir / "reference.csv"
    write_time_series(result.reference_series, ref_path)
    written.append(ref_path)
    events_path = out_dir / "events.json"
    write_events(result.series, events_path)
    written.append(events_path)
    cfg_path = out_dir / "config.yaml"
    save_config(cfg, cfg_path)
    written.append(cfg_path)
    written += write_snapshots(result.series, out_dir)

    summary = {
        "protocol": args.protocol,
        "params": {k: v for k, v in result.metadata.items() if k != "events"},
        "eta": result.efficiency,
        "fit": None,
    }
    summary_path = out_dir / "summary.json"
    write_json(summary_path, summary)
    written.append(summary_path)
    _finish(manifest, out_dir, written)
    print(json.dumps({"eta": result.efficiency,
                      "out_dir": str(out_dir)}, sort_keys=True))
    return 0


def _protocol_kwargs(args) -> dict:
    kwargs = {}
    if args.protocol in ("store_retrieve", "comoving"):
        if args.storage_time is not None:
            kwargs["storage_time"] = parse_duration_us(args.storage_time)
    if args.protocol == "comoving":
        if args.speed is not None:
            kwargs["speed"] = args.speed
        if args.tau is not None:
            kwargs["tau_storage"] = parse_duration_us(args.tau)
    if args.protocol == "transport_inside":
        if args.t_transport is None:
            raise ConfigError("transport_inside needs --t-transport")
        kwargs["t_transport"] = parse_duration_us(args.t_transport)
    if args.protocol in ("transport_inward", "transport_outward"):
        if args.distance is None:
            raise ConfigError(f"{args.protocol} needs --distance")
        kwargs["distance"] = parse_length_mm(args.distance)
    return kwargs


def cmd_sweep(args) -> int:
    cfg = _validated_config(args)
    if args.protocol not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {args.protocol!r}; "
                          f"known: {', '.join(sorted(PROTOCOLS))}")
    values, abscissa_name = _parse_sweep_values(args)
    extra = {}
    if args.protocol == "comoving":
        if args.speed is not None:
            extra["speed"] = args.speed
        if args.tau is not None:
            extra["tau_storage"] = parse_duration_us(args.tau)
    results = []
    points = sweep(cfg, args.param, values, protocol=args.protocol,
                   results=results, **extra)
    if args.noise:
        if args.seed is None:
            raise ConfigError("--noise needs an explicit --seed")
        points = add_efficiency_noise(points, args.noise,
                                      np.random.default_rng(args.seed))

    out_dir = resolve_out_dir(args.out_dir)
    manifest = _start_manifest(args, cfg)
    extra_cols = {
        "elapsed_us": [r.metadata.get("storage_time_us", 0.0) for r in results],
        "displacement_mm": [r.metadata.get("displacement_mm", 0.0) for r in results],
    }
    table_path = out_dir / "sweep.csv"
    write_sweep_table(points, table_path, abscissa_name=abscissa_name,
                      extra_columns=extra_cols)
    summary = {
        "protocol": args.protocol,
        "params": {"param": args.param, "values": list(values),
                   "noise": args.noise, "seed": args.seed, **extra},
        "eta": [p.efficiency for p in points],
        "fit": None,
    }
    summary_path = out_dir / "summary.json"
    write_json(summary_path, summary)
    _finish(manifest, out_dir, [table_path, summary_path])
    print(json.dumps({"n": len(points), "out_dir": str(out_dir)}, sort_keys=True))
    return 0


def _parse_sweep_values(args):
    raw = [v for v in str(args.values).split(",") if v.strip()]
    if args.param in ("storage_time", "t_transport"):
        return [parse_duration_us(v) for v in raw], "t_us"
    if args.param == "distance":
        return [parse_length_mm(v) for v in raw], "distance_mm"
    if args.param == "speed":
        return [float(v) for v in raw], "speed_mps"
    # dotted config path: plain numbers in the file schema's units
    values = [yaml.safe_load(v) for v in raw]
    return values, args.param.replace(".", "_")


def cmd_plan(args) -> int:
    cfg = _validated_config(args)
    lam = cfg.lattice.lambda_lattice_m
    peak_hz = (parse_frequency_hz(args.peak_detuning)
               if args.peak_detuning is not None
               else cfg.trajectory_spec.peak_detuning)
    v_max = cfg.trajectory_spec.direction * speed_from_detuning(peak_hz, lam)
    if args.distance is not None:
        ramp_s = (parse_duration_us(args.ramp) * 1e-6 if args.ramp is not None
                  else cfg.trajectory_spec.ramp_time)
        d_m = parse_length_mm(args.distance) * 1e-3
        if d_m != 0.0 and v_max == 0.0:
            raise ConfigError("plan needs a nonzero peak detuning")
        if d_m != 0.0:
            v_max = math.copysign(abs(v_max), d_m)
        traj = plan_distance(d_m, v_max, ramp_s)
    elif args.t_up is not None or args.t_hold is not None or args.t_down is not None:
        t_up = parse_duration_us(args.t_up or "0") * 1e-6
        t_hold = parse_duration_us(args.t_hold or "0") * 1e-6
        t_down = parse_duration_us(args.t_down or "0") * 1e-6
        traj = plan_trapezoid(v_max, t_up, t_hold, t_down)
    else:
        traj = trajectory_from_spec(cfg.trajectory_spec, lam)

    report = check_feasible(traj, cfg.lattice.a_max(cfg.species.mass),
                            cfg.numerics.safety_factor)
    if not report.ok:
        raise ConfigError("acceleration infeasible: " + "; ".join(report.violations))

    out_dir = resolve_out_dir(args.out_dir)
    manifest = _start_manifest(args, cfg)
    rows = []
    if traj.phases:
        dt = parse_duration_us(args.sample_dt) * 1e-6
        n = max(1, int(round(traj.t_total / dt)))
        times = [i * traj.t_total / n for i in range(n + 1)]
        for t in times:
            x, v, a = traj.sample(t)
            rows.append([t, detuning_from_speed(v, lam), x * 1e3, v, a])
    table_path = out_dir / "ramp.csv"
    write_csv(table_path, ["t", "detuning_Hz", "x_mm", "v_mps", "a_mps2"], rows)
    summary = {
        "displacement_mm": traj.displacement * 1e3,
        "t_total_s": traj.t_total,
        "max_abs_acceleration_mps2": traj.max_abs_acceleration(),
        "acceleration_limit_mps2": report.limit,
        "feasible": report.ok,
        "rows": len(rows),
    }
    summary_path = out_dir / "summary.json"
    write_json(summary_path, summary)
    _finish(manifest, out_dir, [table_path, summary_path])
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_fit(args) -> int:
    try:
        points = read_points_csv(args.input)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from exc
    fit = fit_exponential(points)
    out_dir = resolve_out_dir(args.out_dir)
    manifest = _start_manifest(args)
    payload = {
        "amplitude": fit.amplitude,
        "amplitude_err": fit.amplitude_err,
        "tau_us": fit.tau,
        "tau_ms": fit.tau * 1e-3,
        "tau_err_us": fit.tau_err,
        "residual_norm": fit.residual_norm,
        "n_points": len(points),
        "input": str(args.input),
    }
    fit_path = out_dir / "fit.json"
    write_json(fit_path, payload)
    _finish(manifest, out_dir, [fit_path])
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_validate(args) -> int:
    cfg = _build_config(args)
    report = validate_config(cfg)
    payload = {
        "ok": report.ok,
        "errors": [{"path": v.path, "message": v.message} for v in report.errors],
        "warnings": [{"path": v.path, "message": v.message} for v in report.warnings],
    }
    print(json.dumps(payload, sort_keys=True))
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="YAML or JSON configuration file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="dotted-path override in the file schema, repeatable")
    p.add_argument("--out-dir", help="output directory (default $OUTPUT_DIR or ./out)")
    p.add_argument("--seed", type=int, help="RNG seed; randomness is used only "
                                            "when this is given")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storedlight",
        description="Simulate EIT light storage and conveyor transport of the "
                    "stored spin wave in a fiber-coupled cold-atom ensemble.")
    parser.add_argument("--version", action="version",
                        version=f"storedlight {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one protocol and export its time series")
    _add_common(p_sim)
    p_sim.add_argument("--protocol", default="store_retrieve",
                       choices=sorted(PROTOCOLS))
    p_sim.add_argument("--storage-time", "--T", dest="storage_time",
                       help="storage time, e.g. 5us or 3ms")
    p_sim.add_argument("--t-transport", help="transport duration, e.g. 3ms")
    p_sim.add_argument("--distance", help="transport distance, e.g. 1.5mm")
    p_sim.add_argument("--speed", type=float, help="co-moving speed in m/s")
    p_sim.add_argument("--tau", help="lifetime override for comoving, e.g. 2.6ms")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a protocol over a list of values")
    _add_common(p_sweep)
    p_sweep.add_argument("--protocol", default="store_retrieve",
                         choices=sorted(PROTOCOLS))
    p_sweep.add_argument("--param", default="storage_time",
                         help="protocol argument or dotted config path")
    p_sweep.add_argument("--values", required=True,
                         help="comma list, units allowed: 5us,0.1ms,0.4ms,1ms")
    p_sweep.add_argument("--speed", type=float, help="co-moving speed in m/s")
    p_sweep.add_argument("--tau", help="lifetime override for comoving")
    p_sweep.add_argument("--noise", type=float,
                         help="relative Gaussian noise for fitter validation")
    p_sweep.set_defaults(func=cmd_sweep)

    p_plan = sub.add_parser("plan", help="emit a conveyor ramp table")
    _add_common(p_plan)
    p_plan.add_argument("--peak-detuning", help="cruise detuning, e.g. 1200kHz")
    p_plan.add_argument("--t-up", help="ramp-up duration, e.g. 1ms")
    p_plan.add_argument("--t-hold", help="hold duration, e.g. 14ms")
    p_plan.add_argument("--t-down", help="ramp-down duration, e.g. 1ms")
    p_plan.add_argument("--distance", help="plan by distance instead, e.g. 1.44mm")
    p_plan.add_argument("--ramp", help="ramp duration for --distance plans")
    p_plan.add_argument("--sample-dt", default="50us",
                        help="table sampling step (default 50us)")
    p_plan.set_defaults(func=cmd_plan)

    p_fit = sub.add_parser("fit", help="fit A*exp(-t/tau) to a points CSV")
    _add_common(p_fit)
    p_fit.add_argument("input", help="CSV with (t, eta[, sigma]) columns")
    p_fit.set_defaults(func=cmd_fit)

    p_val = sub.add_parser("validate", help="check a configuration and report")
    _add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # remap argparse's usage-error exit so 2 stays reserved for solver failures
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ConfigError, InfeasibleTrajectoryError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except (ResolutionError, ValueError, KeyError, OSError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except (SolverError, ProtocolError) as exc:
        return _fail(2, type(exc).__name__, str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
