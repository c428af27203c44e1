"""Deterministic file outputs: CSV data products, JSON summaries, manifests.

All CSV files use a dot decimal separator and carry units in the column
names.  Floats are written with repr-level precision so identical runs
produce byte-identical data files; the manifest is the one output holding
a timestamp, since its job is provenance rather than data.
"""

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, serialize_config
from .dynamics import TimeSeries
from .protocols import EfficiencyPoint

#: default location when neither --out-dir nor the environment specify one
DEFAULT_OUT_DIR = "out"


def resolve_out_dir(cli_value=None) -> Path:
    """Output directory precedence: CLI flag, then $OUTPUT_DIR, then ./out."""
    if cli_value:
        return Path(cli_value)
    env = os.environ.get("OUTPUT_DIR")
    if env:
        return Path(env)
    return Path(DEFAULT_OUT_DIR)


def _fmt(x) -> str:
    """Full-precision, locale-independent float formatting."""
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def write_time_series(series: TimeSeries, path) -> None:
    """Output-port record as CSV (t_us, P_out)."""
    write_csv(path, ["t_us", "P_out"], zip(series.t, series.power))


def write_events(series: TimeSeries, path) -> None:
    """Event markers as a sidecar JSON file."""
    write_json(path, {"events": series.events})


def write_snapshots(series: TimeSeries, directory) -> list:
    """One CSV per captured field snapshot; returns the written paths."""
    directory = Path(directory)
    paths = []
    for i, snap in enumerate(series.snapshots):
        path = directory / f"snapshot_{i:03d}.csv"
        rows = zip(snap.z, snap.e.real, snap.e.imag, snap.p.real, snap.p.imag,
                   snap.s.real, snap.s.imag)
        write_csv(path, ["z_mm", "E_re", "E_im", "P_re", "P_im", "S_re", "S_im"],
                  rows)
        paths.append(path)
    return paths


def write_sweep_table(points, path, abscissa_name: str = "t_us",
                      extra_columns=None) -> None:
    """Aggregate sweep CSV: abscissa, eta, sigma (+ optional extra columns).

    ``extra_columns`` is a mapping name -> sequence aligned with points.
    """
    header = [abscissa_name, "eta", "sigma"]
    extras = list((extra_columns or {}).items())
    header += [name for name, _ in extras]
    rows = []
    for i, p in enumerate(points):
        row = [p.abscissa, p.efficiency, p.sigma]
        row += [seq[i] for _, seq in extras]
        rows.append(row)
    write_csv(path, header, rows)


def read_points_csv(path) -> list:
    """Read (t, eta[, sigma]) rows for fitting.

    The abscissa is the first column; ``eta`` is matched by name, as is an
    optional ``sigma``.  Extra columns are ignored.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        names = [h.strip() for h in header]
        eta_candidates = [i for i, n in enumerate(names)
                          if n == "eta" or n.startswith("eta_")]
        if not eta_candidates:
            raise ValueError(f"{path}: no 'eta' column in header {names}")
        i_eta = eta_candidates[0]
        i_sig = names.index("sigma") if "sigma" in names else None
        points = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                t = float(row[0])
                eta = float(row[i_eta])
                sig = float(row[i_sig]) if i_sig is not None else 0.0
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row}") from exc
            points.append(EfficiencyPoint(abscissa=t, efficiency=eta, sigma=sig))
    return points


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical serialized config; stable across processes."""
    data = json.dumps(serialize_config(cfg), sort_keys=True)
    return hashlib.sha256(data.encode()).hexdigest()


@dataclass
class RunManifest:
    """Provenance record written next to every command's outputs."""

    command: list
    config_sha256: str
    tool_version: str = __version__
    created_utc: str = ""
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        if not self.created_utc:
            self.created_utc = datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    path = Path(out_dir) / "manifest.json"
    write_json(path, asdict(manifest))
    return path
