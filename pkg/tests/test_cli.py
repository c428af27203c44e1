"""Command-line front end: subcommands, exit codes, artifact files."""
import json

import numpy as np
import pytest

from storedlight.cli import main, parse_duration_us, parse_frequency_hz, \
    parse_length_mm
from storedlight.outputs import read_points_csv, write_sweep_table
from storedlight.protocols import EfficiencyPoint


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    payload = json.loads(out.strip().split("\n")[-1]) if out.strip() else {}
    return code, payload


# ---------------------------------------------------------------------------
# argument parsing helpers


def test_duration_units():
    assert parse_duration_us("5us") == pytest.approx(5.0)
    assert parse_duration_us("3ms") == pytest.approx(3000.0)
    assert parse_duration_us("1s") == pytest.approx(1e6)
    assert parse_duration_us("12.5") == pytest.approx(12.5)


def test_length_units():
    assert parse_length_mm("1.5mm") == pytest.approx(1.5)
    assert parse_length_mm("500um") == pytest.approx(0.5)
    assert parse_length_mm("0.8") == pytest.approx(0.8)


def test_frequency_units():
    assert parse_frequency_hz("1.2MHz") == pytest.approx(1.2e6)
    assert parse_frequency_hz("460kHz") == pytest.approx(4.6e5)
    assert parse_frequency_hz("50") == pytest.approx(50.0)


def test_bad_unit_is_an_error():
    with pytest.raises(ValueError):
        parse_duration_us("5parsecs")


# ---------------------------------------------------------------------------
# validate / plan (no solver involved)


def test_validate_default_config(capsys):
    code, payload = run_cli(capsys, "validate")
    assert code == 0
    assert payload["ok"] is True
    assert payload["errors"] == []


def test_validate_broken_override(capsys):
    code, payload = run_cli(capsys, "validate",
                            "--set", "probe.center_us=0.1")
    assert code == 1
    assert payload["ok"] is False
    assert payload["errors"]


def test_unknown_set_key(capsys, tmp_path):
    code, payload = run_cli(capsys, "simulate", "--protocol",
                            "store_retrieve", "--set", "probe.centre=2",
                            "--out-dir", str(tmp_path))
    assert code == 1
    assert payload["error"]["exit_code"] == 1


def test_missing_config_file(capsys, tmp_path):
    code, payload = run_cli(capsys, "validate", "--config",
                            str(tmp_path / "nope.yaml"))
    assert code == 1
    assert "error" in payload


def test_plan_full_approach(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "plan", "--peak-detuning", "1.2MHz", "--t-up", "1ms",
        "--t-hold", "14ms", "--t-down", "1ms", "--out-dir", str(tmp_path))
    assert code == 0
    assert payload["displacement_mm"] == pytest.approx(7.29, rel=5e-2)
    assert payload["feasible"] is True
    text = (tmp_path / "ramp.csv").read_text().split("\n")
    assert text[0] == "t,detuning_Hz,x_mm,v_mps,a_mps2"
    assert (tmp_path / "manifest.json").exists()


def test_plan_distance_form(capsys, tmp_path):
    code, payload = run_cli(capsys, "plan", "--distance", "1.5mm",
                            "--ramp", "0.1ms", "--out-dir", str(tmp_path))
    assert code == 0
    assert payload["displacement_mm"] == pytest.approx(1.5, rel=1e-6)


def test_plan_infeasible(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "plan", "--peak-detuning", "1.2MHz", "--t-up", "0.4us",
        "--t-hold", "1ms", "--t-down", "0.4us", "--out-dir", str(tmp_path))
    assert code == 1
    assert "infeasible" in payload["error"]["message"]


def test_unknown_protocol_is_usage_error(capsys, tmp_path):
    code = main(["simulate", "--protocol", "warp_drive",
                 "--out-dir", str(tmp_path)])
    capsys.readouterr()
    assert code == 1


# ---------------------------------------------------------------------------
# simulate / sweep / fit (solver-backed)


def test_simulate_store_retrieve_artifacts(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "simulate", "--protocol", "store_retrieve", "--T", "5us",
        "--out-dir", str(tmp_path))
    assert code == 0
    assert payload["eta"] == pytest.approx(0.11, abs=0.01)
    for name in ("series.csv", "reference.csv", "events.json",
                 "summary.json", "config.yaml", "manifest.json"):
        assert (tmp_path / name).exists(), name
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["protocol"] == "store_retrieve"
    assert summary["eta"] == pytest.approx(payload["eta"])
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert "series.csv" in man["outputs"]
    # the retrieved pulse shows up after the re-on marker
    events = json.loads((tmp_path / "events.json").read_text())
    assert events["events"]["control_reon"] > events["events"]["control_off"]


def test_simulate_series_deterministic(capsys, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        code, _ = run_cli(capsys, "simulate", "--protocol",
                          "store_retrieve", "--T", "5us",
                          "--out-dir", str(out))
        assert code == 0
    assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_sweep_then_fit_pipeline(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "sweep", "--param", "storage_time",
        "--values", "5us,50us,200us", "--protocol", "store_retrieve",
        "--out-dir", str(tmp_path))
    assert code == 0
    assert payload["n"] == 3
    pts = read_points_csv(tmp_path / "sweep.csv")
    assert len(pts) == 3
    fit_dir = tmp_path / "fit"
    code, fit_payload = run_cli(capsys, "fit", str(tmp_path / "sweep.csv"),
                                "--out-dir", str(fit_dir))
    assert code == 0
    # three noiseless points pin the configured lifetime exactly
    assert fit_payload["tau_ms"] == pytest.approx(3.1, rel=1e-6)
    saved = json.loads((fit_dir / "fit.json").read_text())
    assert saved["tau_us"] == pytest.approx(3100.0, rel=1e-6)
    assert saved["n_points"] == 3


def test_sweep_noise_requires_seed(capsys, tmp_path):
    code, payload = run_cli(
        capsys, "sweep", "--param", "storage_time", "--values", "5us,50us",
        "--protocol", "store_retrieve", "--noise", "0.05",
        "--out-dir", str(tmp_path))
    assert code == 1
    assert "seed" in payload["error"]["message"]


def test_fit_degenerate_csv(capsys, tmp_path):
    write_sweep_table([EfficiencyPoint(abscissa=5.0, efficiency=0.1),
                       EfficiencyPoint(abscissa=100.0, efficiency=0.09)],
                      tmp_path / "two.csv")
    code, payload = run_cli(capsys, "fit", str(tmp_path / "two.csv"),
                            "--out-dir", str(tmp_path))
    assert code == 1
    assert payload["error"]["exit_code"] == 1


def test_fit_synthetic_exact(capsys, tmp_path):
    ts = np.linspace(5.0, 6000.0, 8)
    pts = [EfficiencyPoint(abscissa=t,
                           efficiency=0.11 * float(np.exp(-t / 3100.0)))
           for t in ts]
    write_sweep_table(pts, tmp_path / "syn.csv")
    code, payload = run_cli(capsys, "fit", str(tmp_path / "syn.csv"),
                            "--out-dir", str(tmp_path))
    assert code == 0
    assert payload["tau_us"] == pytest.approx(3100.0, rel=1e-9)
    assert payload["amplitude"] == pytest.approx(0.11, rel=1e-9)


def test_version_flag(capsys):
    code = main(["--version"])
    out = capsys.readouterr().out
    assert code == 0
    assert "0.1.0" in out
