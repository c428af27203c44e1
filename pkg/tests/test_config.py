"""Config schema: defaults, unit handling, overrides, validation."""
import math

import pytest

from storedlight.config import (ConfigSchemaError, ConfigUnitError,
                                ControlSettings, NumericsConfig,
                                config_from_dict, load_config, paper_config,
                                rabi_from_power, save_config,
                                serialize_config, validate_config, with_field)


def test_empty_dict_gives_paper_defaults(cfg):
    assert serialize_config(config_from_dict({})) == serialize_config(cfg)


def test_paper_config_is_deterministic():
    assert serialize_config(paper_config()) == serialize_config(paper_config())


def test_species_table_numbers(cfg):
    sp = cfg.species
    assert sp.mass == pytest.approx(1.44316e-25, rel=1e-4)
    assert sp.lambda_probe_m == pytest.approx(780.24e-9, rel=1e-9)
    # natural linewidth 6.065 MHz as an angular rate in rad/us
    assert sp.gamma == pytest.approx(2.0 * math.pi * 6.065, rel=1e-9)
    assert sp.delta_hf_hz == pytest.approx(6.834683e9, rel=1e-6)


def test_internal_units(cfg):
    # times are microseconds, lengths millimetres internally
    assert cfg.probe.center == pytest.approx(2.0)
    assert cfg.probe.fwhm == pytest.approx(0.4)
    assert cfg.medium.tau_storage == pytest.approx(3100.0)
    assert cfg.cloud.center == pytest.approx(1.0)
    assert cfg.fiber.far_end == pytest.approx(100.0)
    assert cfg.control.on_level == pytest.approx(1.4 * cfg.species.gamma)


def test_unknown_key_rejected():
    with pytest.raises(ConfigSchemaError):
        config_from_dict({"cloud": {"centre_mm": 1.0}})
    with pytest.raises(ConfigSchemaError):
        config_from_dict({"clouds": {}})


def test_schema_version_gate():
    with pytest.raises(ConfigSchemaError):
        config_from_dict({"schema_version": 99})


def test_species_shorthand():
    cfg = config_from_dict({"species": "Rb87"})
    assert cfg.species.lambda_probe_m == pytest.approx(780.24e-9)
    with pytest.raises(ConfigSchemaError):
        config_from_dict({"species": "Xe999"})


def test_with_field_returns_modified_copy(cfg):
    out = with_field(cfg, "medium.tau_storage", 2600.0)
    assert out.medium.tau_storage == 2600.0
    assert cfg.medium.tau_storage == 3100.0
    with pytest.raises(KeyError):
        with_field(cfg, "medium.no_such_field", 1.0)
    with pytest.raises(KeyError):
        with_field(cfg, "nonsense.path", 1.0)


def _assert_dicts_close(a, b, path=""):
    assert type(a) is type(b) or isinstance(a, (int, float)), path
    if isinstance(a, dict):
        assert a.keys() == b.keys(), path
        for k in a:
            _assert_dicts_close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, float):
        assert b == pytest.approx(a, rel=1e-12, abs=1e-300), path
    else:
        assert a == b, path


def test_serialize_round_trip(cfg, tmp_path):
    # save/load converts between external and internal units, which can
    # shave an ulp off a float; everything must survive to full physical
    # precision in both formats
    for name in ("cfg.yaml", "cfg.json"):
        path = tmp_path / name
        save_config(cfg, path)
        back = load_config(path)
        _assert_dicts_close(serialize_config(cfg), serialize_config(back))
        assert back.medium.tau_storage == pytest.approx(
            cfg.medium.tau_storage, rel=1e-12)
        assert back.probe.peak_rabi == pytest.approx(cfg.probe.peak_rabi,
                                                     rel=1e-12)
        assert back.calibration.efficiency_scale == pytest.approx(
            cfg.calibration.efficiency_scale, rel=1e-12)


def test_rabi_from_power_square_root_scaling(cfg):
    g = cfg.species.gamma_rad_s
    r1 = rabi_from_power(16e-9, 42e-6, g, cfg.species.lambda_probe_m)
    r4 = rabi_from_power(64e-9, 42e-6, g, cfg.species.lambda_probe_m)
    assert r1 > 0.0
    assert r4 == pytest.approx(2.0 * r1, rel=1e-9)


def test_power_specified_probe(cfg):
    # giving the probe a power instead of a Rabi frequency goes through the
    # broad-brush dipole model; it should land at a perturbative drive and
    # scale as sqrt(P)
    alt = config_from_dict({"probe": {"peak_rabi_over_gamma": None,
                                      "peak_power_nw": 16.0}})
    alt4 = config_from_dict({"probe": {"peak_rabi_over_gamma": None,
                                       "peak_power_nw": 64.0}})
    assert 0.0 < alt.probe.peak_rabi < 2.0 * alt.species.gamma
    assert alt4.probe.peak_rabi == pytest.approx(2.0 * alt.probe.peak_rabi,
                                                 rel=1e-9)


def test_control_schedule_from_settings():
    ctl = ControlSettings(on_level=50.0, t_off=2.1)
    sched = ctl.schedule(storage_time=7.0)
    assert sched.t_off == 2.1
    assert sched.t_reon == pytest.approx(9.1)
    assert sched.storage_time == pytest.approx(7.0)
    always = ctl.always_on()
    assert always.t_off is None
    assert always.value(1e6) == 50.0


def test_numerics_floor_enforced():
    with pytest.raises(ValueError):
        NumericsConfig(points_per_width=8)
    with pytest.raises(ValueError):
        NumericsConfig(dt_per_fastest=1)


def test_unit_error_for_nonsense_values():
    with pytest.raises((ConfigUnitError, ValueError)):
        config_from_dict({"probe": {"fwhm_us": -0.4}})


# ---------------------------------------------------------------------------
# semantic validation


def test_validate_default_is_clean(cfg):
    report = validate_config(cfg)
    assert report.ok
    assert not report.errors


def test_validate_probe_before_zero():
    bad = config_from_dict({"probe": {"center_us": 0.5, "fwhm_us": 0.4}})
    report = validate_config(bad)
    assert not report.ok
    assert any("probe" in v.path for v in report.errors)


def test_validate_warns_on_strong_probe():
    strong = config_from_dict({"probe": {"peak_rabi_over_gamma": 1.0}})
    report = validate_config(strong)
    assert report.ok  # warning, not error
    assert any("weak-probe" in v.message for v in report.warnings)


def test_validate_rejects_cloud_behind_mot():
    bad = config_from_dict({"cloud": {"center_mm": -20.0}})
    report = validate_config(bad)
    assert any(v.path.startswith("cloud") for v in report.errors)


def test_validate_rejects_infeasible_trajectory():
    # 1.2 MHz in a microsecond wants ~4.9e5 g of acceleration
    bad = config_from_dict({"trajectory": {"peak_detuning_khz": 1200.0,
                                           "ramp_ms": 1e-6}})
    report = validate_config(bad)
    assert not report.ok
    assert any("infeasible" in v.message for v in report.errors)
