"""Solver checks against closed-form optics results.

The frequency-domain transfer function is exact for a stationary medium in
the weak-probe limit, so it serves as the oracle for the time stepper;
Beer-Lambert and EIT transparency limits pin the ends of the parameter
range.
"""
import numpy as np
import pytest

from storedlight.config import config_from_dict
from storedlight.dynamics import (AdvectionClipWarning, ControlSchedule,
                                  ProbePulse, TimeSeries, advect_spin_wave,
                                  apply_transfer_function, group_delay,
                                  output_pulse_energy, simulate,
                                  steady_state_transmission,
                                  transfer_function)

GAMMA = 38.10751888804419      # rad/us, Rb87 D2
WC = 1.4 * GAMMA


def energy_ratio(out, ref):
    win = (0.0, out.t[-1])
    return output_pulse_energy(out, win) / output_pulse_energy(ref, win)


@pytest.fixture(scope="module")
def narrowband_pair(deep_cfg):
    """4 us pulse through the OD-5 cloud with the control off: plain
    two-level absorption."""
    probe = ProbePulse(peak_rabi=0.01 * GAMMA, center=16.0, fwhm=4.0)
    off = ControlSchedule(on_level=0.0)
    out = simulate(deep_cfg, schedule=off, probe=probe, gamma_s=0.0)
    ref = simulate(deep_cfg, schedule=off, probe=probe, gamma_s=0.0,
                   include_atoms=False)
    return out, ref


@pytest.fixture(scope="module")
def eit_pair(deep_cfg):
    """Same pulse with the control on: transparency plus group delay."""
    probe = ProbePulse(peak_rabi=0.01 * GAMMA, center=16.0, fwhm=4.0)
    on = ControlSchedule(on_level=WC)
    out = simulate(deep_cfg, schedule=on, probe=probe, gamma_s=0.0)
    ref = simulate(deep_cfg, schedule=on, probe=probe, gamma_s=0.0,
                   include_atoms=False)
    return out, ref


# ---------------------------------------------------------------------------
# steady state


def test_two_level_resonance_is_beer_lambert():
    assert steady_state_transmission(5.0, 0.0, 0.0, 0.0, 0.0, GAMMA) == \
        pytest.approx(np.exp(-5.0), rel=1e-12)


def test_dark_resonance_is_fully_transparent():
    assert steady_state_transmission(5.0, 0.0, WC, 0.0, 0.0, GAMMA) == 1.0
    # even at silly optical depth
    assert steady_state_transmission(500.0, 0.0, WC, 0.0, 0.0, GAMMA) == 1.0


def test_spin_decay_costs_transparency():
    t = steady_state_transmission(5.0, 0.0, WC, 1e-3 * GAMMA, 0.0, GAMMA)
    assert t < 1.0
    assert t == pytest.approx(0.9949161268902205, rel=1e-9)


def test_transmission_window_shape():
    # transparency dip at line centre flanked by absorption
    deltas = np.array([0.0, 5.0, 15.0, 30.0])
    ts = [steady_state_transmission(5.0, d, WC, 0.0, d, GAMMA)
          for d in deltas]
    assert ts[0] == 1.0
    two_level = steady_state_transmission(5.0, 0.0, 0.0, 0.0, 0.0, GAMMA)
    assert min(ts) > two_level


def test_transfer_function_matches_steady_state():
    gs = 1e-3 * GAMMA
    for d in np.linspace(-80.0, 80.0, 17):
        t_cw = steady_state_transmission(5.0, d, WC, gs, d, GAMMA)
        h_static = transfer_function(0.0, 5.0, d, WC, gs, d, GAMMA)
        h_offset = transfer_function(d, 5.0, 0.0, WC, gs, 0.0, GAMMA)
        assert abs(abs(h_static) ** 2 - t_cw) < 1e-12
        assert abs(abs(h_offset) ** 2 - t_cw) < 1e-12


def test_steady_state_rejects_negative_od():
    with pytest.raises(ValueError):
        steady_state_transmission(-1.0, 0.0, WC, 0.0, 0.0, GAMMA)


# ---------------------------------------------------------------------------
# pulse bookkeeping


def test_probe_energy_closed_form():
    p = ProbePulse(peak_rabi=1.0, center=2.0, fwhm=0.4)
    assert p.energy() == pytest.approx(0.4257868077724905, rel=1e-12)
    t = np.linspace(0.0, 4.0, 40001)
    quad = np.trapezoid(np.abs(p.envelope(t)) ** 2, t)
    assert p.energy() == pytest.approx(quad, rel=1e-8)


def test_probe_truncation_and_onset():
    p = ProbePulse(peak_rabi=1.0, center=5.0, fwhm=1.0, truncation_fwhms=3.0)
    assert p.onset == pytest.approx(2.0)
    assert p.envelope(1.9) == 0.0
    assert p.envelope(8.2) == 0.0
    assert p.envelope(5.0) == pytest.approx(1.0)


def test_output_energy_of_unit_area_pulse():
    t = np.linspace(0.0, 2.0, 20001)
    # |f|^2 is a unit-area Gaussian
    f = np.exp(-0.5 * ((t - 1.0) / 0.1) ** 2) / np.sqrt(
        np.sqrt(np.pi) * 0.1)
    series = TimeSeries(t=t, field_out=f.astype(complex), events={})
    assert output_pulse_energy(series, (0.0, 2.0)) == pytest.approx(1.0,
                                                                    rel=1e-6)
    zero = TimeSeries(t=t, field_out=np.zeros_like(t, dtype=complex),
                      events={})
    assert output_pulse_energy(zero, (0.0, 2.0)) == 0.0


def test_output_energy_window_errors():
    t = np.linspace(0.0, 1.0, 11)
    series = TimeSeries(t=t, field_out=np.ones_like(t, dtype=complex),
                        events={})
    with pytest.raises(ValueError):
        output_pulse_energy(series, (5.0, 6.0))


def test_control_schedule_shapes():
    s = ControlSchedule(on_level=10.0, t_off=2.0, t_reon=7.0, edge=0.5)
    assert s.value(0.0) == 10.0
    assert s.value(2.25) == pytest.approx(5.0)
    assert s.value(4.0) == 0.0
    assert s.value(7.25) == pytest.approx(5.0)
    assert s.value(9.0) == 10.0
    assert s.storage_time == pytest.approx(5.0)
    with pytest.raises(ValueError):
        ControlSchedule(on_level=10.0, t_off=5.0, t_reon=2.0)


# ---------------------------------------------------------------------------
# time-domain solver vs closed forms


def test_beer_lambert_transmission(narrowband_pair):
    got = energy_ratio(*narrowband_pair)
    assert got == pytest.approx(np.exp(-5.0), rel=1e-2)
    # measured agreement is far better than the acceptance bound
    assert got == pytest.approx(np.exp(-5.0), rel=1e-3)


def test_eit_transparency_narrowband(eit_pair):
    got = energy_ratio(*eit_pair)
    assert got >= 0.99
    assert got <= 1.0 + 1e-9


def test_group_delay_formula_and_measured(eit_pair):
    out, ref = eit_pair
    pred = group_delay(5.0, WC, GAMMA)
    assert pred == pytest.approx(5.0 * GAMMA / WC ** 2, rel=1e-12)
    assert pred == pytest.approx(0.0669, abs=2e-3)

    def centroid(sr):
        w = np.abs(sr.field_out) ** 2
        return np.trapezoid(sr.t * w, sr.t) / np.trapezoid(w, sr.t)

    measured = centroid(out) - centroid(ref)
    assert measured == pytest.approx(pred, rel=0.1)


def test_time_domain_matches_transfer_function(deep_cfg):
    gs = 1e-3 * GAMMA
    on = ControlSchedule(on_level=WC)
    off = ControlSchedule(on_level=0.0)
    cases = [(d, WC, on) for d in (0.0, 12.6, 37.7)] + \
            [(d, 0.0, off) for d in (0.0, 20.0)]
    worst = 0.0
    for delta, wc, sched in cases:
        probe = ProbePulse(peak_rabi=0.01 * GAMMA, center=2.0, fwhm=0.4,
                           detuning=delta)
        out = simulate(deep_cfg, schedule=sched, probe=probe, gamma_s=gs,
                       two_photon=delta)
        ref = simulate(deep_cfg, schedule=sched, probe=probe, gamma_s=gs,
                       two_photon=delta, include_atoms=False)
        pred = apply_transfer_function(ref.t, ref.field_out, 5.0, delta,
                                       wc, gs, delta, GAMMA)
        num = np.sqrt(np.trapezoid(np.abs(out.field_out - pred) ** 2, out.t))
        den = np.sqrt(np.trapezoid(np.abs(ref.field_out) ** 2, ref.t))
        worst = max(worst, num / den)
    assert worst < 1e-2
    assert worst < 1e-3  # regression margin, measured ~6e-5


def test_solver_is_linear_in_the_probe(deep_cfg):
    on = ControlSchedule(on_level=WC)
    p1 = ProbePulse(peak_rabi=0.108 * GAMMA, center=2.0, fwhm=0.4)
    p2 = ProbePulse(peak_rabi=0.108e-3 * GAMMA, center=2.0, fwhm=0.4)
    o1 = simulate(deep_cfg, schedule=on, probe=p1, gamma_s=1e-3 * GAMMA)
    o2 = simulate(deep_cfg, schedule=on, probe=p2, gamma_s=1e-3 * GAMMA)
    resid = np.max(np.abs(o1.field_out * 1e-3 - o2.field_out))
    assert resid / np.max(np.abs(o2.field_out)) < 1e-12


def test_no_atoms_is_the_identity_channel():
    cfg0 = config_from_dict({"medium": {"od_fiber": 0.0}})
    out = simulate(cfg0)
    env = cfg0.probe.envelope(out.t)
    assert np.max(np.abs(out.field_out - env)) < 1e-12


def test_output_precedes_nothing(deep_cfg):
    # causality: the port is dark until the probe switches on
    probe = ProbePulse(peak_rabi=0.01 * GAMMA, center=4.0, fwhm=0.4)
    out = simulate(deep_cfg, schedule=ControlSchedule(on_level=WC),
                   probe=probe, gamma_s=0.0)
    early = out.t < probe.onset - 1e-9
    assert early.any()
    assert np.max(np.abs(out.field_out[early])) < 1e-12


def test_events_recorded(cfg):
    series = simulate(cfg)
    ev = series.events
    assert ev["control_off"] == pytest.approx(2.1)
    assert ev["control_reon"] == pytest.approx(7.1)
    assert ev["probe_center"] == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# spin-wave advection


def test_advection_zero_displacement_is_identity():
    z = np.linspace(-5.0, 5.0, 401)
    s = np.exp(-z ** 2) * np.exp(0.3j * z)
    assert np.array_equal(advect_spin_wave(s, z, 0.0), s)


def test_advection_preserves_norm():
    z = np.linspace(-6.0, 6.0, 481)
    s = np.exp(-(z + 1.0) ** 2 / 0.5).astype(complex)
    moved = advect_spin_wave(s, z, 1.2)
    n0 = np.trapezoid(np.abs(s) ** 2, z)
    n1 = np.trapezoid(np.abs(moved) ** 2, z)
    assert n1 == pytest.approx(n0, rel=1e-3)


def test_advection_round_trip():
    z = np.linspace(-6.0, 6.0, 481)
    s = np.exp(-(z ** 2) / 0.8) * np.exp(1.4j * z)
    back = advect_spin_wave(advect_spin_wave(s, z, 1.2), z, -1.2)
    err = np.sqrt(np.trapezoid(np.abs(back - s) ** 2, z)
                  / np.trapezoid(np.abs(s) ** 2, z))
    assert err <= 1e-3


def test_advection_warns_when_clipping():
    z = np.linspace(-2.0, 2.0, 161)
    s = np.exp(-z ** 2).astype(complex)
    w = np.ones_like(z)
    with pytest.warns(AdvectionClipWarning):
        advect_spin_wave(s, z, 3.5, weight=w)


# ---------------------------------------------------------------------------
# numerics


def test_grid_and_step_refinement(cfg):
    from storedlight.protocols import run_store_retrieve
    coarse = run_store_retrieve(cfg).efficiency
    fine_cfg = config_from_dict({"numerics": {"points_per_width": 40,
                                              "dt_per_fastest": 40}})
    fine = run_store_retrieve(fine_cfg).efficiency
    assert abs(fine / coarse - 1.0) < 5e-3
