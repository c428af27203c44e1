"""Dark/bright polariton decomposition and the adiabatic storage picture."""
import numpy as np
import pytest

from storedlight.config import config_from_dict
from storedlight.constants import C_MM_US
from storedlight.dynamics import ControlSchedule, simulate
from storedlight.medium import coupling_density
from storedlight.polariton import (collective_coupling, dark_bright_transform,
                                   group_velocity,
                                   inverse_dark_bright_transform,
                                   local_coupling, mixing_angle,
                                   normalize_spin_wave, polariton_view)

GAMMA = 38.10751888804419
WC = 1.4 * GAMMA


def test_mixing_angle_limits():
    assert mixing_angle(0.0, 10.0) == 0.0
    assert mixing_angle(10.0, 0.0) == pytest.approx(np.pi / 2)
    assert mixing_angle(7.0, 7.0) == pytest.approx(np.pi / 4)
    assert mixing_angle(1e9, 10.0) == pytest.approx(np.pi / 2, abs=1e-7)
    with pytest.raises(ValueError):
        mixing_angle(0.0, 0.0)


def test_group_velocity_limits():
    assert group_velocity(0.0) == pytest.approx(C_MM_US)
    assert group_velocity(np.pi / 2) == pytest.approx(0.0, abs=1e-20)
    th = np.linspace(0.0, np.pi / 2, 50)
    vg = group_velocity(th)
    assert np.all(vg >= 0.0)
    assert np.all(vg <= C_MM_US * (1.0 + 1e-12))


def test_collective_vs_local_coupling():
    # uniform slab: G^2 integrated over the length reproduces c*gamma*od
    od, length = 5.0, 2.0
    g_col = collective_coupling(od, length, GAMMA)
    rho = np.full(11, od / length)
    g_loc = local_coupling(rho, GAMMA)
    assert np.allclose(g_loc, g_col)
    with pytest.raises(ValueError):
        local_coupling(np.array([-1.0]), GAMMA)
    with pytest.raises(ValueError):
        collective_coupling(5.0, 0.0, GAMMA)


def test_transform_is_identity_at_theta_zero():
    e = np.array([1.0 + 2.0j, 0.5, -1.0j])
    s = np.array([0.3, -0.7j, 2.0])
    psi, phi = dark_bright_transform(e, s, 0.0)
    assert np.allclose(psi, e)
    assert np.allclose(phi, s)


def test_transform_swaps_at_theta_half_pi():
    e = np.array([1.0 + 2.0j, 0.5, -1.0j])
    s = np.array([0.3, -0.7j, 2.0])
    psi, phi = dark_bright_transform(e, s, np.pi / 2)
    assert np.allclose(psi, -s)
    assert np.allclose(phi, e)


def test_transform_norm_identity_random_fields():
    rng = np.random.default_rng(7)
    z = np.linspace(-3.0, 3.0, 257)
    for theta in (0.0, 0.31, np.pi / 4, 1.2,
                  rng.uniform(0.0, np.pi / 2, size=z.size)):
        e = rng.normal(size=z.size) + 1j * rng.normal(size=z.size)
        s = rng.normal(size=z.size) + 1j * rng.normal(size=z.size)
        psi, phi = dark_bright_transform(e, s, theta)
        before = np.trapezoid(np.abs(e) ** 2 + np.abs(s) ** 2, z)
        after = np.trapezoid(np.abs(psi) ** 2 + np.abs(phi) ** 2, z)
        assert abs(after / before - 1.0) < 1e-12


def test_inverse_round_trip():
    rng = np.random.default_rng(11)
    e = rng.normal(size=64) + 1j * rng.normal(size=64)
    s = rng.normal(size=64) + 1j * rng.normal(size=64)
    theta = rng.uniform(0.0, np.pi / 2, size=64)
    back_e, back_s = inverse_dark_bright_transform(
        *dark_bright_transform(e, s, theta), theta)
    assert np.max(np.abs(back_e - e)) < 1e-12
    assert np.max(np.abs(back_s - s)) < 1e-12


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        dark_bright_transform(np.zeros(4), np.zeros(5), 0.3)
    with pytest.raises(ValueError):
        normalize_spin_wave(np.zeros(4), np.zeros(5), GAMMA)


# ---------------------------------------------------------------------------
# solver-facing diagnostics


@pytest.fixture(scope="module")
def adiabatic_run():
    """Slow switch-off of the control on a deep, optically thick cloud.

    od = 600 gives an 8 us group delay so the whole 1.2 us pulse sits
    inside the cloud when the 0.5 us edge begins.
    """
    ad = config_from_dict({
        "cloud": {"center_mm": 10.0},
        "medium": {"od_fiber": 600.0},
        "numerics": {"points_per_width": 80},
        "probe": {"center_us": 3.7, "fwhm_us": 1.2, "truncation_fwhms": 3.0},
    })
    sched = ControlSchedule(on_level=WC, t_off=7.4, edge=0.5)
    series = simulate(ad, schedule=sched, gamma_s=0.0,
                      snapshot_times=(7.39, 8.4, 10.4), t_end=11.0)
    return ad, sched, series


def test_adiabatic_storage_maps_dark_norm_to_spin_wave(adiabatic_run):
    ad, sched, series = adiabatic_run
    before, after, _ = series.snapshots
    rho = coupling_density(before.z, ad.cloud, ad.medium, ad.fiber)
    view_before = polariton_view(before, rho, sched.value(before.t), GAMMA)
    view_after = polariton_view(after, rho, 0.0, GAMMA)
    # the captured pulse is almost purely dark before the switch
    assert view_before.dark_norm() / view_before.norm() > 0.999
    ratio = view_after.dark_norm() / view_before.dark_norm()
    assert ratio >= 0.99
    assert ratio <= 1.0 + 1e-9


def test_stored_spin_wave_norm_is_constant(adiabatic_run):
    _, _, series = adiabatic_run
    _, after, late = series.snapshots
    dt_ms = (late.t - after.t) * 1e-3
    drift = abs(late.spin_norm() / after.spin_norm() - 1.0)
    assert drift <= 1e-6 * max(dt_ms, 1.0)


def test_polariton_view_angles(adiabatic_run):
    ad, sched, series = adiabatic_run
    before, after, _ = series.snapshots
    rho = coupling_density(before.z, ad.cloud, ad.medium, ad.fiber)
    vb = polariton_view(before, rho, sched.value(before.t), GAMMA)
    va = polariton_view(after, rho, 0.0, GAMMA)
    assert np.all((vb.theta >= 0.0) & (vb.theta <= np.pi / 2))
    # with the control off anywhere the medium reaches is fully atomic
    assert np.allclose(va.theta[rho > 0.0], np.pi / 2)
    assert np.all(va.v_g <= C_MM_US * (1.0 + 1e-12))


def test_polariton_view_photonic_where_medium_vanishes():
    from storedlight.dynamics import FieldState
    z = np.linspace(-2.0, 2.0, 41)
    state = FieldState(z=z, e=np.ones_like(z, dtype=complex),
                       p=np.zeros_like(z, dtype=complex),
                       s=np.zeros_like(z, dtype=complex), t=0.0)
    rho = np.where(np.abs(z) < 1.0, 2.0, 0.0)
    view = polariton_view(state, rho, 0.0, GAMMA)
    assert np.all(view.theta[rho == 0.0] == 0.0)
    assert np.all(view.theta[rho > 0.0] == pytest.approx(np.pi / 2))
    assert np.allclose(view.v_g[rho == 0.0], C_MM_US)
