import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundary_riemann.model_core import make_mhd, make_navier_stokes
from boundary_riemann.spectral import eig_EA
from boundary_riemann.wave_curves import (
    AmplitudeTooLarge,
    characteristic_tangent,
    classify_family,
    hugoniot_point,
    lax_curve,
    lax_direction,
    limit_behavior_check,
    liu_check,
    rh_residual,
    zeta_k,
    zeta_k_general,
    zeta_k_lindeg,
)

NS = make_navier_stokes()
MHD = make_mhd(beta=1.0, eta=1.0)
U_NS = np.array([1.0, 0.0, 1.0])
U_MHD = np.array([1.0, 0.5, 0.3, 0.0, 0.1, -0.2, 1.0])


def test_zero_strength_is_identity():
    assert np.array_equal(lax_curve(NS, None, 2, U_NS, 0.0).end_state, U_NS)
    assert np.array_equal(zeta_k(NS, None, U_NS, 0.0).end_state, U_NS)
    assert lax_curve(NS, None, 2, U_NS, 0.0).wave_pattern == []


def test_amplitude_guard():
    with pytest.raises(AmplitudeTooLarge):
        lax_curve(NS, None, 2, U_NS, 0.2)
    with pytest.raises(AmplitudeTooLarge):
        zeta_k(NS, None, U_NS, -0.15)


def test_family_classification():
    assert [classify_family(NS, U_NS, i) for i in range(3)] == ["GNL", "LD", "GNL"]
    assert [classify_family(MHD, U_MHD, i) for i in range(7)] == ["GNL", "LD", "GNL", "LD", "GNL", "LD", "GNL"]


@pytest.mark.parametrize("step", [1e-3, 1e-4])
@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_lax_curve_tangent(step, sign):
    s = sign * step
    res = lax_curve(NS, None, 2, U_NS, s)
    r = lax_direction(NS, U_NS, 2, "GNL")
    assert np.max(np.abs((res.end_state - U_NS) / s - r)) <= 10 * step


@pytest.mark.parametrize("model,base", [(NS, U_NS), (MHD, U_MHD)])
@pytest.mark.parametrize("step", [1e-3, 1e-4])
def test_characteristic_curve_tangent(model, base, step):
    for s in (step, -step):
        res = zeta_k(model, None, base, s)
        assert np.max(np.abs((res.end_state - base) / s - characteristic_tangent(model, base))) <= 10 * step


def test_tangent_error_is_first_order():
    errs = []
    for step in (1e-2, 1e-3, 1e-4):
        res = lax_curve(NS, None, 2, U_NS, step)
        errs.append(np.max(np.abs((res.end_state - U_NS) / step - lax_direction(NS, U_NS, 2, "GNL"))))
    rates = np.log10(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 0.9)


def test_ns_contact_direction():
    # constant pressure: rho theta fixed, velocity fixed
    u = np.array([1.4, 0.0, 0.7])
    r = characteristic_tangent(NS, u)
    assert r[1] == pytest.approx(0.0, abs=1e-12)
    assert r[2] / r[0] == pytest.approx(-0.7 / 1.4, rel=1e-10)


def test_mhd_characteristic_tangent_is_eigenvector():
    r = characteristic_tangent(MHD, U_MHD)
    lhs = MHD.A(U_MHD) @ r
    assert np.linalg.norm(lhs - eig_EA(MHD, U_MHD).lambda_k * MHD.E(U_MHD) @ r) < 1e-10


@pytest.mark.parametrize("family,s", [(2, 0.05), (2, 0.01), (0, 0.05)])
def test_shock_satisfies_rankine_hugoniot_and_liu(family, s):
    res = lax_curve(NS, None, family, U_NS, s)
    (w,) = res.wave_pattern
    assert w.kind == "SHOCK"
    assert rh_residual(NS, w.left, w.right, w.speed) <= 1e-9
    assert liu_check(NS, w.left, w.right, w.speed, family)[0]
    # Lax inequalities
    assert eig_EA(NS, w.left).lambdas[family] > w.speed > eig_EA(NS, w.right).lambdas[family]


def test_liu_rejects_expansion_shock():
    r = lax_direction(NS, U_NS, 2, "GNL")
    E = NS.E(U_NS)
    ell = E @ r / (r @ E @ r)
    left, speed = hugoniot_point(NS, U_NS, ell, -0.05, U_NS - 0.05 * r, eig_EA(NS, U_NS).lambdas[2])
    assert rh_residual(NS, left, U_NS, speed) <= 1e-12
    ok, excess = liu_check(NS, left, U_NS, speed, 2)
    assert not ok
    assert excess > 1e-3


def test_rarefaction_speeds_increase_left_to_right():
    (w,) = lax_curve(NS, None, 2, U_NS, -0.05).wave_pattern
    assert w.kind == "RAREFACTION"
    assert np.all(np.diff(w.fan_speeds) > 0)
    np.testing.assert_array_equal(w.fan_states[-1], U_NS)


@pytest.mark.parametrize("model,base", [(NS, U_NS), (MHD, U_MHD)])
@pytest.mark.parametrize("s", [0.05, -0.05, 0.02])
def test_characteristic_speed_constant_along_curve(model, base, s):
    res = zeta_k(model, None, base, s, n=64)
    k = eig_EA(model, base).k
    lam = np.array([eig_EA(model, u).lambdas[k] for u in res.states])
    assert np.max(np.abs(lam - lam[0])) <= 1e-8


def test_contact_with_zero_speed_keeps_trace():
    res = zeta_k_lindeg(NS, None, U_NS, 0.02)
    assert res.kind == "CONTACT"
    np.testing.assert_array_equal(res.trace_state, U_NS)
    assert res.tau_bar == 0.0 and res.tau_under == 0.02


@pytest.mark.parametrize("vel", [-0.05, 0.05])
@pytest.mark.parametrize("s", [0.02, -0.02])
def test_general_and_degenerate_branches_agree(vel, s):
    u = np.array([1.0, vel, 1.0])
    lindeg = zeta_k_lindeg(NS, None, u, s, n=64)
    general = zeta_k_general(NS, None, u, s, n_grid=513)
    np.testing.assert_allclose(general.end_state, lindeg.end_state, atol=1e-10)
    np.testing.assert_allclose(general.z00[-1], lindeg.z00[-1], atol=1e-10)


@pytest.mark.parametrize("s", [0.02, -0.02])
def test_slow_layer_for_negative_speed(s):
    u = np.array([1.0, -0.05, 1.0])
    res = zeta_k_general(NS, None, u, s, n_grid=257)
    assert res.tau_bar == res.tau_under == 0.0
    interior = res.z00[1:]
    assert np.all(np.sign(interior) == -np.sign(s))
    (layer,) = res.wave_pattern
    assert layer.kind == "BOUNDARY_LAYER"
    x = layer.profile["x"]
    assert x[0] == np.inf and x[-1] == 0.0
    assert np.all(np.diff(x[1:]) < 0)


def test_split_points_ordered():
    for vel in (-0.05, 0.0, 0.05):
        for s in (0.03, -0.03):
            res = zeta_k_general(NS, None, np.array([1.0, vel, 1.0]), s, n_grid=257)
            assert abs(res.tau_bar) <= abs(res.tau_under) <= abs(s)
            assert np.sign(res.tau_bar) in (0.0, np.sign(s))


def test_general_branch_envelope_majorizes():
    res = zeta_k_general(NS, None, np.array([1.0, -0.03, 1.0]), 0.03, n_grid=257)
    assert np.all(res.env_vals >= res.g_vals - 1e-13)
    assert np.all(np.diff(res.env_vals) >= -1e-13)


@pytest.mark.parametrize("vel,expected", [(-0.05, 0.0), (0.05, 0.05)])
def test_limit_behavior(vel, expected):
    trip = limit_behavior_check(NS, np.array([1.0, vel, 1.0]), [0.01, 0.005, 0.0025], n_grid=129)
    np.testing.assert_allclose(trip.sigma0, expected, atol=1e-10)
    np.testing.assert_allclose(trip.z00_0, 0.0, atol=1e-12)
    assert trip.expected_sigma == pytest.approx(expected, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(-0.08, 0.08), rho=st.floats(0.5, 2.0), theta=st.floats(0.5, 2.0))
def test_lax_curve_end_state_is_connected_by_its_waves(s, rho, theta):
    u = np.array([rho, 0.0, theta])
    res = lax_curve(NS, None, 2, u, s)
    if s == 0.0:
        return
    (w,) = res.wave_pattern
    np.testing.assert_array_equal(w.right, u)
    np.testing.assert_array_equal(w.left, res.end_state)
    if w.kind == "SHOCK":
        assert rh_residual(NS, w.left, w.right, w.speed) <= 1e-9
    else:
        # Riemann invariant of the 3-family: u - 2c/(gamma-1) over a fan
        gamma = 5.0 / 3.0
        c = np.sqrt(gamma * res.states[:, 2])
        inv = res.states[:, 1] - 2 * c / (gamma - 1)
        assert np.ptp(inv) <= 1e-9
