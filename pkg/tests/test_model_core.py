import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundary_riemann.model_core import (
    BoundaryRegime,
    DomainError,
    beta_map,
    check_hypotheses,
    make_mhd,
    make_navier_stokes,
)
from boundary_riemann.spectral import eig_EA


NS = make_navier_stokes()
MHD = make_mhd(beta=1.0, eta=1.0)
MHD0 = make_mhd(beta=1.0, eta=0.0)
U_NS = np.array([1.0, 0.0, 1.0])
U_MHD = np.array([1.0, 0.5, 0.3, 0.0, 0.1, -0.2, 1.0])


def random_ns(rng, n):
    return np.column_stack([rng.uniform(0.2, 5, n), rng.uniform(-2, 2, n), rng.uniform(0.2, 5, n)])


def random_mhd(rng, n):
    b = rng.uniform(-2, 2, (n, 2))
    b[np.hypot(b[:, 0], b[:, 1]) < 1e-3] = 0.5
    return np.column_stack(
        [rng.uniform(0.2, 5, n), b, rng.uniform(-2, 2, n), rng.uniform(-2, 2, (n, 2)), rng.uniform(0.2, 5, n)]
    )


def test_ns_energy_matrix_at_reference_state():
    np.testing.assert_allclose(NS.E(U_NS), np.diag([1.0, 1.0, 1.5]), atol=1e-15)


def test_ns_eigenvalues_at_reference_state():
    lam = eig_EA(NS, U_NS).lambdas
    c = np.sqrt(5.0 / 3.0)
    np.testing.assert_allclose(lam, [-c, 0.0, c], atol=1e-12)
    assert abs(c - 1.2909944) < 1e-7


def test_ns_second_order_term_vanishes_without_gradient():
    assert np.all(NS.G(U_NS, np.zeros(3)) == 0)


def test_mhd_a21_pattern():
    u = np.array([2.0, 0.5, 0.3, 0.0, 0.1, -0.2, 1.5])
    expected = np.array([0.0, 0.0, 1.0 * 1.5 / 2.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(MHD.a21(u), expected, atol=1e-15)


def test_mhd_nonresistive_a22_block():
    u = U_MHD.copy()
    u[3] = 0.3
    A22 = MHD0.A22(u)
    np.testing.assert_allclose(np.diag(A22), [0.3, 0.3, 0.3, 0.3 * 1.5 / u[6]], atol=1e-15)
    assert A22[0, 3] == MHD0.R


def test_mhd_block_sizes():
    assert MHD0.h == 3
    assert make_mhd(eta=0.1).h == 1


def test_beta_map_full_regime():
    u_b = np.array([1.0, 0.1, 1.0])
    np.testing.assert_array_equal(beta_map(u_b, u_b, NS), 0.0)
    assert NS.regime(u_b) is BoundaryRegime.FULL


def test_beta_map_partial_regime_drops_density():
    u_b = np.array([1.0, -0.1, 1.0])
    u = np.array([2.0, -0.1, 1.0])
    np.testing.assert_array_equal(beta_map(u, u_b, NS), 0.0)
    assert NS.regime(u_b) is BoundaryRegime.PARTIAL


def test_beta_map_flag_follows_only_parabolic_boundary_data():
    u = np.array([1.3, 0.05, 1.1])
    for rho_b in (0.5, 1.0, 2.0):
        out = beta_map(u, np.array([rho_b, 0.05, 1.0]), NS)
        assert out[0] == pytest.approx(1.3 - rho_b)
    for rho_b in (0.5, 1.0, 2.0):
        assert beta_map(u, np.array([rho_b, -0.05, 1.0]), NS)[0] == 0.0


def test_beta_map_rejects_bad_state():
    with pytest.raises(DomainError):
        beta_map(np.array([-1.0, 0.0, 1.0]), U_NS, NS)


def test_hypotheses_ns():
    assert check_hypotheses(NS, U_NS).all_pass


def test_hypotheses_fail_without_viscosity():
    rep = check_hypotheses(NS, U_NS, B_override=np.zeros((3, 3)))
    assert not rep.kawashima_shizuta


def test_hypotheses_mhd_nonresistive():
    rep = check_hypotheses(MHD0, U_MHD)
    assert rep.all_pass, rep.failures()
    assert MHD0.h == 3


@pytest.mark.parametrize("model,sampler", [(NS, random_ns), (MHD, random_mhd), (MHD0, random_mhd)])
def test_structure_on_random_states(model, sampler):
    rng = np.random.default_rng(7)
    u = sampler(rng, 1000)
    A = model.A(u)
    E = model.E(u)
    assert np.max(np.abs(A - np.swapaxes(A, -1, -2))) <= 1e-12
    assert np.min(np.linalg.eigvalsh(E)) >= 1e-10
    alpha = model.alpha(u)
    h = model.h
    resid = A[:, :h, :h] - alpha[:, None, None] * E[:, :h, :h]
    assert np.max(np.abs(resid)) <= 1e-10


@pytest.mark.parametrize("model,sampler", [(NS, random_ns), (MHD, random_mhd)])
def test_conservative_round_trip(model, sampler):
    u = sampler(np.random.default_rng(3), 200)
    np.testing.assert_allclose(model.from_conservative(model.to_conservative(u)), u, rtol=1e-12, atol=1e-12)


def test_ns_symmetrized_and_conservative_systems_agree():
    # E^-1 A must be similar to the flux Jacobian through dw/du
    u = np.array([1.3, 0.2, 0.8])
    dw = NS.conservative_jacobian(u)
    eps = 1e-6
    df = np.column_stack([(NS.flux(u + eps * e) - NS.flux(u - eps * e)) / (2 * eps) for e in np.eye(3)])
    lam_flux = np.sort(np.linalg.eigvals(df @ np.linalg.inv(dw)).real)
    np.testing.assert_allclose(lam_flux, eig_EA(NS, u).lambdas, atol=1e-8)


def test_mhd_symmetrized_system_matches_flux_at_unit_density():
    u = np.array([1.0, 0.5, 0.3, 0.1, 0.1, -0.2, 1.2])
    dw = MHD.conservative_jacobian(u)
    eps = 1e-6
    df = np.column_stack([(MHD.flux(u + eps * e) - MHD.flux(u - eps * e)) / (2 * eps) for e in np.eye(7)])
    lam_flux = np.sort(np.linalg.eigvals(df @ np.linalg.inv(dw)).real)
    np.testing.assert_allclose(lam_flux, eig_EA(MHD, u).lambdas, atol=1e-7)


@settings(max_examples=60, deadline=None)
@given(
    rho=st.floats(0.3, 3.0),
    vel=st.floats(-1.0, 1.0),
    theta=st.floats(0.3, 3.0),
    grad=st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3),
)
def test_ns_second_order_terms_have_no_hyperbolic_columns(rho, vel, theta, grad):
    G = make_navier_stokes(nu=lambda r: r**0.5, kappa=lambda r: 1 + r).G(np.array([rho, vel, theta]), np.array(grad))
    assert np.all(G[:, 0] == 0)
    assert np.all(G[0, :] == 0)


def test_ns_layer_profile_conserves_flux():
    # a smooth steady profile of the symmetrized system keeps f - V u_x constant
    from boundary_riemann.boundary_layer import compute_layer

    u_under = np.array([1.0, 0.1, 1.0])
    prof = compute_layer(NS, None, None, u_under, [0.02])
    u = prof.states
    ux = np.zeros_like(u)
    ux[:, 1:] = prof.z2()  # du2/dx; the viscous flux has no density column
    total = NS.flux(u) - NS.viscous_flux(u, ux)
    np.testing.assert_allclose(total, np.broadcast_to(NS.flux(u_under), total.shape), atol=1e-9)
