import numpy as np
import pytest

from boundary_riemann.model_core import BoundaryRegime, make_mhd, make_navier_stokes
from boundary_riemann.riemann import (
    RiemannOptions,
    admissibility_report,
    analytic_jacobian,
    layout_for,
    solve_boundary_riemann,
    zeta_par,
    zeta_tot,
)
from boundary_riemann.wave_curves import AmplitudeTooLarge, lax_direction

NS = make_navier_stokes()
MHD = make_mhd(beta=1.0, eta=1.0)
U_NS = np.array([1.0, 0.0, 1.0])
U_MHD = np.array([1.0, 0.5, 0.3, 0.0, 0.1, -0.2, 1.0])


def fd_jacobian(model, u, step):
    cols = []
    for e in np.eye(model.N):
        plus = zeta_tot(model, None, None, u, step * e)
        minus = zeta_tot(model, None, None, u, -step * e)
        cols.append((plus - minus) / (2 * step))
    return np.column_stack(cols)


# --- composed map -------------------------------------------------------------


@pytest.mark.parametrize("model,u", [(NS, U_NS), (MHD, U_MHD)])
def test_zero_strength_returns_interior_state(model, u):
    np.testing.assert_array_equal(zeta_tot(model, None, None, u, np.zeros(model.N)), u)


def test_layouts():
    assert layout_for(NS, U_NS).char == 1
    lay = layout_for(MHD, U_MHD)
    assert (lay.h, lay.n_slow, lay.char, list(lay.lax_families)) == (1, 2, 3, [4, 5, 6])


@pytest.mark.parametrize(
    "model,u",
    [(NS, U_NS), (NS, np.array([1.0, 0.1, 1.0])), (NS, np.array([1.0, -0.1, 1.0])), (MHD, U_MHD)],
)
def test_analytic_jacobian_matches_finite_differences(model, u):
    J = analytic_jacobian(model, u, layout_for(model, u))
    # central differences straddle the shock/rarefaction switch, so the error is O(step)
    np.testing.assert_allclose(fd_jacobian(model, u, 1e-5), J, atol=1e-4)


def test_single_lax_strength_taylor_check():
    r = lax_direction(NS, U_NS, 2, "GNL")
    ratios = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        s = np.array([0.0, 0.0, eps])
        ratios.append(np.max(np.abs(zeta_tot(NS, None, None, U_NS, s) - (U_NS + eps * r))) / eps**2)
    assert max(ratios) < 0.1
    assert max(ratios) / min(ratios) < 1.1


def test_partial_map_sizes_and_columns():
    out = zeta_par(NS, None, None, U_NS, np.zeros(2))
    np.testing.assert_array_equal(out, U_NS[1:])
    step = 1e-6
    cols = [
        (zeta_par(NS, None, None, U_NS, step * e) - zeta_par(NS, None, None, U_NS, -step * e)) / (2 * step)
        for e in np.eye(2)
    ]
    J = np.column_stack(cols)
    assert J.shape == (2, 2)
    np.testing.assert_allclose(J, analytic_jacobian(NS, U_NS, layout_for(NS, U_NS), partial=True), atol=1e-6)
    assert np.linalg.cond(J) < 1e3
    with pytest.raises(ValueError):
        zeta_par(NS, None, None, U_NS, np.zeros(3))


# --- solves ------------------------------------------------------------------------


def test_trivial_solution():
    u = np.array([1.0, 0.1, 1.0])
    sol = solve_boundary_riemann(NS, u, u)
    assert np.all(sol.strengths == 0.0)
    assert sol.residual <= 1e-12
    rep = admissibility_report(sol, NS)
    assert rep.discontinuities == []
    assert rep.all_pass


def test_doubly_characteristic_example():
    u_b = np.array([1.02, 0.01, 0.99])
    sol = solve_boundary_riemann(NS, U_NS, u_b)
    assert sol.regime is BoundaryRegime.FULL
    assert np.max(np.abs(zeta_tot(NS, None, None, U_NS, sol.strengths) - u_b)) <= 1e-8
    rep = admissibility_report(sol, NS)
    assert rep.all_pass, rep.summary()


def test_partial_regime_drops_density_condition():
    u_b = np.array([1.02, -0.01, 0.99])
    sol = solve_boundary_riemann(NS, U_NS, u_b)
    assert sol.regime is BoundaryRegime.PARTIAL
    assert len(sol.strengths) == 2
    np.testing.assert_allclose(sol.boundary_value[1:], u_b[1:], atol=1e-10)
    assert abs(sol.boundary_value[0] - u_b[0]) > 1e-3
    assert admissibility_report(sol, NS).all_pass


def test_amplitude_gate():
    with pytest.raises(AmplitudeTooLarge):
        solve_boundary_riemann(NS, U_NS, U_NS + np.array([0.3, 0.05, 0.0]))
    # the density gap is ignored when the boundary condition is partial
    sol = solve_boundary_riemann(NS, U_NS, U_NS + np.array([0.3, 0.0, 0.0]))
    assert sol.regime is BoundaryRegime.PARTIAL
    with pytest.raises(AmplitudeTooLarge):
        zeta_tot(NS, None, None, U_NS, np.array([0.0, 0.0, 0.5]))


def test_options_accept_a_mapping():
    sol = solve_boundary_riemann(NS, U_NS, np.array([1.01, 0.01, 1.0]), {"tol": 1e-11})
    assert sol.residual <= 1e-11
    assert RiemannOptions().strength_bound > RiemannOptions().delta


# --- admissibility ----------------------------------------------------------------


def test_zero_speed_contact_has_equal_fluxes():
    # characteristic strength only, at a state with vanishing velocity
    u_b = zeta_tot(NS, None, None, U_NS, np.array([0.0, 0.02, 0.0]))
    sol = solve_boundary_riemann(NS, U_NS, u_b)
    rep = admissibility_report(sol, NS)
    (contact,) = rep.discontinuities
    assert contact.speed == 0.0
    assert rep.zero_speed_flux_gap is not None and rep.zero_speed_flux_gap <= 1e-8
    assert rep.all_pass


def test_noncharacteristic_trace_equals_interior_side():
    u_i = np.array([1.0, 0.5, 1.0])
    sol = solve_boundary_riemann(NS, u_i, u_i + np.array([0.02, -0.01, 0.01]))
    np.testing.assert_array_equal(sol.trace, sol.underline)
    assert admissibility_report(sol, NS).all_pass


def test_mhd_contact_at_unit_density_is_admissible():
    # the symmetrized MHD matrices match the conservative flux at rho = 1;
    # the base state has inflow so iterates stay away from alpha = 0
    u_i = np.array([1.0, 0.5, 0.3, 0.2, 0.1, -0.2, 1.0])
    s = np.zeros(7)
    s[5] = 0.02
    u_b = zeta_tot(MHD, None, None, u_i, s)
    sol = solve_boundary_riemann(MHD, u_i, u_b)
    np.testing.assert_allclose(sol.strengths, s, atol=1e-7)
    rep = admissibility_report(sol, MHD)
    assert rep.rh_ok and rep.liu_ok and rep.all_pass


def test_mhd_solution_structure():
    u_b = U_MHD + np.array([0.01, 0.01, -0.01, 0.02, 0.01, 0.0, 0.01])
    sol = solve_boundary_riemann(MHD, U_MHD, u_b)
    assert sol.residual <= 1e-8
    rep = admissibility_report(sol, MHD)
    assert rep.speeds_ordered and rep.trace_ok and rep.boundary_ok
    families = [w.family for w in sol.pieces if w.kind != "BOUNDARY_LAYER"]
    assert families == sorted(families)


def test_newton_basin_navier_stokes():
    rng = np.random.default_rng(0)
    bases = [U_NS, np.array([1.0, 0.1, 1.0]), np.array([1.2, -0.1, 0.9])]
    for j in range(45):
        u_i = bases[j % 3]
        u_b = u_i + 0.05 * rng.uniform(-1, 1, 3)
        sol = solve_boundary_riemann(NS, u_i, u_b)
        assert sol.iterations <= 25 and sol.residual <= 1e-8
        rep = admissibility_report(sol, NS)
        assert rep.all_pass, (u_i, u_b, rep.summary())


@pytest.mark.slow
def test_newton_basin_mhd():
    rng = np.random.default_rng(0)
    for j in range(5):
        u_i = U_MHD + 0.02 * rng.uniform(-1, 1, 7) * (j % 2)
        u_b = u_i + 0.05 * rng.uniform(-1, 1, 7)
        sol = solve_boundary_riemann(MHD, u_i, u_b)
        assert sol.iterations <= 25 and sol.residual <= 1e-8
        rep = admissibility_report(sol, MHD)
        assert rep.speeds_ordered and rep.trace_ok and rep.boundary_ok


def test_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(10):
        s = rng.uniform(-0.02, 0.02, 3)
        u_b = zeta_tot(NS, None, None, U_NS, s)
        if u_b[1] <= 0:
            continue  # PARTIAL datum: the fast strength is not recoverable
        sol = solve_boundary_riemann(NS, U_NS, u_b)
        np.testing.assert_allclose(sol.strengths, s, atol=1e-7)


# --- the assembled solution -------------------------------------------------------------


@pytest.fixture(scope="module")
def shock_solution():
    return solve_boundary_riemann(NS, U_NS, np.array([1.03, 0.02, 1.01]))


def test_self_similarity(shock_solution):
    x = np.linspace(0.0, 3.0, 301)
    base = shock_solution.sample(0.7, x)
    for lam in (0.5, 2.0, 13.0):
        np.testing.assert_allclose(shock_solution.sample(0.7 * lam, lam * x), base, atol=1e-12)


def test_sample_far_field_is_interior_state(shock_solution):
    np.testing.assert_array_equal(shock_solution.sample(1.0, [100.0])[0], U_NS)
    with pytest.raises(ValueError):
        shock_solution.sample(0.0, [1.0])
    with pytest.raises(ValueError):
        shock_solution.sample(1.0, [-1.0])


def test_speeds_nondecreasing(shock_solution):
    speeds = [w.speed for w in shock_solution.pieces if w.kind != "BOUNDARY_LAYER"]
    assert speeds == sorted(speeds)
    assert min(speeds) >= 0.0


def test_total_variation_scales_with_amplitude():
    direction = np.array([1.0, 0.5, -0.7])
    ratios = []
    for amp in (0.04, 0.02, 0.01):
        sol = solve_boundary_riemann(NS, U_NS, U_NS + amp * direction)
        ratios.append(sol.total_variation() / amp)
    assert max(ratios) / min(ratios) < 1.05
