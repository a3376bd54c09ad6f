"""Steady boundary layers: fast/slow formulations, collocation and shooting.

Unknowns along a layer are ``v = (u, z2)`` with ``z2 = u2_x``.  Two
formulations are used:

* fast variable ``y`` with ``dx/dy = alpha(u)``; regular at ``alpha = 0``
  and the right choice when fast (``O(1/alpha)``) modes are present;
* physical variable ``x``; used when the layer has no fast component.

Both are discretized with the box scheme (midpoint collocation) on a
graded mesh and solved by damped Newton with a sparse Jacobian.  The far
boundary condition places ``v(L) - v_under`` in the stable subspace of the
linearization; the wall condition fixes chart coordinates along the layer
directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .model_core import Model
from .spectral import LayerDirections, pencil_roots


class NewtonFail(ArithmeticError):
    pass


class TruncationTooShort(ArithmeticError):
    pass


class NonPositiveAlpha(ValueError):
    pass


class AlphaSign(str, Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"
    ZERO = "ZERO"
    SIGN_CHANGE = "SIGN_CHANGE"


@dataclass
class LayerProfile:
    grid_y: np.ndarray
    v: np.ndarray  # rows (u, z2, sigma)
    grid_x: np.ndarray | None
    end_state: np.ndarray
    boundary_value: np.ndarray
    decay_rate: float
    form: str = "fast"
    rates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    newton_iterations: int = 0

    @property
    def states(self) -> np.ndarray:
        return self.v[:, : len(self.end_state)]

    def z2(self) -> np.ndarray:
        N = len(self.end_state)
        return self.v[:, N:-1]

    def sample_x(self, x: np.ndarray, model: Model) -> np.ndarray:
        """Cubic Hermite interpolation of u at physical positions ``x``."""
        if self.grid_x is None:
            raise NonPositiveAlpha("profile has no physical grid")
        h = model.h
        u = self.states
        dudx = np.empty_like(u)
        for j, (uj, zj) in enumerate(zip(u, self.z2())):
            dudx[j, h:] = zj
            a = float(model.alpha(uj))
            if abs(a) > 0:
                dudx[j, :h] = -np.linalg.solve(model.E11(uj), model.A21(uj).T @ zj) / a
            else:
                dudx[j, :h] = 0.0
        gx = self.grid_x
        finite = np.isfinite(gx)
        spline = CubicHermiteSpline(gx[finite], u[finite], dudx[finite], axis=0)
        x = np.asarray(x, dtype=float)
        out = spline(np.clip(x, gx[finite][0], gx[finite][-1]))
        out[x > gx[finite][-1]] = self.end_state
        return out


# ---------------------------------------------------------------------------
# vector fields


def _blocks(model: Model, u: np.ndarray):
    h = model.h
    E, A, B = model.E(u), model.A(u), model.B(u)
    return E[:h, :h], E[h:, h:], A[h:, :h], A[h:, h:], B[h:, h:], float(model.alpha(u))


def _g_terms_fast(model: Model, u: np.ndarray, u1_y: np.ndarray, z2: np.ndarray, alpha: float) -> np.ndarray:
    """(alpha - sigma) G(u, u_x) u_x in the u2 rows, written in fast-variable terms.

    Uses that the hyperbolic columns of G vanish, which removes the only
    term that would be singular at alpha = 0.
    """
    h, N = model.h, model.N
    d1 = np.zeros(N)
    d1[:h] = u1_y
    d2 = np.zeros(N)
    d2[h:] = z2
    mixed = np.zeros(N)
    mixed[:h] = u1_y
    mixed[h:] = alpha * z2
    out = model.G(u, d1) @ d2 + model.G(u, d2) @ mixed
    return out[h:]


def fast_rhs(model: Model, v: np.ndarray) -> np.ndarray:
    """Right-hand side of the fast system dv/dy for v = (u, z2, sigma).

    Regular at alpha = sigma; every (u, 0, sigma) is an equilibrium.
    """
    v = np.asarray(v, dtype=float)
    N, h = model.N, model.h
    u, z2, sigma = v[:N], v[N:-1], float(v[-1])
    E11, E22, A21, A22, B22, alpha = _blocks(model, u)
    shift = alpha - sigma
    u1_y = -np.linalg.solve(E11, A21.T @ z2)
    u2_y = shift * z2
    rhs = A21 @ u1_y + shift * (A22 - sigma * E22) @ z2
    rhs = rhs - _g_terms_fast(model, u, u1_y, z2, shift)
    z2_y = np.linalg.solve(B22, rhs)
    return np.concatenate([u1_y, u2_y, z2_y, [0.0]])


def _residual(model: Model, form: str, v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Cell residual at midpoint state ``v`` with difference quotient ``p``."""
    return _residual_batch(model, form, np.asarray(v)[None, :], np.asarray(p)[None, :])[0]


def _residual_batch(model: Model, form: str, v: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Row-wise cell residuals for stacked midpoint states and quotients."""
    N, h = model.N, model.h
    u, z2 = v[:, :N], v[:, N:]
    u1p, u2p, z2p = p[:, :h], p[:, h:N], p[:, N:]
    E, A, B = model.E(u), model.A(u), model.B(u)
    E11, A21, A22, B22 = E[:, :h, :h], A[:, h:, :h], A[:, h:, h:], B[:, h:, h:]
    alpha = np.asarray(model.alpha(u), dtype=float)[:, None]
    coupling = np.einsum("kji,kj->ki", A21, z2)  # A21^T z2
    hyper = np.einsum("kij,kj->ki", A21, u1p)
    if form == "fast":
        r1 = np.einsum("kij,kj->ki", E11, u1p) + coupling
        r2 = u2p - alpha * z2
        d1 = np.zeros_like(u)
        d1[:, :h] = u1p
        d2 = np.zeros_like(u)
        d2[:, h:] = z2
        mixed = d1.copy()
        mixed[:, h:] = alpha * z2
        g = np.einsum("kij,kj->ki", model.G(u, d1), d2) + np.einsum("kij,kj->ki", model.G(u, d2), mixed)
        r3 = np.einsum("kij,kj->ki", B22, z2p) - hyper - alpha * np.einsum("kij,kj->ki", A22, z2) + g[:, h:]
    else:
        r1 = alpha * np.einsum("kij,kj->ki", E11, u1p) + coupling
        r2 = u2p - z2
        ux = np.concatenate([u1p, z2], axis=1)
        g = np.einsum("kij,kj->ki", model.G(u, ux), ux)
        r3 = np.einsum("kij,kj->ki", B22, z2p) - hyper - np.einsum("kij,kj->ki", A22, z2) + g[:, h:]
    return np.concatenate([r1, r2, r3], axis=1)


def steady_residual(model: Model, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """A u' - B u'' - G(u, u') u' at interior nodes by central differences (nonuniform)."""
    out = np.zeros((len(x) - 2, model.N))
    for j in range(1, len(x) - 1):
        hl, hr = x[j] - x[j - 1], x[j + 1] - x[j]
        d1 = (hl**2 * (u[j + 1] - u[j]) + hr**2 * (u[j] - u[j - 1])) / (hl * hr * (hl + hr))
        d2 = 2 * (hl * (u[j + 1] - u[j]) - hr * (u[j] - u[j - 1])) / (hl * hr * (hl + hr))
        uj = u[j]
        out[j - 1] = model.A(uj) @ d1 - model.B(uj) @ d2 - model.G(uj, d1) @ d1
    return out


# ---------------------------------------------------------------------------
# linearization and meshes


def _linearization(model: Model, form: str, v0: np.ndarray, step: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """(R_v, R_p) at the equilibrium (v0, p = 0)."""
    m = len(v0)
    zero = np.zeros(m)
    Rv = np.empty((m, m))
    Rp = np.empty((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = step
        Rv[:, j] = (_residual(model, form, v0 + e, zero) - _residual(model, form, v0 - e, zero)) / (2 * step)
        Rp[:, j] = (_residual(model, form, v0, e) - _residual(model, form, v0, -e)) / (2 * step)
    return Rv, Rp


def stable_subspace(model: Model, form: str, u_under: np.ndarray, rel_tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Real basis of the decaying modes of the linearized layer system and their rates."""
    m = 2 * model.N - model.h
    v0 = np.concatenate([u_under, np.zeros(m - model.N)])
    Rv, Rp = _linearization(model, form, v0)
    w, vr = sla.eig(-Rv, Rp)
    finite = np.isfinite(w)
    scale = max(1.0, float(np.max(np.abs(w[finite]), initial=1.0)))
    keep = finite & (w.real < -rel_tol * scale)
    rates = w[keep]
    if np.any(np.abs(rates.imag) > 1e-8 * scale):
        basis = np.concatenate([vr[:, keep].real, vr[:, keep].imag], axis=1)
        basis = sla.orth(basis)
    else:
        basis = vr[:, keep].real
    order = np.argsort(rates.real)
    return basis[:, order] if basis.shape[1] == len(rates) else basis, rates.real[order]


def graded_mesh(length: float, h0: float, growth: float = 1.08, min_nodes: int = 40) -> np.ndarray:
    """Mesh on [0, length] with first step h0 and geometric growth."""
    h0 = min(h0, length / min_nodes)
    steps = [h0]
    while sum(steps) < length:
        steps.append(steps[-1] * growth)
    x = np.concatenate([[0.0], np.cumsum(steps)])
    x *= length / x[-1]
    if len(x) < min_nodes:
        x = np.linspace(0.0, length, min_nodes)
    return x


# ---------------------------------------------------------------------------
# collocation


def _assemble(model, form, grid, V, bc0, bcL):
    """Residual and sparse Jacobian of the discrete two-point problem."""
    n_nodes, m = V.shape
    n_cells = n_nodes - 1
    step = 1e-7
    dy = np.diff(grid)[:, None]
    vbar = 0.5 * (V[1:] + V[:-1])
    p = (V[1:] - V[:-1]) / dy
    hv = step * np.maximum(1.0, np.abs(vbar))
    hp = step * np.maximum(1.0, np.abs(p))
    eye = np.eye(m)
    # one batch: base point, then m perturbations of v, then m of p, per cell
    vb = np.concatenate([vbar[:, None, :], vbar[:, None, :] + hv[:, :, None] * eye, np.repeat(vbar[:, None, :], m, axis=1)], axis=1)
    pb = np.concatenate([p[:, None, :], np.repeat(p[:, None, :], m, axis=1), p[:, None, :] + hp[:, :, None] * eye], axis=1)
    R = _residual_batch(model, form, vb.reshape(-1, m), pb.reshape(-1, m)).reshape(n_cells, 2 * m + 1, m)
    r0 = R[:, 0]
    dRv = np.swapaxes((R[:, 1 : m + 1] - r0[:, None, :]) / hv[:, :, None], 1, 2)
    dRp = np.swapaxes((R[:, m + 1 :] - r0[:, None, :]) / hp[:, :, None], 1, 2)
    left = 0.5 * dRv - dRp / dy[:, :, None]
    right = 0.5 * dRv + dRp / dy[:, :, None]

    F = np.empty(n_nodes * m)
    F[: n_cells * m] = r0.ravel()
    local_r = np.repeat(np.arange(m), m)
    local_c = np.tile(np.arange(m), m)
    offs = (np.arange(n_cells) * m)[:, None]
    rows = [(offs + local_r).ravel(), (offs + local_r).ravel()]
    cols = [(offs + local_c).ravel(), (offs + m + local_c).ravel()]
    vals = [left.reshape(n_cells, -1).ravel(), right.reshape(n_cells, -1).ravel()]
    base = n_cells * m
    val0, jac0 = bc0(V[0])
    valL, jacL = bcL(V[-1])
    k0 = len(val0)
    F[base : base + k0] = val0
    F[base + k0 :] = valL
    rows.append(np.repeat(base + np.arange(k0), m))
    cols.append(np.tile(np.arange(m), k0))
    vals.append(np.asarray(jac0).ravel())
    kL = len(valL)
    rows.append(np.repeat(base + k0 + np.arange(kL), m))
    cols.append(np.tile(np.arange(n_cells * m, n_nodes * m), kL))
    vals.append(np.asarray(jacL).ravel())
    J = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n_nodes * m, n_nodes * m))
    return F, J


def _choose_form(model: Model, u_under: np.ndarray, fast: np.ndarray) -> str:
    alpha = float(model.alpha(u_under))
    if alpha > 0 or (alpha == 0 and np.any(fast != 0)):
        return "fast"
    return "slow"


def compute_layer(
    model: Model,
    spectral,
    dirs: LayerDirections | None,
    u_under: np.ndarray,
    strengths,
    L: float | None = None,
    n: int | None = None,
    s_char: float = 0.0,
    form: str | None = None,
    tol: float = 1e-11,
    max_iter: int = 30,
    fast_only: bool = False,
    grid: np.ndarray | None = None,
) -> LayerProfile:
    """Boundary layer ending at ``u_under`` with prescribed strengths.

    ``strengths`` lists the h fast strengths followed by one slow strength
    per negative non-characteristic pencil root.  ``s_char`` is the strength
    along the characteristic direction, admissible only when the
    characteristic root is negative.  ``fast_only`` keeps only the h
    fastest decaying modes, which traces the strong stable fiber of
    ``u_under`` and treats slow modes as frozen.  An explicit ``grid``
    overrides ``L`` and ``n``.  Returns the profile with
    ``boundary_value = u(0)``.
    """
    u_under = np.asarray(u_under, dtype=float)
    N, h = model.N, model.h
    m = 2 * N - h
    dirs = dirs if dirs is not None else pencil_roots(model, u_under)
    strengths = np.asarray(strengths, dtype=float)
    fast, slow = strengths[:h], strengths[h:]
    if len(slow) != len(dirs.q_dirs) and not (fast_only and not np.any(slow)):
        raise ValueError(f"expected {h + len(dirs.q_dirs)} strengths, got {len(strengths)}")
    form = form or _choose_form(model, u_under, fast)
    if form == "slow" and np.any(fast != 0):
        raise NonPositiveAlpha("fast strengths require alpha(u_under) > 0")
    v_under = np.concatenate([u_under, np.zeros(m - N)])

    basis, rates = stable_subspace(model, form, u_under)
    if fast_only:
        if form != "fast" or np.any(slow != 0) or s_char != 0.0:
            raise ValueError("fast_only layers take fast strengths in the fast form")
        basis, rates = basis[:, :h], rates[:h]
        slow = np.zeros(0)
    columns, coords = [], []
    # with alpha > 0 the fast modes decay in either form; their chart
    # coordinates are the fast strengths (zero for slow layers)
    if form == "fast" or float(model.alpha(u_under)) > 0:
        columns += list(dirs.s_dirs)
        coords += list(fast)
    if not fast_only:
        columns += list(dirs.q_dirs)
        coords += list(slow)
    char_rate = dirs.char_root * (float(model.alpha(u_under)) if form == "fast" else 1.0)
    if not fast_only and dirs.char_root < 0 and char_rate < 0:
        columns.append(dirs.v_k)
        coords.append(s_char)
    elif s_char != 0.0:
        raise ValueError("characteristic strength given but the characteristic mode does not decay")
    if basis.shape[1] != len(columns):
        raise ArithmeticError(f"stable subspace has dimension {basis.shape[1]}, chart has {len(columns)} directions")
    coords = np.asarray(coords, dtype=float)
    if not np.any(coords) and s_char == 0.0:
        y = np.array([0.0, 1.0])
        v = np.tile(np.concatenate([v_under, [0.0]]), (2, 1))
        gx = y.copy() if form == "slow" or float(model.alpha(u_under)) > 0 else None
        return LayerProfile(y, v, gx, u_under.copy(), u_under.copy(), 0.0, form, rates)

    D = np.column_stack(columns)
    chart = np.linalg.pinv(D)
    complement = sla.null_space(basis.T).T  # rows annihilate the stable subspace

    slowest = float(np.min(np.abs(rates)))
    fastest = float(np.max(np.abs(rates)))
    if grid is None:
        L = L if L is not None else min(40.0 / slowest, 1e7 / fastest)
        grid = graded_mesh(L, 0.03 / fastest, growth=1.06 if n is None else np.exp(np.log(1e4) / n))
    else:
        grid = np.asarray(grid, dtype=float)

    def bc0(v0):
        return chart @ (v0[:N] - u_under) - coords, np.concatenate([chart, np.zeros((len(coords), m - N))], axis=1)

    def bcL(vL):
        return complement @ (vL - v_under), complement

    # linear-mode initial guess
    M = chart @ basis[:N]
    amp = np.linalg.solve(M, coords)
    V = v_under + (np.exp(np.outer(grid, rates)) * amp) @ basis.T

    converged = False
    for it in range(1, max_iter + 1):
        F, J = _assemble(model, form, grid, V, bc0, bcL)
        norm = float(np.max(np.abs(F)))
        if norm <= tol:
            converged = True
            break
        delta = spla.spsolve(J, -F).reshape(V.shape)
        lam = 1.0
        while lam > 1e-3:
            trial = V + lam * delta
            try:
                model.check_state(trial[:, :N])
                Ft, _ = _assemble_residual_only(model, form, grid, trial, bc0, bcL)
                if np.max(np.abs(Ft)) < (1 - 0.25 * lam) * norm or norm < 1e-8:
                    break
            except ValueError:
                pass
            lam *= 0.5
        V = V + lam * delta
        if np.max(np.abs(lam * delta)) < 1e-14 * max(1.0, float(np.max(np.abs(V)))):
            converged = True
            break
    if not converged:
        raise NewtonFail(f"collocation residual {norm:.3e} after {max_iter} iterations")

    amplitude = float(np.max(np.abs(V[0, :N] - u_under)))
    tail = float(np.max(np.abs(V[-1, :N] - u_under)))
    if amplitude > 0 and tail > 1e-6 * amplitude + 1e-13:
        raise TruncationTooShort(f"|u(L) - u_under| = {tail:.3e}; increase L")
    v = np.concatenate([V, np.zeros((len(grid), 1))], axis=1)
    profile = LayerProfile(grid, v, None, u_under.copy(), V[0, :N].copy(), 0.0, form, rates, it)
    if form == "slow":
        profile.grid_x = grid.copy()
    elif float(model.alpha(V[0, :N])) > 0:
        profile = slow_to_physical(profile, model)
    profile.decay_rate = fit_decay_rate(profile, model)
    return profile


def _assemble_residual_only(model, form, grid, V, bc0, bcL):
    dy = np.diff(grid)[:, None]
    cells = _residual_batch(model, form, 0.5 * (V[1:] + V[:-1]), (V[1:] - V[:-1]) / dy)
    val0, _ = bc0(V[0])
    valL, _ = bcL(V[-1])
    return np.concatenate([cells.ravel(), val0, valL]), None


def fit_decay_rate(profile: LayerProfile, model: Model) -> float:
    """Exponential rate of |u - u_under| over the tail, in physical units."""
    grid = profile.grid_x if profile.grid_x is not None else profile.grid_y
    dev = np.max(np.abs(profile.states - profile.end_state), axis=1)
    amp = dev[0]
    if amp == 0:
        return 0.0
    mask = (dev < 1e-2 * amp) & (dev > 1e-9 * amp) & np.isfinite(grid)
    if np.sum(mask) < 3:
        mask = (dev > 1e-12 * amp) & np.isfinite(grid)
        mask[0] = False
    if np.sum(mask) < 2:
        return 0.0
    slope = np.polyfit(grid[mask], np.log(dev[mask]), 1)[0]
    return float(slope)


def slow_to_physical(profile: LayerProfile, model: Model, horizon: float = 0.0) -> LayerProfile:
    """Attach x(y) = int_0^y alpha(u) dy by the trapezoid rule."""
    u = profile.states
    alpha = np.asarray(model.alpha(u), dtype=float)
    if alpha[0] <= 0:
        raise NonPositiveAlpha(f"alpha(u(0)) = {alpha[0]:.3e} is not positive")
    y = profile.grid_y
    x = np.concatenate([[0.0], np.cumsum(0.5 * (alpha[1:] + alpha[:-1]) * np.diff(y))])
    if x[-1] < horizon:
        raise TruncationTooShort(f"physical extent {x[-1]:.3e} below horizon {horizon:.3e}")
    profile.grid_x = x
    return profile


def alpha_sign_diagnostic(profile, model: Model | None = None, tol: float = 0.0) -> AlphaSign:
    """Sign class of alpha along a profile (LayerProfile or an array of alpha values)."""
    if isinstance(profile, LayerProfile):
        if model is None:
            raise ValueError("a model is needed to evaluate alpha on a profile")
        alpha = np.asarray(model.alpha(profile.states), dtype=float)
    else:
        alpha = np.asarray(profile, dtype=float)
    pos = alpha > tol
    neg = alpha < -tol
    if np.all(~pos & ~neg):
        return AlphaSign.ZERO
    if np.all(pos):
        return AlphaSign.POSITIVE
    if np.all(neg):
        return AlphaSign.NEGATIVE
    if np.any(pos) and np.any(neg):
        return AlphaSign.SIGN_CHANGE
    # zero somewhere and one sign elsewhere
    return AlphaSign.SIGN_CHANGE


def alpha_lower_bound(alpha0: float, m: float, y: np.ndarray) -> np.ndarray:
    """Comparison bound alpha0 / (m y alpha0 + 1) for profiles with d(alpha)/dy >= -m alpha^2."""
    return alpha0 / (m * y * alpha0 + 1.0)


# ---------------------------------------------------------------------------
# shooting for one-dimensional fast layers


def fast_layer_shoot(
    model: Model,
    u_under: np.ndarray,
    s_fast: float,
    s_dir: np.ndarray | None = None,
    rtol: float = 1e-11,
) -> np.ndarray:
    """Boundary value of the fast layer with h = 1 by backward shooting.

    The strong stable manifold of (u_under, 0) is a curve; it is traced
    backward in y from a point on its tangent until the chart coordinate
    along ``s_dir`` reaches ``s_fast``.
    """
    if model.h != 1:
        raise ValueError("shooting covers h = 1 only")
    u_under = np.asarray(u_under, dtype=float)
    if s_fast == 0.0:
        return u_under.copy()
    N = model.N
    basis, rates = stable_subspace(model, "fast", u_under)
    if basis.shape[1] == 0:
        raise ArithmeticError("no decaying mode at the base state")
    # slow modes also decay when alpha > 0; the layer follows the fastest
    e = basis[:, 0]
    if s_dir is None:
        s_dir = pencil_roots(model, u_under).s_dirs[0]
    chart = s_dir / (s_dir @ s_dir)
    proj = chart @ e[:N]
    e = e / proj  # unit chart coordinate
    rate = rates[0]
    eps = 1e-4 * s_fast  # proportional offset keeps the map smooth in s_fast
    start = np.concatenate([u_under + eps * e[:N], eps * e[N:], [0.0]])

    def rhs(_, v):
        return -fast_rhs(model, v)

    def event(_, v):
        return chart @ (v[:N] - u_under) - s_fast

    event.terminal = True
    span = 5.0 * np.log(abs(s_fast / eps)) / abs(rate) + 10.0 / abs(rate)
    sol = solve_ivp(rhs, (0.0, span), start, method="DOP853", rtol=rtol, atol=1e-13 * abs(s_fast), events=event)
    if not sol.t_events[0].size:
        raise NewtonFail("shooting did not reach the requested strength")
    return sol.y_events[0][0][:N]
