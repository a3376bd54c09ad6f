"""Boundary Riemann problem: wave-curve composition, inversion and assembly.

The strength vector is laid out as

    (fast strengths [h], slow strengths [one per negative non-characteristic
     pencil root], characteristic strength, Lax strengths for k+1..N)

and ``zeta_tot`` maps it to the boundary value of the composed pattern:
Lax curves are applied to the interior state starting from family N, then
the characteristic curve, then a slow layer and finally a fast layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import boundary_layer as bl
from .model_core import BoundaryRegime, Model, beta_map
from .spectral import eig_EA, pencil_roots
from .wave_curves import (
    DEFAULT_DELTA,
    AmplitudeTooLarge,
    Wave,
    characteristic_tangent,
    classify_family,
    lax_curve,
    lax_direction,
    liu_check,
    rh_residual,
    zeta_k,
)


class NewtonFail(ArithmeticError):
    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class RiemannOptions:
    delta: float = DEFAULT_DELTA  # gate on |beta(u_i, u_b)|
    # Gate on individual strengths; they exceed state gaps by up to about 3x
    # because genuinely nonlinear directions are scaled by grad(lambda).r = 1.
    strength_bound: float = 3 * DEFAULT_DELTA
    tol: float = 1e-10
    max_iter: int = 25
    n_curve: int = 32
    fast_method: str = "auto"  # "shoot", "collocation" or "auto"
    build_profiles: bool = False


@dataclass
class Layout:
    """Positions of each strength group inside the strength vector."""

    N: int
    h: int
    n_slow: int
    k: int

    @property
    def fast(self) -> slice:
        return slice(0, self.h)

    @property
    def slow(self) -> slice:
        return slice(self.h, self.h + self.n_slow)

    @property
    def char(self) -> int:
        return self.h + self.n_slow

    @property
    def lax(self) -> slice:
        return slice(self.char + 1, self.N)

    @property
    def lax_families(self) -> range:
        return range(self.k + 1, self.N)


def layout_for(model: Model, u: np.ndarray) -> Layout:
    u = np.asarray(u, dtype=float)
    spec = eig_EA(model, u)
    dirs = pencil_roots(model, u)
    lay = Layout(model.N, model.h, len(dirs.q_dirs), spec.k)
    if lay.h + lay.n_slow + 1 + len(lay.lax_families) != model.N:
        raise ArithmeticError(
            f"strength count mismatch: h={lay.h}, slow={lay.n_slow}, k={lay.k}, N={model.N}"
        )
    return lay


@dataclass
class Composition:
    """Intermediate states and pattern pieces of one evaluation of the composed map."""

    states: dict
    waves: list  # left to right
    layers: list = field(default_factory=list)


def _apply_lax(model, u_i, s, lay, n_curve, delta):
    state = np.asarray(u_i, dtype=float)
    waves: list[Wave] = []
    # family N sits next to u_i, so it is applied first
    for idx, fam in reversed(list(zip(range(lay.lax.start, lay.lax.stop), lay.lax_families))):
        res = lax_curve(model, None, fam, state, float(s[idx]), n=n_curve, delta=delta)
        waves = res.wave_pattern + waves
        state = res.end_state
    return state, waves


def _slow_layer(model, p0, s_slow):
    if len(s_slow) == 0 or not np.any(s_slow):
        return np.asarray(p0, dtype=float).copy(), None
    prof = bl.compute_layer(model, None, None, p0, np.concatenate([np.zeros(model.h), s_slow]), form="slow")
    return prof.boundary_value, prof


def _fast_layer(model, p1, s_fast, method):
    if not np.any(s_fast):
        return np.asarray(p1, dtype=float).copy(), None
    if method == "auto":
        method = "shoot" if model.h == 1 else "collocation"
    if method == "shoot":
        return bl.fast_layer_shoot(model, p1, float(s_fast[0])), None
    prof = bl.compute_layer(model, None, None, p1, s_fast, form="fast", fast_only=True)
    return prof.boundary_value, prof


def compose(model: Model, u_i, s, lay: Layout, opts: RiemannOptions, partial: bool = False) -> Composition:
    """Evaluate the composed map and keep the pieces."""
    s = np.asarray(s, dtype=float)
    bound = opts.strength_bound
    if np.max(np.abs(s), initial=0.0) > bound:
        raise AmplitudeTooLarge(f"strength {np.max(np.abs(s)):.3g} exceeds {bound}")
    u_tilde, lax_waves = _apply_lax(model, u_i, s, lay, opts.n_curve, bound)
    char = zeta_k(model, None, u_tilde, float(s[lay.char]), n=opts.n_curve, delta=bound)
    p0 = char.end_state
    p1, slow_prof = _slow_layer(model, p0, s[lay.slow])
    layers = []
    waves = list(char.wave_pattern) + lax_waves
    if slow_prof is not None or not np.allclose(p1, p0):
        layers.append(Wave("BOUNDARY_LAYER", p1, p0, 0.0, 0.0, -1, profile={"layer": slow_prof}))
    p2 = p1
    if not partial:
        p2, fast_prof = _fast_layer(model, p1, s[lay.fast], opts.fast_method)
        if not np.allclose(p2, p1, atol=0.0, rtol=0.0):
            layers.insert(0, Wave("BOUNDARY_LAYER", p2, p1, 0.0, 0.0, -1, profile={"layer": fast_prof, "fast": True}))
    states = {
        "u_i": np.asarray(u_i, dtype=float),
        "u_tilde": u_tilde,
        "trace": char.trace_state,
        "underline": char.underline_state,
        "p0": p0,
        "p1": p1,
        "boundary": p2,
    }
    return Composition(states, layers + waves, layers)


def zeta_tot(model: Model, spectral, dirs, u_i, s, opts: RiemannOptions | None = None, layout: Layout | None = None) -> np.ndarray:
    """Boundary value reached from ``u_i`` with strengths ``s`` (FULL regime, length N)."""
    opts = opts or RiemannOptions()
    lay = layout or layout_for(model, u_i)
    s = np.asarray(s, dtype=float)
    if len(s) != model.N:
        raise ValueError(f"expected {model.N} strengths")
    return compose(model, u_i, s, lay, opts).states["boundary"]


def zeta_par(model: Model, spectral, dirs, u_i, s, opts: RiemannOptions | None = None, layout: Layout | None = None) -> np.ndarray:
    """Parabolic components of the boundary value without fast layers (length N - h)."""
    opts = opts or RiemannOptions()
    lay = layout or layout_for(model, u_i)
    s = np.asarray(s, dtype=float)
    if len(s) != model.N - model.h:
        raise ValueError(f"expected {model.N - model.h} strengths")
    full = np.concatenate([np.zeros(model.h), s])
    return compose(model, u_i, full, lay, opts, partial=True).states["boundary"][model.h :]


def analytic_jacobian(model: Model, u: np.ndarray, lay: Layout, partial: bool = False) -> np.ndarray:
    """Zero-strength Jacobian: fast directions, q directions, characteristic tangent, Lax eigenvectors."""
    u = np.asarray(u, dtype=float)
    dirs = pencil_roots(model, u)
    cols = [] if partial else list(_fast_columns(model, u, dirs))
    cols += list(dirs.q_dirs)
    cols.append(characteristic_tangent(model, u))
    for fam in lay.lax_families:
        cols.append(lax_direction(model, u, fam, classify_family(model, u, fam)))
    J = np.column_stack(cols)
    return J[model.h :] if partial else J


def _fast_columns(model: Model, u: np.ndarray, dirs) -> np.ndarray:
    """Boundary-value derivatives in the fast strengths.

    A fast layer leaves u along its fastest decaying modes, scaled so the
    chart along the s directions reads the strength; at alpha = 0 these
    modes are the s directions themselves.
    """
    S = np.column_stack(dirs.s_dirs)
    basis, _ = bl.stable_subspace(model, "fast", u)
    modes = basis[: model.N, : model.h]
    chart = np.linalg.pinv(S)
    return np.linalg.solve((chart @ modes).T, modes.T)


# ---------------------------------------------------------------------------
# solution object


@dataclass
class SelfSimilarSolution:
    pieces: list  # Wave objects, left to right
    strengths: np.ndarray
    trace: np.ndarray
    underline: np.ndarray
    u_i: np.ndarray
    u_b: np.ndarray
    boundary_value: np.ndarray
    regime: BoundaryRegime
    residual: float
    iterations: int
    states: dict = field(default_factory=dict)

    def moving_waves(self) -> list[Wave]:
        return [w for w in self.pieces if w.kind != "BOUNDARY_LAYER" and max(w.speed_left, w.speed_right) > 0]

    def discontinuities(self) -> list[Wave]:
        return [w for w in self.pieces if w.is_jump and not np.allclose(w.left, w.right, atol=1e-15, rtol=0)]

    def sample(self, t: float, x) -> np.ndarray:
        """State at (t, x), x >= 0, t > 0; a function of x / t only."""
        if t <= 0:
            raise ValueError("t must be positive")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise ValueError("x must be nonnegative")
        out = np.empty((len(x), len(self.u_i)))
        waves = self.moving_waves()
        for j, xi in enumerate(x / t):
            out[j] = self._state_at(xi, waves)
        return out

    def _state_at(self, xi: float, waves: list[Wave]) -> np.ndarray:
        for w in waves:
            if xi < w.speed_left:
                return w.left
            if w.kind == "RAREFACTION" and xi < w.speed_right:
                return _fan_state(w, xi)
        return self.u_i

    def total_variation(self) -> float:
        """Total variation in x of sample(t, .) for t > 0 (independent of t)."""
        tv = 0.0
        for w in self.moving_waves():
            if w.kind == "RAREFACTION" and w.fan_states is not None:
                tv += float(np.sum(np.abs(np.diff(w.fan_states, axis=0))))
            else:
                tv += float(np.sum(np.abs(w.right - w.left)))
        return tv


def _fan_state(w: Wave, xi: float) -> np.ndarray:
    speeds = w.fan_speeds
    j = int(np.searchsorted(speeds, xi))
    j = min(max(j, 1), len(speeds) - 1)
    lo, hi = speeds[j - 1], speeds[j]
    theta = 0.0 if hi == lo else (xi - lo) / (hi - lo)
    return (1 - theta) * w.fan_states[j - 1] + theta * w.fan_states[j]


# ---------------------------------------------------------------------------
# solver


def _newton(func, x0, J0, tol, max_iter, fd_step=1e-7):
    """Quasi-Newton with a frozen initial Jacobian refreshed by Broyden updates.

    Falls back to a finite-difference Jacobian when progress stalls.
    """
    x = np.array(x0, dtype=float)
    F = func(x)
    J = np.array(J0, dtype=float)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    for it in range(1, max_iter + 1):
        if norm <= tol:
            return x, norm, it - 1
        dx = np.linalg.solve(J, -F)
        x_new = x + dx
        F_new = func(x_new)
        new_norm = float(np.max(np.abs(F_new)))
        if new_norm > 0.5 * norm:
            # refresh with a finite-difference Jacobian at the current iterate
            J = np.empty_like(J)
            for c in range(len(x)):
                e = np.zeros(len(x))
                e[c] = fd_step
                J[:, c] = (func(x + e) - F) / fd_step
            dx = np.linalg.solve(J, -F)
            x_new = x + dx
            F_new = func(x_new)
            new_norm = float(np.max(np.abs(F_new)))
        else:
            dF = F_new - F
            J = J + np.outer(dF - J @ dx, dx) / (dx @ dx)
        x, F, norm = x_new, F_new, new_norm
        history.append(norm)
    if norm <= tol:
        return x, norm, max_iter
    raise NewtonFail(f"residual {norm:.3e} after {max_iter} iterations", norm, max_iter)


def solve_boundary_riemann(model: Model, u_i, u_b, opts: RiemannOptions | dict | None = None) -> SelfSimilarSolution:
    """Self-similar solution whose boundary layers reach ``u_b`` and interior state is ``u_i``."""
    if isinstance(opts, dict):
        opts = RiemannOptions(**opts)
    opts = opts or RiemannOptions()
    u_i = np.asarray(u_i, dtype=float)
    u_b = np.asarray(u_b, dtype=float)
    gap = float(np.max(np.abs(beta_map(u_i, u_b, model))))
    if gap >= opts.delta:
        raise AmplitudeTooLarge(f"|beta(u_i, u_b)| = {gap:.3g} exceeds {opts.delta}")
    lay = layout_for(model, u_i)
    regime = model.regime(u_b)
    h = model.h
    if regime is BoundaryRegime.FULL:

        def residual(s):
            return compose(model, u_i, s, lay, opts).states["boundary"] - u_b

        J0 = analytic_jacobian(model, u_i, lay)
        s0 = np.zeros(model.N)
    else:

        def residual(s):
            full = np.concatenate([np.zeros(h), s])
            return compose(model, u_i, full, lay, opts, partial=True).states["boundary"][h:] - u_b[h:]

        J0 = analytic_jacobian(model, u_i, lay, partial=True)
        s0 = np.zeros(model.N - h)
    s, res, its = _newton(residual, s0, J0, opts.tol, opts.max_iter)
    full = s if regime is BoundaryRegime.FULL else np.concatenate([np.zeros(h), s])
    comp = compose(model, u_i, full, lay, opts, partial=regime is BoundaryRegime.PARTIAL)
    if opts.build_profiles:
        _attach_profiles(model, comp, full, lay)
    return SelfSimilarSolution(
        pieces=comp.waves,
        strengths=s,
        trace=comp.states["trace"],
        underline=comp.states["underline"],
        u_i=u_i,
        u_b=u_b,
        boundary_value=comp.states["boundary"],
        regime=regime,
        residual=res,
        iterations=its,
        states=comp.states,
    )


def _attach_profiles(model, comp, s, lay):
    """Replace shot fast layers by collocated profiles for output."""
    for w in comp.layers:
        prof = w.profile or {}
        if prof.get("fast") and prof.get("layer") is None:
            prof["layer"] = bl.compute_layer(model, None, None, w.right, s[lay.fast], form="fast", fast_only=True)


# ---------------------------------------------------------------------------
# admissibility


@dataclass
class DiscontinuityCheck:
    left: np.ndarray
    right: np.ndarray
    speed: float
    family: int
    kind: str
    rh_residual: float
    liu_ok: bool
    liu_excess: float


@dataclass
class AdmissibilityReport:
    discontinuities: list
    zero_speed_flux_gap: float | None
    trace_ok: bool
    boundary_ok: bool
    boundary_gap: float
    speeds_ordered: bool
    rh_tol: float = 1e-8

    @property
    def rh_ok(self) -> bool:
        return all(d.rh_residual <= self.rh_tol for d in self.discontinuities)

    @property
    def liu_ok(self) -> bool:
        return all(d.liu_ok for d in self.discontinuities)

    @property
    def all_pass(self) -> bool:
        flux_ok = self.zero_speed_flux_gap is None or self.zero_speed_flux_gap <= self.rh_tol
        return self.rh_ok and self.liu_ok and flux_ok and self.trace_ok and self.boundary_ok and self.speeds_ordered

    def summary(self) -> dict:
        return {
            "discontinuities": [
                {
                    "kind": d.kind,
                    "family": d.family,
                    "speed": d.speed,
                    "rh_residual": d.rh_residual,
                    "liu_ok": d.liu_ok,
                }
                for d in self.discontinuities
            ],
            "zero_speed_flux_gap": self.zero_speed_flux_gap,
            "trace_ok": self.trace_ok,
            "boundary_ok": self.boundary_ok,
            "boundary_gap": self.boundary_gap,
            "speeds_ordered": self.speeds_ordered,
            "all_pass": self.all_pass,
        }


def admissibility_report(sol: SelfSimilarSolution, model: Model, tol: float = 1e-8) -> AdmissibilityReport:
    """Rankine-Hugoniot, Liu, trace-sign and boundary checks for an assembled solution."""
    checks = []
    flux_gap = None
    for w in sol.discontinuities():
        speed = w.speed
        rh = rh_residual(model, w.left, w.right, speed)
        ok, excess = liu_check(model, w.left, w.right, speed, w.family)
        checks.append(DiscontinuityCheck(w.left, w.right, speed, w.family, w.kind, rh, ok, excess))
        if speed == 0.0:
            gap = float(np.max(np.abs(model.flux(w.left) - model.flux(w.right))))
            flux_gap = gap if flux_gap is None else max(flux_gap, gap)
    a_b = float(model.alpha(sol.u_b))
    a_trace = float(model.alpha(sol.trace))
    if a_b > 0:
        trace_ok = a_trace >= -tol
    elif a_b < 0:
        trace_ok = a_trace <= tol
    else:
        trace_ok = True
    gap = float(np.max(np.abs(beta_map(sol.boundary_value, sol.u_b, model))))
    speeds = [w.speed for w in sol.pieces if w.kind != "BOUNDARY_LAYER"]
    ordered = all(b >= a - 1e-12 for a, b in zip(speeds, speeds[1:])) and all(sp >= -1e-12 for sp in speeds)
    return AdmissibilityReport(checks, flux_gap, bool(trace_ok), gap <= tol, gap, bool(ordered), tol)
