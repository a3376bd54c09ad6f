"""Admissible wave-fan curves.

Curves are "backward": the input state sits on the right of the wave and
the curve returns the state on its left, which is the order in which the
boundary Riemann solution is composed starting from the interior state.

Non-characteristic families ``i > k`` use exact constructions where the
field structure allows it (integral curves for rarefactions and contacts,
Rankine-Hugoniot loci for shocks).  The characteristic family ``k`` uses
the pencil root of ``det(A - sigma E - s B)`` nearest zero as the centre
manifold rate, which is exact on the centre manifold's base slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .envelope import monotone_concave_envelope
from .model_core import Model
from .spectral import SpectralData, eig_EA, near_zero_root, theta_derivative


class AmplitudeTooLarge(ValueError):
    pass


class NewtonFail(ArithmeticError):
    pass


class FixedPointDiverged(ArithmeticError):
    pass


class NegativeCtilde(ArithmeticError):
    pass


class NotLinearlyDegenerate(ValueError):
    pass


GNL_TOL = 1e-3
LD_TOL = 1e-7
DEFAULT_DELTA = 0.1
SPEED_ZERO_TOL = 1e-13  # eigenvalues below this (relative) count as zero speed


@dataclass
class Wave:
    """One element of a wave pattern, oriented left to right."""

    kind: str  # RAREFACTION, SHOCK, CONTACT or BOUNDARY_LAYER
    left: np.ndarray
    right: np.ndarray
    speed_left: float
    speed_right: float
    family: int
    fan_states: np.ndarray | None = None  # states across a fan, left to right
    fan_speeds: np.ndarray | None = None
    profile: dict | None = None

    @property
    def speed(self) -> float:
        return 0.5 * (self.speed_left + self.speed_right)

    @property
    def is_jump(self) -> bool:
        return self.kind in ("SHOCK", "CONTACT")


@dataclass
class WaveCurveResult:
    s: float
    tau: np.ndarray
    states: np.ndarray
    sigma: np.ndarray
    z00: np.ndarray
    tau_bar: float
    tau_under: float
    end_state: np.ndarray
    trace_state: np.ndarray
    underline_state: np.ndarray
    wave_pattern: list[Wave] = field(default_factory=list)
    kind: str = ""
    family: int = -1
    # general branch only: the enveloped function and its envelope on |tau|
    g_vals: np.ndarray | None = None
    env_vals: np.ndarray | None = None


# ---------------------------------------------------------------------------
# direction fields


def eigenvalue(model: Model, u: np.ndarray, i: int) -> float:
    return float(eig_EA(model, u).lambdas[i])


def nonlinearity(model: Model, u: np.ndarray, i: int, step: float = 1e-6) -> tuple[float, np.ndarray]:
    """(grad lambda_i . r_i, r_i) with r_i of unit Euclidean length."""
    spec = eig_EA(model, u)
    r = spec.rvecs[:, i] / np.linalg.norm(spec.rvecs[:, i])
    plus = eig_EA(model, u + step * r).lambdas[i]
    minus = eig_EA(model, u - step * r).lambdas[i]
    return float((plus - minus) / (2 * step)), r


def classify_family(model: Model, u: np.ndarray, i: int) -> str:
    g, _ = nonlinearity(model, u, i)
    if abs(g) <= LD_TOL:
        return "LD"
    if abs(g) >= GNL_TOL:
        return "GNL"
    return "GENERAL"


def lax_direction(model: Model, u: np.ndarray, i: int, kind: str, ref: np.ndarray | None = None) -> np.ndarray:
    """r_i scaled with grad(lambda_i).r_i = 1 (GNL) or |r_i| = 1 otherwise."""
    g, r = nonlinearity(model, u, i)
    if kind == "GNL":
        return r / g
    if ref is not None and r @ ref < 0:
        r = -r
    return r


def characteristic_direction(
    model: Model, u: np.ndarray, sigma: float, ref: np.ndarray | None = None
) -> tuple[float, np.ndarray]:
    """Near-zero pencil root theta00(u, sigma) and its null vector.

    The vector's u2 block has unit B22 norm; ``ref`` fixes the orientation.
    """
    theta, vec = near_zero_root(model, u, sigma)
    if ref is not None and vec @ ref < 0:
        vec = -vec
    return theta, vec


def characteristic_tangent(model: Model, u: np.ndarray) -> np.ndarray:
    """Tangent of the characteristic curve at zero strength.

    Both branches of the curve share it: for lambda_k >= 0 it is r_k and
    for lambda_k < 0 it is the null vector of A - theta00 B; they coincide
    at lambda_k = 0 under the common normalization.
    """
    spec = eig_EA(model, u)
    lam = spec.lambda_k
    if lam >= 0:
        return _rk_normalized(model, u, spec)
    return characteristic_direction(model, u, 0.0)[1]


def _rk_normalized(model: Model, u: np.ndarray, spec: SpectralData | None = None, ref=None) -> np.ndarray:
    spec = spec if spec is not None else eig_EA(model, u)
    r = spec.r_k.copy()
    h = model.h
    B22 = model.B22(u)
    r /= np.sqrt(r[h:] @ B22 @ r[h:])
    if ref is None:
        block = r[h:]
        j = int(np.argmax(np.abs(block) + 1e-12 * np.arange(len(block))))
        if block[j] < 0:
            r = -r
    elif r @ ref < 0:
        r = -r
    return r


def integral_curve(field_fn, u0: np.ndarray, s: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 for du/dtau = field_fn(u) on [0, s]; returns (tau, states)."""
    tau = np.linspace(0.0, s, n + 1)
    h = s / n
    states = np.empty((n + 1, len(u0)))
    states[0] = u0
    u = np.array(u0, dtype=float)
    for j in range(n):
        k1 = field_fn(u)
        k2 = field_fn(u + 0.5 * h * k1)
        k3 = field_fn(u + 0.5 * h * k2)
        k4 = field_fn(u + h * k3)
        u = u + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        states[j + 1] = u
    return tau, states


# ---------------------------------------------------------------------------
# Rankine-Hugoniot


def rh_residual(model: Model, left: np.ndarray, right: np.ndarray, speed: float) -> float:
    """Max-norm of f(left) - f(right) - speed (w(left) - w(right))."""
    jump_f = model.flux(left) - model.flux(right)
    jump_w = model.to_conservative(left) - model.to_conservative(right)
    return float(np.max(np.abs(jump_f - speed * jump_w)))


def hugoniot_point(
    model: Model,
    u_right: np.ndarray,
    ell: np.ndarray,
    param: float,
    guess: np.ndarray,
    speed_guess: float,
    tol: float = 1e-13,
    max_iter: int = 40,
) -> tuple[np.ndarray, float]:
    """State u on the Hugoniot locus of ``u_right`` with ell.(u - u_right) = param."""
    N = model.N
    f_r = model.flux(u_right)
    w_r = model.to_conservative(u_right)

    def residual(x):
        u, sp = x[:N], x[N]
        out = np.empty(N + 1)
        out[:N] = model.flux(u) - f_r - sp * (model.to_conservative(u) - w_r)
        out[N] = ell @ (u - u_right) - param
        return out

    x = np.concatenate([guess, [speed_guess]])
    scale = max(1.0, float(np.max(np.abs(u_right))))
    for _ in range(max_iter):
        F = residual(x)
        if np.max(np.abs(F)) <= tol * scale:
            return x[:N], float(x[N])
        J = np.empty((N + 1, N + 1))
        for j in range(N + 1):
            dx = np.zeros(N + 1)
            dx[j] = 1e-7 * max(1.0, abs(x[j]))
            J[:, j] = (residual(x + dx) - residual(x - dx)) / (2 * dx[j])
        x = x - np.linalg.solve(J, F)
    F = residual(x)
    if np.max(np.abs(F)) <= 1e3 * tol * scale:
        return x[:N], float(x[N])
    raise NewtonFail(f"Hugoniot solve did not converge, residual {np.max(np.abs(F)):.3e}")


def liu_check(
    model: Model, left: np.ndarray, right: np.ndarray, speed: float, family: int, n: int = 24, tol: float = 1e-8
) -> tuple[bool, float]:
    """Liu's condition along the Hugoniot curve of ``right`` through ``left``.

    Chord speeds sigma(u, right) for intermediate Hugoniot states must not
    exceed the shock speed.  Returns (passed, max excess).
    """
    if np.allclose(left, right, atol=1e-14):
        return True, 0.0
    spec = eig_EA(model, right)
    r = spec.rvecs[:, family]
    E = model.E(right)
    ell = E @ r / (r @ E @ r)
    target = float(ell @ (left - right))
    if abs(target) < 1e-14:
        return True, 0.0
    u = right.copy()
    sp = float(spec.lambdas[family])
    excess = -np.inf
    for tau in np.linspace(0.0, target, n + 1)[1:]:
        guess = u + (tau - ell @ (u - right)) * r
        u, sp = hugoniot_point(model, right, ell, tau, guess, sp)
        if tau != target:
            excess = max(excess, sp - speed)
    if np.max(np.abs(u - left)) > 1e-6 * max(1.0, np.max(np.abs(left))):
        # the discontinuity is not on this family's Hugoniot branch
        return False, float("inf")
    excess = max(excess, 0.0) if np.isfinite(excess) else 0.0
    return bool(excess <= tol), float(excess)


# ---------------------------------------------------------------------------
# non-characteristic curves


def _fan(model, states, i):
    return np.array([eigenvalue(model, u, i) for u in states])


def lax_curve(
    model: Model,
    spectral: SpectralData | None,
    i: int,
    u_tilde: np.ndarray,
    s: float,
    n: int = 32,
    delta: float = DEFAULT_DELTA,
) -> WaveCurveResult:
    """Left state reached from the right state ``u_tilde`` by an i-wave of strength ``s``.

    Genuinely nonlinear fields: s < 0 is a rarefaction, s > 0 a Lax shock.
    Linearly degenerate fields: a contact along the integral curve.
    Other fields fall back to the envelope of the characteristic speed
    along the integral curve.
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    if abs(s) > delta:
        raise AmplitudeTooLarge(f"|s| = {abs(s):.3g} exceeds {delta}")
    spec = spectral if spectral is not None else eig_EA(model, u_tilde)
    lam0 = float(spec.lambdas[i])
    if s == 0.0:
        return _trivial_curve(u_tilde, lam0, i)
    kind = classify_family(model, u_tilde, i)
    if kind == "GNL" and s > 0:
        return _shock_curve(model, spec, i, u_tilde, s, n)
    ref = lax_direction(model, u_tilde, i, kind)
    tau, states = integral_curve(lambda u: lax_direction(model, u, i, kind, ref), u_tilde, s, n)
    speeds = _fan(model, states, i)
    end = states[-1]
    if kind == "GNL":
        # rarefaction: speeds increase from the left state to the right state
        wave = Wave("RAREFACTION", end, u_tilde, speeds[-1], speeds[0], i, states[::-1].copy(), speeds[::-1].copy())
        pattern = [wave]
    elif kind == "LD":
        sp = float(np.mean(speeds))
        pattern = [Wave("CONTACT", end, u_tilde, sp, sp, i)]
    else:
        pattern = _pattern_from_envelope(model, i, tau, states, speeds)
    return WaveCurveResult(
        s=s,
        tau=tau,
        states=states,
        sigma=speeds,
        z00=np.zeros_like(tau),
        tau_bar=s,
        tau_under=s,
        end_state=end,
        trace_state=end,
        underline_state=end,
        wave_pattern=pattern,
        kind=kind,
        family=i,
    )


def _trivial_curve(u, lam, i) -> WaveCurveResult:
    tau = np.zeros(1)
    return WaveCurveResult(0.0, tau, u[None, :].copy(), np.array([lam]), np.zeros(1), 0.0, 0.0, u.copy(), u.copy(), u.copy(), [], "TRIVIAL", i)


def _shock_curve(model, spec, i, u_tilde, s, n) -> WaveCurveResult:
    r = lax_direction(model, u_tilde, i, "GNL")
    E = model.E(u_tilde)
    ell = E @ r / (r @ E @ r)
    tau = np.linspace(0.0, s, n + 1)
    states = np.empty((n + 1, model.N))
    speeds = np.empty(n + 1)
    states[0] = u_tilde
    speeds[0] = float(spec.lambdas[i])
    u, sp = u_tilde.copy(), speeds[0]
    for j in range(1, n + 1):
        guess = u + (tau[j] - tau[j - 1]) * r
        u, sp = hugoniot_point(model, u_tilde, ell, tau[j], guess, sp)
        states[j] = u
        speeds[j] = sp
    end = states[-1]
    pattern = [Wave("SHOCK", end, u_tilde, speeds[-1], speeds[-1], i)]
    return WaveCurveResult(s, tau, states, speeds, np.zeros_like(tau), s, s, end, end, end, pattern, "SHOCK", i)


def _pattern_from_envelope(model, i, tau, states, speeds) -> list[Wave]:
    """Waves for a general field from the envelope of the integrated speed.

    The admissible speed profile is the derivative of the concave (s > 0)
    or convex (s < 0) envelope of the running integral of lambda_i.
    """
    sgn = 1.0 if tau[-1] > 0 else -1.0
    t = np.abs(tau)
    g = np.concatenate([[0.0], np.cumsum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(t))]) * sgn
    # concave hull (not clamped) of sgn-adjusted integral
    from .envelope import concave_envelope

    env = sgn * concave_envelope(sgn * g, t)
    sig = np.diff(env) / np.diff(t) * sgn
    return _waves_from_slopes(i, states, sig, np.abs(env - g) <= 1e-12 * max(1.0, np.max(np.abs(g))))


def _waves_from_slopes(family: int, states: np.ndarray, seg_speed: np.ndarray, contact: np.ndarray) -> list[Wave]:
    """Group envelope segments into fans and jumps, returned left to right.

    ``states[0]`` is the rightmost state; segment j joins states j and j+1.
    """
    waves: list[Wave] = []
    n_seg = len(seg_speed)
    j = 0
    tol = 1e-10 * max(1.0, float(np.max(np.abs(seg_speed), initial=0.0)))
    while j < n_seg:
        k = j + 1
        while k < n_seg and abs(seg_speed[k] - seg_speed[j]) <= tol:
            k += 1
        # segments j..k-1 share one speed
        interior_contact = bool(np.all(contact[j + 1 : k]))
        if k - j == 1 and contact[j] and contact[min(j + 1, len(contact) - 1)]:
            # extend a fan while consecutive single segments stay in contact
            start = j
            while k < n_seg and contact[k] and (k + 1 >= n_seg or abs(seg_speed[k + 1] - seg_speed[k]) > tol):
                k += 1
            fan_states = states[start : k + 1][::-1].copy()
            fan_speeds = seg_speed[start:k][::-1].copy()
            fan_speeds = np.concatenate([fan_speeds[:1], fan_speeds])
            waves.append(
                Wave("RAREFACTION", states[k], states[start], float(seg_speed[k - 1]), float(seg_speed[start]), family, fan_states, fan_speeds)
            )
        else:
            kind = "CONTACT" if interior_contact else "SHOCK"
            waves.append(Wave(kind, states[k], states[j], float(seg_speed[j]), float(seg_speed[j]), family))
        j = k
    return waves[::-1]


# ---------------------------------------------------------------------------
# characteristic curve


def zeta_k_lindeg(
    model: Model,
    spectral: SpectralData | None,
    u_tilde: np.ndarray,
    s_k: float,
    n: int = 32,
    delta: float = DEFAULT_DELTA,
) -> WaveCurveResult:
    """Characteristic curve for a linearly degenerate k-th field.

    lambda_k >= 0: contact along the integral curve of r_k.
    lambda_k < 0: slow boundary layer along the null direction of
    A - theta00 B at sigma = 0, with z00 = int theta00.
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    if abs(s_k) > delta:
        raise AmplitudeTooLarge(f"|s_k| = {abs(s_k):.3g} exceeds {delta}")
    spec = spectral if spectral is not None else eig_EA(model, u_tilde)
    k = spec.k
    g, _ = nonlinearity(model, u_tilde, k)
    if abs(g) > 1e-6:
        raise NotLinearlyDegenerate(f"grad lambda_k . r_k = {g:.3e}")
    lam = spec.lambda_k
    if abs(lam) <= SPEED_ZERO_TOL * max(1.0, float(np.max(np.abs(spec.lambdas)))):
        lam = 0.0
    if s_k == 0.0:
        return _trivial_curve(u_tilde, max(lam, 0.0), k)
    if lam >= 0:
        ref = _rk_normalized(model, u_tilde, spec)
        tau, states = integral_curve(lambda u: _rk_normalized(model, u, ref=ref), u_tilde, s_k, n)
        end = states[-1]
        sigma = np.full_like(tau, lam)
        if lam > 0:
            pattern = [Wave("CONTACT", end, u_tilde, lam, lam, k)]
            tau_bar = tau_under = s_k
            trace = end
        else:
            pattern = [Wave("CONTACT", end, u_tilde, 0.0, 0.0, k)]
            tau_bar, tau_under = 0.0, s_k
            trace = u_tilde.copy()
        return WaveCurveResult(s_k, tau, states, sigma, np.zeros_like(tau), tau_bar, tau_under, end, trace, end, pattern, "CONTACT", k)

    _, ref = characteristic_direction(model, u_tilde, 0.0)

    def rhs(y):
        u = y[:-1]
        th, vec = characteristic_direction(model, u, 0.0, ref)
        return np.concatenate([vec, [th]])

    tau, ext = integral_curve(rhs, np.concatenate([u_tilde, [0.0]]), s_k, n)
    states, z00 = ext[:, :-1], ext[:, -1]
    end = states[-1]
    profile = _slow_profile(tau, states, z00)
    pattern = [Wave("BOUNDARY_LAYER", end, u_tilde, 0.0, 0.0, k, profile=profile)]
    return WaveCurveResult(s_k, tau, states, np.zeros_like(tau), z00, 0.0, 0.0, end, u_tilde.copy(), u_tilde.copy(), pattern, "BOUNDARY_LAYER", k)


def _slow_profile(tau, states, z00) -> dict:
    """Physical profile of a slow layer parameterized by tau, with dtau/dx = z00.

    x(tau) = int_tau^s dtau' / (-z00); the tau = 0 end sits at x = infinity.
    """
    t = np.abs(tau)
    rate = np.abs(z00)
    inv = 1.0 / np.where(rate > 0, rate, np.nan)
    x = np.zeros_like(t)
    # trapezoid on 1/|z00| from the wall inward; the t = 0 node is singular
    for j in range(len(t) - 2, 0, -1):
        x[j] = x[j + 1] + 0.5 * (inv[j] + inv[j + 1]) * (t[j + 1] - t[j])
    x[0] = np.inf
    return {"x": x, "states": states, "z00": z00}


def zeta_k_general(
    model: Model,
    spectral: SpectralData | None,
    u_tilde: np.ndarray,
    s_k: float,
    n_grid: int = 2049,
    fp_tol: float = 1e-11,
    max_iter: int = 200,
    relaxation: float = 0.5,
    delta: float = DEFAULT_DELTA,
) -> WaveCurveResult:
    """Characteristic curve from the envelope fixed point.

    Works in t = |tau| so that both signs of s_k use the monotone concave
    envelope of g(t) = int_0^t (theta00 / c + sigma).
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    if abs(s_k) > delta:
        raise AmplitudeTooLarge(f"|s_k| = {abs(s_k):.3g} exceeds {delta}")
    spec = spectral if spectral is not None else eig_EA(model, u_tilde)
    k = spec.k
    lam = spec.lambda_k
    if s_k == 0.0:
        return _trivial_curve(u_tilde, max(lam, 0.0), k)
    c_tilde = -theta_derivative(model, u_tilde, lam)
    if not c_tilde > 0:
        raise NegativeCtilde(f"c_tilde = {c_tilde:.3e} is not positive")
    sgn = 1.0 if s_k > 0 else -1.0
    t = np.linspace(0.0, abs(s_k), n_grid)
    dt = t[1] - t[0]
    _, ref = characteristic_direction(model, u_tilde, lam)

    def directions(states, sig):
        th = np.empty(len(states))
        vec = np.empty_like(states)
        for j, (u, sg) in enumerate(zip(states, sig)):
            th[j], vec[j] = characteristic_direction(model, u, sg, ref)
        return th, vec

    def integrate(sig):
        # Heun steps with sigma frozen per node; deterministic and smooth in s
        states = np.empty((n_grid, model.N))
        states[0] = u_tilde
        u = u_tilde.copy()
        for j in range(n_grid - 1):
            _, d1 = characteristic_direction(model, u, sig[j], ref)
            pred = u + dt * sgn * d1
            _, d2 = characteristic_direction(model, pred, sig[j + 1], ref)
            u = u + 0.5 * dt * sgn * (d1 + d2)
            states[j + 1] = u
        return states

    sigma = np.full(n_grid, max(lam, 0.0))
    states = integrate(sigma)
    converged = False
    for _ in range(max_iter):
        theta, _ = directions(states, sigma)
        integrand = theta / c_tilde + sigma
        g = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * dt)])
        env = monotone_concave_envelope(g, grid=t)
        sigma_new = env.sigma
        sigma_next = (1 - relaxation) * sigma + relaxation * sigma_new
        states_next = integrate(sigma_next)
        change = max(np.max(np.abs(sigma_next - sigma)), np.max(np.abs(states_next - states)))
        sigma, states = sigma_next, states_next
        if change < fp_tol:
            converged = True
            break
    if not converged:
        raise FixedPointDiverged(f"fixed point change {change:.3e} after {max_iter} iterations")

    theta, _ = directions(states, sigma)
    integrand = theta / c_tilde + sigma
    g = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * dt)])
    tol = 1e-12 * max(1.0, float(np.max(np.abs(g))))
    env = monotone_concave_envelope(g, grid=t, tol=tol)
    z00 = sgn * c_tilde * (g - env.env_vals)
    i_bar = int(round(env.tau_bar / dt))
    i_under = int(round(env.tau_under / dt))
    tau = sgn * t
    end = states[-1]
    trace = states[i_bar]
    under = states[i_under]

    pattern: list[Wave] = []
    if i_under < n_grid - 1:
        prof = _slow_profile(tau[i_under:] - tau[i_under], states[i_under:], z00[i_under:])
        pattern.append(Wave("BOUNDARY_LAYER", end, under, 0.0, 0.0, k, profile=prof))
    if i_bar < i_under:
        jump_kind = "CONTACT" if np.all(env.contact[i_bar : i_under + 1]) else "SHOCK"
        pattern.append(Wave(jump_kind, under, trace, 0.0, 0.0, k))
    if i_bar > 0:
        seg_speed = np.diff(env.env_vals[: i_bar + 1]) / dt
        pattern.extend(_waves_from_slopes(k, states[: i_bar + 1], seg_speed, env.contact[: i_bar + 1]))
    return WaveCurveResult(
        s=s_k,
        tau=tau,
        states=states,
        sigma=env.sigma.copy(),
        z00=z00,
        tau_bar=sgn * env.tau_bar,
        tau_under=sgn * env.tau_under,
        end_state=end,
        trace_state=trace,
        underline_state=under,
        wave_pattern=pattern,
        kind="GENERAL",
        family=k,
        g_vals=g,
        env_vals=env.env_vals.copy(),
    )


def zeta_k(model: Model, spectral: SpectralData | None, u_tilde: np.ndarray, s_k: float, n: int = 32, **kwargs) -> WaveCurveResult:
    """Linearly degenerate branch when it applies, general construction otherwise."""
    try:
        return zeta_k_lindeg(model, spectral, u_tilde, s_k, n=n, **kwargs)
    except NotLinearlyDegenerate:
        return zeta_k_general(model, spectral, u_tilde, s_k, **kwargs)


@dataclass
class LimitTriple:
    s: np.ndarray
    sigma0: np.ndarray
    z00_0: np.ndarray
    expected_sigma: float


def limit_behavior_check(model: Model, u_tilde: np.ndarray, strengths, n_grid: int = 257) -> LimitTriple:
    """sigma(0) and z00(0) of the fixed point for a sequence s_k -> 0+."""
    u_tilde = np.asarray(u_tilde, dtype=float)
    lam = eig_EA(model, u_tilde).lambda_k
    s = np.asarray(strengths, dtype=float)
    sig0 = np.empty_like(s)
    z0 = np.empty_like(s)
    for j, sk in enumerate(s):
        res = zeta_k_general(model, None, u_tilde, float(sk), n_grid=n_grid)
        sig0[j] = res.sigma[0]
        z0[j] = res.z00[0]
    return LimitTriple(s, sig0, z0, max(lam, 0.0))
