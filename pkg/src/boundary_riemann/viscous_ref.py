"""Reference finite-volume solver for the viscous conservation law.

Solves ``w_t + f(w)_x = eps (V(u) u_x)_x`` on ``[0, X]`` with a
conservative cell-centred scheme:

* MUSCL reconstruction of the primitive variables with a smooth van Albada
  limiter and a Rusanov inviscid flux;
* central viscous fluxes on a nonuniform mesh;
* BDF2 in time (backward Euler start) with Newton iterations on a banded
  Jacobian built by colored finite differences.

The wall face takes the prescribed components of the boundary state and
extrapolates the rest; the far face holds the interior state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack
from scipy.optimize import brentq

from .model_core import BoundaryRegime, Model

log = logging.getLogger(__name__)


class StabilityViolation(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    pass


@dataclass
class PdeRun:
    X: float = 1.0
    n: int = 4096
    eps: float = 1e-3
    T: float = 0.5
    cfl: float = 1.0
    dx_min: float | None = None
    growth: float = 1.05
    snapshot_times: tuple = ()
    regime: BoundaryRegime | None = None
    newton_tol: float = 1e-10
    max_newton: int = 12
    jacobian_every: int = 25
    cfl_max: float = 4.0
    # filled by evolve
    grid: np.ndarray | None = None
    faces: np.ndarray | None = None
    snapshots: dict = field(default_factory=dict)
    mass: list = field(default_factory=list)
    boundary_flux: list = field(default_factory=list)
    steps: int = 0
    dt: float = 0.0
    bdf: list = field(default_factory=list)


def wall_mesh(X: float, n: int, dx_min: float | None = None, growth: float = 1.05) -> np.ndarray:
    """Cell faces: geometric growth from ``dx_min`` at the wall, then uniform.

    Without ``dx_min`` the mesh is uniform.
    """
    if dx_min is None:
        return np.linspace(0.0, X, n + 1)

    def faces_for(bulk):
        steps = [dx_min]
        while steps[-1] * growth < bulk and len(steps) < n:
            steps.append(steps[-1] * growth)
        rest = n - len(steps)
        return np.asarray(steps), rest

    def excess(bulk):
        steps, rest = faces_for(bulk)
        return steps.sum() + rest * bulk - X

    if excess(X) < 0:
        raise ValueError(f"{n} cells growing by {growth} from {dx_min} cannot fill [0, {X}]")
    if excess(dx_min) > 0:
        raise ValueError(f"dx_min = {dx_min} is too large for {n} cells on [0, {X}]")
    bulk = brentq(excess, dx_min, X, xtol=1e-15 * X)
    steps, rest = faces_for(bulk)
    widths = np.concatenate([steps, np.full(rest, bulk)])
    faces = np.concatenate([[0.0], np.cumsum(widths)])
    faces *= X / faces[-1]
    return faces


def _van_albada(a: np.ndarray, b: np.ndarray, smooth: float) -> np.ndarray:
    """Smooth van Albada average of undivided differences a, b."""
    e = smooth**2
    return (a * (b * b + e) + b * (a * a + e)) / (a * a + b * b + 2 * e)


def _smooth_max(a: np.ndarray, b: np.ndarray, width: float = 1e-6) -> np.ndarray:
    return 0.5 * (a + b) + 0.5 * np.sqrt((a - b) ** 2 + width**2)


class BandedLU:
    """LU factors of a banded matrix in ``solve_banded`` layout, reusable across solves."""

    def __init__(self, ab: np.ndarray, bw: int):
        n = ab.shape[1]
        work = np.zeros((3 * bw + 1, n))
        work[bw:] = ab
        self.lu, self.piv, info = lapack.dgbtrf(work, bw, bw)
        if info != 0:
            raise StabilityViolation(f"singular implicit matrix (info={info})")
        self.bw = bw

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgbtrs(self.lu, self.bw, self.bw, rhs, self.piv)
        if info != 0:
            raise StabilityViolation(f"banded solve failed (info={info})")
        return x


class FiniteVolume:
    """Spatial discretization; ``rhs(w)`` returns dw/dt for cell averages."""

    def __init__(self, model: Model, faces: np.ndarray, eps: float, u_left: np.ndarray, u_right: np.ndarray, left_mask, right_mask):
        self.model = model
        self.faces = faces
        self.dx = np.diff(faces)
        self.xc = 0.5 * (faces[1:] + faces[:-1])
        self.eps = eps
        self.u_left = np.asarray(u_left, dtype=float)
        self.u_right = np.asarray(u_right, dtype=float)
        # mask True: component prescribed at that face
        self.left_mask = np.asarray(left_mask, dtype=bool)
        self.right_mask = np.asarray(right_mask, dtype=bool)
        self.smooth = 1e-5 * float(np.max(np.abs(self.u_left)) + 1.0)
        # cells whose Peclet number exceeds 2 need limited slopes; resolved cells use central ones
        speed = max(float(model.max_speed(self.u_left)), float(model.max_speed(self.u_right)))
        self.limited = (self.dx * speed / eps > 2.0)[:, None]

    def face_states(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Wall and far-face states: prescribed components or linear extrapolation."""
        xc = self.xc
        ext_left = u[0] - (u[1] - u[0]) * (xc[0] - self.faces[0]) / (xc[1] - xc[0])
        ext_right = u[-1] + (u[-1] - u[-2]) * (self.faces[-1] - xc[-1]) / (xc[-1] - xc[-2])
        left = np.where(self.left_mask, self.u_left, ext_left)
        right = np.where(self.right_mask, self.u_right, ext_right)
        return left, right

    def fluxes(self, w: np.ndarray) -> np.ndarray:
        """Numerical fluxes at all n + 1 faces (inviscid minus viscous)."""
        m = self.model
        u = m.from_conservative(w)
        left, right = self.face_states(u)
        # extended primitive arrays with face values as end points
        xs = np.concatenate([[self.faces[0]], self.xc, [self.faces[-1]]])
        us = np.concatenate([left[None], u, right[None]])
        d = np.diff(us, axis=0) / np.diff(xs)[:, None]
        # undivided differences scaled to the cell width
        half = 0.5 * self.dx[:, None]
        back, ahead = d[:-1] * half, d[1:] * half
        slope_dx = np.where(self.limited, _van_albada(back, ahead, self.smooth), 0.5 * (back + ahead))
        uL = u[:-1] + slope_dx[:-1]
        uR = u[1:] - slope_dx[1:]
        a = _smooth_max(m.max_speed(uL), m.max_speed(uR))
        inner = 0.5 * (m.flux(uL) + m.flux(uR)) - 0.5 * a[:, None] * (m.to_conservative(uR) - m.to_conservative(uL))
        ubar = 0.5 * (us[1:] + us[:-1])
        visc = np.einsum("kij,kj->ki", m.viscosity_matrix(ubar), d)
        F = np.empty((len(self.faces), m.N))
        F[1:-1] = inner - self.eps * visc[1:-1]
        F[0] = m.flux(left) - self.eps * visc[0]
        # far face: upwinded against the held state
        a_r = max(float(m.max_speed(u[-1])), float(m.max_speed(self.u_right)))
        F[-1] = (
            0.5 * (m.flux(u[-1]) + m.flux(self.u_right))
            - 0.5 * a_r * (m.to_conservative(self.u_right) - w[-1])
            - self.eps * visc[-1]
        )
        return F

    def rhs(self, w: np.ndarray) -> np.ndarray:
        F = self.fluxes(w)
        return -(F[1:] - F[:-1]) / self.dx[:, None]

    def jacobian_bands(self, w: np.ndarray, step: float = 1e-8) -> np.ndarray:
        """Banded d(rhs)/dw (flattened cell-major) via colored differences."""
        n, N = w.shape
        reach = 2
        bw = N * (reach + 1) - 1
        ab = np.zeros((2 * bw + 1, n * N))
        base = self.rhs(w)
        period = 2 * reach + 1
        for color in range(period):
            cells = np.arange(color, n, period)
            for c in range(N):
                pert = w.copy()
                h = step * np.maximum(1.0, np.abs(w[cells, c]))
                pert[cells, c] += h
                diff = self.rhs(pert) - base
                cols = cells * N + c
                for offset in range(-reach, reach + 1):
                    target = cells + offset
                    ok = (target >= 0) & (target < n)
                    for r in range(N):
                        rows = target[ok] * N + r
                        ab[bw + rows - cols[ok], cols[ok]] = diff[target[ok], r] / h[ok]
        return ab, bw


def _masks(model: Model, regime: BoundaryRegime) -> np.ndarray:
    mask = np.ones(model.N, dtype=bool)
    if regime is BoundaryRegime.PARTIAL:
        mask[: model.h] = False
    return mask


def evolve(model: Model, u_init, u_b, run: PdeRun) -> dict:
    """March the viscous system from constant data ``u_init`` with wall state ``u_b``.

    Returns snapshots {t: (x_centres, u)} at ``run.snapshot_times`` and at T.
    """
    u_init = np.asarray(u_init, dtype=float)
    u_b = np.asarray(u_b, dtype=float)
    if run.eps <= 0:
        raise ValueError("eps must be positive")
    model.check_state(u_init)
    model.check_state(u_b)
    regime = run.regime or model.regime(u_b)
    faces = wall_mesh(run.X, run.n, run.dx_min, run.growth)
    fv = FiniteVolume(model, faces, run.eps, u_b, u_init, _masks(model, regime), np.ones(model.N, dtype=bool))
    run.grid = fv.xc
    run.faces = faces
    w = np.tile(model.to_conservative(u_init), (run.n, 1))
    speed = float(max(model.max_speed(u_init), model.max_speed(u_b)))
    dx_bulk = float(np.max(fv.dx))
    dt = run.cfl * dx_bulk / speed
    if dt * speed / dx_bulk > run.cfl_max:
        raise StabilityViolation(f"CFL {dt * speed / dx_bulk:.2f} above {run.cfl_max}")
    pending = list(time_steps(run.T, dt))[::-1]  # stack, next step last
    targets = sorted(set(float(t) for t in run.snapshot_times) | {run.T})
    snaps = {}
    w_prev = None
    dt_last = None
    jac = [None, 0, None]  # bands, steps since refresh, (coefficient, factors)
    run.mass = [float(np.sum(fv.dx * w[:, 0]))]
    run.boundary_flux = []
    run.bdf = []
    t = 0.0
    step = 0
    while pending:
        dt_n = pending.pop()
        result = _bdf_step(fv, w, w_prev, dt_n, dt_last, jac, run)
        if result is None:
            if dt_n < 1e-12 * run.T:
                raise StabilityViolation(f"time step collapsed at t = {t:.4g}")
            pending.extend([0.5 * dt_n, 0.5 * dt_n])
            continue
        w_new, weights = result
        step += 1
        w_prev, w = w, w_new
        dt_last = dt_n
        F = fv.fluxes(w)
        run.boundary_flux.append(F[0] - F[-1])
        run.mass.append(float(np.sum(fv.dx * w[:, 0])))
        run.bdf.append((weights, dt_n))
        t = run.T if not pending else t + dt_n
        for target in targets:
            if target not in snaps and t >= target - 1e-12:
                snaps[target] = (fv.xc.copy(), model.from_conservative(w))
        if step % 500 == 0:
            log.info("step %d, t = %.4f", step, t)
    run.steps = step
    run.dt = dt
    run.snapshots = snaps
    return snaps


def _bdf_step(fv: FiniteVolume, w, w_prev, dt_n, dt_last, jac, run):
    """One variable-step BDF2 step (backward Euler when there is no history).

    Returns (w_new, weights) or None when Newton fails with a fresh Jacobian.
    """
    if w_prev is None:
        weights = (1.0, -1.0, 0.0)
        guess = w.copy()
        hist = w / dt_n
    else:
        ratio = dt_n / dt_last
        a0, a1, a2 = (1 + 2 * ratio) / (1 + ratio), -(1 + ratio), ratio**2 / (1 + ratio)
        weights = (a0, a1, a2)
        guess = w + ratio * (w - w_prev)
        hist = -(a1 * w + a2 * w_prev) / dt_n
    coef = weights[0] / dt_n
    for attempt in range(2):
        if jac[0] is None or attempt == 1 or jac[1] >= run.jacobian_every:
            jac[0] = fv.jacobian_bands(w)
            jac[1] = 0
            jac[2] = None
        if jac[2] is None or jac[2][0] != coef:
            ab, bw = jac[0]
            lhs = -ab
            lhs[bw] += coef
            jac[2] = (coef, BandedLU(lhs, bw))
        lu = jac[2][1]
        w_new = guess.copy()
        last = np.inf
        for _ in range(run.max_newton):
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                G = coef * w_new - hist - fv.rhs(w_new)
            if not np.all(np.isfinite(G)):
                break
            delta = lu.solve(-G.ravel()).reshape(w.shape)
            size = float(np.max(np.abs(delta)))
            if size > 2 * last:
                break
            last = size
            w_new = w_new + delta
            if size <= run.newton_tol * max(1.0, float(np.max(np.abs(w_new)))):
                jac[1] += 1
                return w_new, weights
    return None


def conservation_defect(run: PdeRun) -> float:
    """Max defect of the discrete mass balance for the first component.

    Each step satisfies sum_j a_j Q^{n+1-j} = dt_n B^{n+1} with the BDF
    weights a_j of that step, Q the total mass and B the net boundary flux.
    """
    Q = np.asarray(run.mass)
    B = np.asarray([b[0] for b in run.boundary_flux])
    defects = []
    for n, ((a0, a1, a2), dt_n) in enumerate(run.bdf):
        prev2 = Q[n - 1] if n >= 1 else 0.0
        defects.append(abs(a0 * Q[n + 1] + a1 * Q[n] + a2 * prev2 - dt_n * B[n]))
    return float(max(defects))


def time_steps(T: float, dt: float, first: float = 1e-4, growth: float = 1.5) -> np.ndarray:
    """Geometric ramp from ``first * dt`` up to ``dt``, then uniform steps ending at T."""
    ramp = []
    h = first * dt
    while h < dt and sum(ramp) + h < T:
        ramp.append(h)
        h *= growth
    rest = T - sum(ramp)
    n_uniform = max(1, int(np.ceil(rest / dt - 1e-9)))
    return np.concatenate([ramp, np.full(n_uniform, rest / n_uniform)])


def l1_distance(x_faces: np.ndarray, u_num: np.ndarray, u_ref: np.ndarray) -> np.ndarray:
    """Per-component (1/X) int |u_num - u_ref| with cell-average weights."""
    dx = np.diff(x_faces)
    X = x_faces[-1] - x_faces[0]
    return np.sum(dx[:, None] * np.abs(u_num - u_ref), axis=0) / X


def cell_averages(sample, faces: np.ndarray, sub: int = 8) -> np.ndarray:
    """Cell averages of a callable ``sample(x) -> (len(x), N)`` by midpoint subsampling."""
    offsets = (np.arange(sub) + 0.5) / sub
    pts = faces[:-1, None] + np.diff(faces)[:, None] * offsets[None, :]
    vals = sample(pts.ravel())
    return vals.reshape(len(faces) - 1, sub, -1).mean(axis=1)


def steady_layer_oracle(
    model: Model,
    u_under,
    boundary_value,
    L: float,
    n: int = 800,
    dx_min: float | None = None,
    growth: float = 1.03,
    tol: float = 1e-10,
    max_steps: int = 400,
) -> tuple[np.ndarray, np.ndarray]:
    """Steady state of the eps = 1 system on [0, L] with frozen end data.

    Converges when the residual, scaled by the smallest cell over the flux
    magnitude, drops below ``tol``.

    The wall holds the components of ``boundary_value`` that the sign of
    alpha there allows; the far end holds the parabolic components of
    ``u_under`` and its hyperbolic ones when the flow enters there.
    Pseudo-transient continuation with backward Euler steps of growing size.
    Returns (x_centres, u).
    """
    u_under = np.asarray(u_under, dtype=float)
    bv = np.asarray(boundary_value, dtype=float)
    faces = wall_mesh(L, n, dx_min, growth)
    left_mask = _masks(model, model.regime(bv))
    right_mask = np.ones(model.N, dtype=bool)
    if float(model.alpha(u_under)) > 0:
        right_mask[: model.h] = False
    fv = FiniteVolume(model, faces, 1.0, bv, u_under, left_mask, right_mask)
    fv.fluxes = _steady_far_face(fv)
    # start from a smooth blend so the wall data is not an impulsive jump
    blend = np.exp(-fv.xc / (0.05 * L))[:, None]
    w = model.to_conservative(u_under + blend * (bv - u_under))
    scale = float(np.min(fv.dx)) / (1.0 + float(np.max(np.abs(model.flux(u_under)))))
    dt = 1e-3
    norm = np.inf
    for step in range(max_steps):
        R = fv.rhs(w)
        norm = float(np.max(np.abs(R)))
        if norm * scale <= tol:
            return fv.xc, model.from_conservative(w)
        ab, bw = fv.jacobian_bands(w)
        lhs = -ab
        lhs[bw] += 1.0 / dt
        delta = BandedLU(lhs, bw).solve(R.ravel()).reshape(w.shape)
        trial = w + delta
        try:
            model.check_state(model.from_conservative(trial))
            new_norm = float(np.max(np.abs(fv.rhs(trial))))
        except ValueError:
            new_norm = np.inf
        if np.isfinite(new_norm) and new_norm < 2 * norm:
            w = trial
            dt = min(dt * max(1.5, norm / max(new_norm, 1e-300)), 1e12)
        else:
            dt *= 0.25
    raise NoConvergence(f"steady residual {norm:.3e} after {max_steps} pseudo-time steps")


def _steady_far_face(fv: FiniteVolume):
    """Flux function whose far face uses the face state directly (no upwind blending)."""
    base = fv.fluxes

    def fluxes(w):
        F = base(w)
        m = fv.model
        u = m.from_conservative(w)
        _, right = fv.face_states(u)
        xc_last = fv.xc[-1]
        grad = (right - u[-1]) / (fv.faces[-1] - xc_last)
        ubar = 0.5 * (right + u[-1])
        F[-1] = m.flux(right) - fv.eps * m.viscosity_matrix(ubar) @ grad
        return F

    return fluxes
