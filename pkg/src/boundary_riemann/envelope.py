"""Monotone concave and convex envelopes of sampled scalar functions.

The monotone concave envelope of ``f`` on ``[0, s]`` is the smallest
concave, nondecreasing majorant.  It coincides with the concave hull of
``f`` up to the last maximizer and is constant afterwards, so it can be
computed with one pass of the monotone-chain upper hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class EnvelopeResult:
    grid: np.ndarray
    f_vals: np.ndarray
    env_vals: np.ndarray
    sigma: np.ndarray
    contact: np.ndarray
    tau_under: float
    tau_bar: float
    m: float
    convex: bool = False


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def upper_hull(x: np.ndarray, y: np.ndarray) -> list[int]:
    """Indices of the upper hull vertices of points sorted by ``x``."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2 and _cross((x[hull[-2]], y[hull[-2]]), (x[hull[-1]], y[hull[-1]]), (x[i], y[i])) >= 0:
            hull.pop()
        hull.append(i)
    return hull


def _segment_slopes(grid: np.ndarray, env: np.ndarray) -> np.ndarray:
    """Left derivative at each node; the first node takes the first slope."""
    slopes = np.diff(env) / np.diff(grid)
    return np.concatenate([slopes[:1], slopes])


def _monconc(grid: np.ndarray, f: np.ndarray, tol: float) -> EnvelopeResult:
    m = float(np.max(f))
    last = int(np.nonzero(f >= m - tol)[0][-1])
    hull = upper_hull(grid[: last + 1], f[: last + 1])
    env = np.full_like(f, m)
    env[: last + 1] = np.interp(grid[: last + 1], grid[hull], f[hull])
    env[last] = m
    sigma = _segment_slopes(grid, env) if len(grid) > 1 else np.zeros(1)
    sigma = np.maximum(sigma, 0.0)
    sigma[last + 1 :] = 0.0
    contact = np.abs(env - f) <= tol + 1e-14 * max(1.0, abs(m))
    first = int(np.nonzero(env >= m - tol)[0][0])
    return EnvelopeResult(
        grid=grid,
        f_vals=f,
        env_vals=env,
        sigma=sigma,
        contact=contact,
        tau_under=float(grid[last]),
        tau_bar=float(grid[first]),
        m=m,
    )


def _grid_for(f_vals: np.ndarray, interval, grid) -> np.ndarray:
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        if grid.shape != f_vals.shape:
            raise ValueError("grid and f_vals must have the same shape")
        return grid
    a, b = interval
    return np.linspace(a, b, len(f_vals))


def monotone_concave_envelope(
    f_vals, interval=(0.0, 1.0), tol: float = 0.0, grid=None
) -> EnvelopeResult:
    """Smallest concave nondecreasing majorant of the piecewise-linear interpolant.

    ``grid`` overrides the default uniform grid on ``interval``.  Values of
    ``f`` within ``tol`` of the maximum count as maximizers.
    """
    f = np.asarray(f_vals, dtype=float)
    if len(f) < 2:
        raise ValueError("need at least two samples")
    g = _grid_for(f, interval, grid)
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    return _monconc(g, f, tol)


def monotone_convex_envelope(
    f_vals, interval=(-1.0, 0.0), tol: float = 0.0, grid=None
) -> EnvelopeResult:
    """Largest convex nondecreasing minorant, computed through the mirror (tau, f) -> (-tau, -f).

    ``tau_under`` is the smallest minimizer and ``tau_bar`` the largest
    point where the envelope still equals its minimum.
    """
    f = np.asarray(f_vals, dtype=float)
    g = _grid_for(f, interval, grid)
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    mirrored = _monconc(-g[::-1], -f[::-1], tol)
    env = -mirrored.env_vals[::-1]
    sigma = mirrored.sigma[::-1].copy()
    return EnvelopeResult(
        grid=g,
        f_vals=f,
        env_vals=env,
        sigma=sigma,
        contact=mirrored.contact[::-1].copy(),
        tau_under=-mirrored.tau_under,
        tau_bar=-mirrored.tau_bar,
        m=-mirrored.m,
        convex=True,
    )


def concave_envelope(f_vals, grid) -> np.ndarray:
    """Plain concave hull of the interpolant, evaluated on the grid."""
    f = np.asarray(f_vals, dtype=float)
    g = np.asarray(grid, dtype=float)
    hull = upper_hull(g, f)
    return np.interp(g, g[hull], f[hull])


def split_points(env: EnvelopeResult) -> tuple[float, float]:
    """(tau_bar, tau_under): first point where the envelope peaks, last maximizer of f."""
    return env.tau_bar, env.tau_under
