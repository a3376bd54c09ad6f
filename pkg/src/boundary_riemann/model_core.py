"""Mixed hyperbolic-parabolic models in symmetrized normal form.

A model is the system

    E(u) u_t + A(u) u_x = B(u) u_xx + G(u, u_x) u_x

with ``A`` symmetric, ``E`` symmetric positive definite and block diagonal,
and ``B = diag(0_h, B22)``.  The first ``h`` components form the hyperbolic
block ``u1`` and the remaining ``N - h`` the parabolic block ``u2``.

All evaluators are vectorized: a state array of shape ``(..., N)`` maps to
matrices of shape ``(..., N, N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

Coefficient = Union[float, Callable[[np.ndarray], np.ndarray]]


class DomainError(ValueError):
    """Raised when a state lies outside the physically admissible range."""


class BoundaryRegime(str, Enum):
    FULL = "FULL"
    PARTIAL = "PARTIAL"


def _coefficient(value: Coefficient) -> tuple[Callable, Callable]:
    """Return (c(rho), dc/drho) for a constant or a callable of density."""
    if callable(value):
        func = value

        def deriv(rho):
            step = 1e-6 * np.maximum(1.0, np.abs(rho))
            return (func(rho + step) - func(rho - step)) / (2.0 * step)

        return func, deriv
    const = float(value)
    return (lambda rho: np.full(np.shape(rho), const)), (lambda rho: np.zeros(np.shape(rho)))


class Model:
    """Evaluator bundle for a model in normal form.

    Subclasses fill in the matrix evaluators and the conservative maps.
    """

    name: str = "abstract"
    N: int
    h: int

    # --- matrices -----------------------------------------------------
    def E(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def A(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def B(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def G(self, u: np.ndarray, ux: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def alpha(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def check_state(self, u: np.ndarray) -> None:
        """Raise DomainError if any state in ``u`` is inadmissible."""

    # --- conservative form -------------------------------------------
    conservative: bool = False

    def to_conservative(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def from_conservative(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def flux(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def viscosity_matrix(self, u: np.ndarray) -> np.ndarray:
        """Matrix V(u) with viscous flux = V(u) u_x."""
        raise NotImplementedError

    def viscous_flux(self, u: np.ndarray, ux: np.ndarray) -> np.ndarray:
        return np.einsum("...ij,...j->...i", self.viscosity_matrix(u), ux)

    def D(self, w: np.ndarray) -> np.ndarray:
        """Viscosity matrix in conservative variables: viscous flux = D(w) w_x."""
        u = self.from_conservative(w)
        return self.viscosity_matrix(u) @ np.linalg.inv(self.conservative_jacobian(u))

    def conservative_jacobian(self, u: np.ndarray, step: float = 1e-7) -> np.ndarray:
        """dw/du by central differences."""
        u = np.asarray(u, dtype=float)
        cols = []
        for j in range(self.N):
            du = np.zeros(self.N)
            du[j] = step * max(1.0, abs(float(np.max(np.abs(u[..., j])))))
            cols.append((self.to_conservative(u + du) - self.to_conservative(u - du)) / (2 * du[j]))
        return np.stack(cols, axis=-1)

    def max_speed(self, u: np.ndarray) -> np.ndarray:
        """Spectral radius of E^-1 A, vectorized (E is diagonal for shipped models)."""
        u = np.asarray(u, dtype=float)
        scale = 1.0 / np.sqrt(np.diagonal(self.E(u), axis1=-2, axis2=-1))
        sym = scale[..., :, None] * self.A(u) * scale[..., None, :]
        return np.max(np.abs(np.linalg.eigvalsh(sym)), axis=-1)

    # --- blocks -------------------------------------------------------
    def E11(self, u):
        return self.E(u)[..., : self.h, : self.h]

    def E22(self, u):
        return self.E(u)[..., self.h :, self.h :]

    def A11(self, u):
        return self.A(u)[..., : self.h, : self.h]

    def A21(self, u):
        return self.A(u)[..., self.h :, : self.h]

    def A22(self, u):
        return self.A(u)[..., self.h :, self.h :]

    def B22(self, u):
        return self.B(u)[..., self.h :, self.h :]

    def a21(self, u):
        if self.h != 1:
            raise ValueError("a21 is only defined for h = 1")
        return self.A21(u)[..., 0]

    def G1(self, u, ux):
        return self.G(u, ux)[..., self.h :, : self.h]

    def G2(self, u, ux):
        return self.G(u, ux)[..., self.h :, self.h :]

    def g1(self, u, ux):
        if self.h != 1:
            raise ValueError("g1 is only defined for h = 1")
        return self.G1(u, ux)[..., 0]

    def regime(self, u_b: np.ndarray) -> BoundaryRegime:
        """FULL when alpha is positive at the boundary state, PARTIAL otherwise."""
        return BoundaryRegime.FULL if float(self.alpha(np.asarray(u_b))) > 0 else BoundaryRegime.PARTIAL


class NavierStokes(Model):
    """Compressible Navier-Stokes with ``u = (rho, velocity, theta)``."""

    name = "navier_stokes"
    N = 3
    h = 1
    conservative = True

    def __init__(self, R: float = 1.0, cv: float = 1.5, nu: Coefficient = 1.0, kappa: Coefficient = 1.0):
        if cv <= 0 or R <= 0:
            raise ValueError("R and cv must be positive")
        self.R = float(R)
        self.cv = float(cv)
        self.nu, self.dnu = _coefficient(nu)
        self.kappa, self.dkappa = _coefficient(kappa)
        self.params = {"R": self.R, "cv": self.cv, "nu": nu, "kappa": kappa}

    def check_state(self, u):
        u = np.asarray(u)
        if np.any(u[..., 0] <= 0) or np.any(u[..., 2] <= 0):
            raise DomainError("Navier-Stokes requires rho > 0 and theta > 0")

    def E(self, u):
        u = np.asarray(u, dtype=float)
        rho, theta = u[..., 0], u[..., 2]
        out = np.zeros(u.shape + (3,))
        out[..., 0, 0] = self.R * theta / rho**2
        out[..., 1, 1] = 1.0
        out[..., 2, 2] = self.cv / theta
        return out

    def A(self, u):
        u = np.asarray(u, dtype=float)
        rho, vel, theta = u[..., 0], u[..., 1], u[..., 2]
        R = self.R
        out = np.zeros(u.shape + (3,))
        out[..., 0, 0] = R * theta * vel / rho**2
        out[..., 0, 1] = out[..., 1, 0] = R * theta / rho
        out[..., 1, 1] = vel
        out[..., 1, 2] = out[..., 2, 1] = R
        out[..., 2, 2] = self.cv * vel / theta
        return out

    def B(self, u):
        u = np.asarray(u, dtype=float)
        rho, theta = u[..., 0], u[..., 2]
        out = np.zeros(u.shape + (3,))
        out[..., 1, 1] = self.nu(rho) / rho
        out[..., 2, 2] = self.kappa(rho) / (rho * theta)
        return out

    def G(self, u, ux):
        u = np.asarray(u, dtype=float)
        ux = np.asarray(ux, dtype=float)
        rho, theta = u[..., 0], u[..., 2]
        rho_x, vel_x = ux[..., 0], ux[..., 1]
        out = np.zeros(np.broadcast_shapes(u.shape, ux.shape) + (3,))
        out[..., 1, 1] = self.dnu(rho) * rho_x / rho
        out[..., 2, 1] = self.nu(rho) * vel_x / (rho * theta)
        out[..., 2, 2] = self.dkappa(rho) * rho_x / (rho * theta)
        return out

    def alpha(self, u):
        return np.asarray(u, dtype=float)[..., 1]

    def sound_speed(self, u):
        theta = np.asarray(u, dtype=float)[..., 2]
        return np.sqrt(theta * self.R + theta * self.R**2 / self.cv)

    def max_speed(self, u):
        u = np.asarray(u, dtype=float)
        return np.abs(u[..., 1]) + self.sound_speed(u)

    def to_conservative(self, u):
        u = np.asarray(u, dtype=float)
        rho, vel, theta = u[..., 0], u[..., 1], u[..., 2]
        return np.stack([rho, rho * vel, rho * (self.cv * theta + 0.5 * vel**2)], axis=-1)

    def from_conservative(self, w):
        w = np.asarray(w, dtype=float)
        rho = w[..., 0]
        vel = w[..., 1] / rho
        theta = (w[..., 2] / rho - 0.5 * vel**2) / self.cv
        return np.stack([rho, vel, theta], axis=-1)

    def flux(self, u):
        u = np.asarray(u, dtype=float)
        rho, vel, theta = u[..., 0], u[..., 1], u[..., 2]
        p = self.R * rho * theta
        energy = rho * (self.cv * theta + 0.5 * vel**2)
        return np.stack([rho * vel, rho * vel**2 + p, vel * (energy + p)], axis=-1)

    def viscosity_matrix(self, u):
        u = np.asarray(u, dtype=float)
        rho, vel = u[..., 0], u[..., 1]
        nu = self.nu(rho)
        out = np.zeros(u.shape + (3,))
        out[..., 1, 1] = nu
        out[..., 2, 1] = nu * vel
        out[..., 2, 2] = self.kappa(rho)
        return out

    def conservative_jacobian(self, u, step=None):
        u = np.asarray(u, dtype=float)
        rho, vel, theta = u[..., 0], u[..., 1], u[..., 2]
        out = np.zeros(u.shape + (3,))
        out[..., 0, 0] = 1.0
        out[..., 1, 0] = vel
        out[..., 1, 1] = rho
        out[..., 2, 0] = self.cv * theta + 0.5 * vel**2
        out[..., 2, 1] = rho * vel
        out[..., 2, 2] = rho * self.cv
        return out


class MHD(Model):
    """Plane-wave MHD with ``u = (rho, b1, b2, velocity, w1, w2, theta)``.

    ``beta`` is the constant longitudinal field, ``eta`` the conductivity.
    With ``eta = 0`` the hyperbolic block is ``(rho, b)`` and ``h = 3``.
    """

    name = "mhd"
    N = 7
    conservative = True

    def __init__(
        self,
        beta: float = 1.0,
        eta: Coefficient = 1.0,
        R: float = 1.0,
        cv: float = 1.5,
        nu: Coefficient = 1.0,
        kappa: Coefficient = 1.0,
    ):
        if beta == 0:
            raise ValueError("the longitudinal field beta must be nonzero")
        if not callable(eta) and eta < 0:
            raise ValueError("eta must be nonnegative")
        self.beta = float(beta)
        self.R = float(R)
        self.cv = float(cv)
        self.eta, self.deta = _coefficient(eta)
        self.nu, self.dnu = _coefficient(nu)
        self.kappa, self.dkappa = _coefficient(kappa)
        self.resistive = callable(eta) or float(eta) > 0
        self.h = 1 if self.resistive else 3
        self.params = {"beta": beta, "eta": eta, "R": self.R, "cv": self.cv, "nu": nu, "kappa": kappa}

    def check_state(self, u):
        u = np.asarray(u)
        if np.any(u[..., 0] <= 0) or np.any(u[..., 6] <= 0):
            raise DomainError("MHD requires rho > 0 and theta > 0")
        if np.any(np.hypot(u[..., 1], u[..., 2]) == 0):
            raise DomainError("MHD requires a nonzero transverse field b")

    def E(self, u):
        u = np.asarray(u, dtype=float)
        rho, theta = u[..., 0], u[..., 6]
        out = np.zeros(u.shape + (7,))
        out[..., 0, 0] = self.R * theta / rho**2
        out[..., 1, 1] = out[..., 2, 2] = 1.0 / rho
        out[..., 3, 3] = out[..., 4, 4] = out[..., 5, 5] = 1.0
        out[..., 6, 6] = self.cv / theta
        return out

    def A(self, u):
        u = np.asarray(u, dtype=float)
        rho, b1, b2, vel, theta = u[..., 0], u[..., 1], u[..., 2], u[..., 3], u[..., 6]
        R, beta = self.R, self.beta
        out = np.zeros(u.shape + (7,))
        out[..., 0, 0] = R * theta * vel / rho**2
        out[..., 0, 3] = out[..., 3, 0] = R * theta / rho
        out[..., 1, 1] = out[..., 2, 2] = vel / rho
        out[..., 1, 3] = out[..., 3, 1] = b1 / rho
        out[..., 2, 3] = out[..., 3, 2] = b2 / rho
        out[..., 1, 4] = out[..., 4, 1] = -beta
        out[..., 2, 5] = out[..., 5, 2] = -beta
        out[..., 3, 3] = vel
        out[..., 3, 6] = out[..., 6, 3] = R
        out[..., 4, 4] = out[..., 5, 5] = vel
        out[..., 6, 6] = self.cv * vel / theta
        return out

    def B(self, u):
        u = np.asarray(u, dtype=float)
        rho, theta = u[..., 0], u[..., 6]
        out = np.zeros(u.shape + (7,))
        out[..., 1, 1] = out[..., 2, 2] = self.eta(rho) / rho
        nu = self.nu(rho)
        out[..., 3, 3] = out[..., 4, 4] = out[..., 5, 5] = nu / rho
        out[..., 6, 6] = self.kappa(rho) / (rho * theta)
        return out

    def G(self, u, ux):
        u = np.asarray(u, dtype=float)
        ux = np.asarray(ux, dtype=float)
        rho, theta = u[..., 0], u[..., 6]
        rho_x = ux[..., 0]
        out = np.zeros(np.broadcast_shapes(u.shape, ux.shape) + (7,))
        dnu = self.dnu(rho) * rho_x / rho
        for i in (3, 4, 5):
            out[..., i, i] = dnu
        deta = self.deta(rho) * rho_x / rho
        out[..., 1, 1] = out[..., 2, 2] = deta
        scale = rho * theta
        eta = self.eta(rho)
        nu = self.nu(rho)
        out[..., 6, 1] = eta * ux[..., 1] / scale
        out[..., 6, 2] = eta * ux[..., 2] / scale
        out[..., 6, 3] = nu * ux[..., 3] / scale
        out[..., 6, 4] = nu * ux[..., 4] / scale
        out[..., 6, 5] = nu * ux[..., 5] / scale
        out[..., 6, 6] = self.dkappa(rho) * rho_x / scale
        return out

    def alpha(self, u):
        return np.asarray(u, dtype=float)[..., 3]

    def to_conservative(self, u):
        u = np.asarray(u, dtype=float)
        rho, b, vel, w, theta = u[..., 0], u[..., 1:3], u[..., 3], u[..., 4:6], u[..., 6]
        energy = rho * (0.5 * vel**2 + 0.5 * np.sum(w**2, axis=-1) + self.cv * theta) + 0.5 * np.sum(b**2, axis=-1)
        return np.concatenate(
            [rho[..., None], b, (rho * vel)[..., None], rho[..., None] * w, energy[..., None]], axis=-1
        )

    def from_conservative(self, q):
        q = np.asarray(q, dtype=float)
        rho = q[..., 0]
        b = q[..., 1:3]
        vel = q[..., 3] / rho
        w = q[..., 4:6] / rho[..., None]
        kinetic = 0.5 * vel**2 + 0.5 * np.sum(w**2, axis=-1)
        theta = ((q[..., 6] - 0.5 * np.sum(b**2, axis=-1)) / rho - kinetic) / self.cv
        return np.concatenate([rho[..., None], b, vel[..., None], w, theta[..., None]], axis=-1)

    def flux(self, u):
        u = np.asarray(u, dtype=float)
        rho, b, vel, w, theta = u[..., 0], u[..., 1:3], u[..., 3], u[..., 4:6], u[..., 6]
        beta = self.beta
        p = self.R * rho * theta
        bsq = np.sum(b**2, axis=-1)
        wsq = np.sum(w**2, axis=-1)
        energy_flux = rho * vel * (0.5 * vel**2 + 0.5 * wsq + self.cv * theta) + vel * (p + bsq) - beta * np.sum(b * w, axis=-1)
        return np.concatenate(
            [
                (rho * vel)[..., None],
                vel[..., None] * b - beta * w,
                (rho * vel**2 + p + 0.5 * bsq)[..., None],
                (rho * vel)[..., None] * w - beta * b,
                energy_flux[..., None],
            ],
            axis=-1,
        )

    def viscosity_matrix(self, u):
        u = np.asarray(u, dtype=float)
        rho, b, vel, w = u[..., 0], u[..., 1:3], u[..., 3], u[..., 4:6]
        eta, nu = self.eta(rho), self.nu(rho)
        out = np.zeros(u.shape + (7,))
        out[..., 1, 1] = out[..., 2, 2] = eta
        out[..., 3, 3] = out[..., 4, 4] = out[..., 5, 5] = nu
        out[..., 6, 1] = eta * b[..., 0]
        out[..., 6, 2] = eta * b[..., 1]
        out[..., 6, 3] = nu * vel
        out[..., 6, 4] = nu * w[..., 0]
        out[..., 6, 5] = nu * w[..., 1]
        out[..., 6, 6] = self.kappa(rho)
        return out


def make_navier_stokes(R: float = 1.0, cv: float = 1.5, nu: Coefficient = 1.0, kappa: Coefficient = 1.0) -> NavierStokes:
    """Navier-Stokes in the variables (rho, u, theta) with e = cv * theta."""
    return NavierStokes(R=R, cv=cv, nu=nu, kappa=kappa)


def make_mhd(
    beta: float = 1.0,
    eta: Coefficient = 1.0,
    R: float = 1.0,
    cv: float = 1.5,
    nu: Coefficient = 1.0,
    kappa: Coefficient = 1.0,
) -> MHD:
    """Plane-wave MHD in (rho, b, u, w, theta); h = 1 if eta > 0 else 3."""
    return MHD(beta=beta, eta=eta, R=R, cv=cv, nu=nu, kappa=kappa)


def beta_map(u: np.ndarray, u_b: np.ndarray, model: Model) -> np.ndarray:
    """Boundary-condition residual ((u1 - u1b) * zeta(u2b), u2 - u2b).

    ``zeta`` is 1 when alpha is positive at the boundary state and 0
    otherwise, so the hyperbolic block only receives a condition on
    inflow boundaries.
    """
    u = np.asarray(u, dtype=float)
    u_b = np.asarray(u_b, dtype=float)
    model.check_state(u)
    model.check_state(u_b)
    h = model.h
    flag = 1.0 if model.regime(u_b) is BoundaryRegime.FULL else 0.0
    out = u - u_b
    out[:h] *= flag
    return out


@dataclass
class HypothesisReport:
    symmetric_A: bool
    positive_E: bool
    block_form: bool
    alpha_structure: bool
    kawashima_shizuta: bool
    strictly_hyperbolic: bool
    alpha_gradient: bool
    details: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(
            (
                self.symmetric_A,
                self.positive_E,
                self.block_form,
                self.alpha_structure,
                self.kawashima_shizuta,
                self.strictly_hyperbolic,
                self.alpha_gradient,
            )
        )

    def failures(self) -> list[str]:
        names = [
            "symmetric_A",
            "positive_E",
            "block_form",
            "alpha_structure",
            "kawashima_shizuta",
            "strictly_hyperbolic",
            "alpha_gradient",
        ]
        return [n for n in names if not getattr(self, n)]


def check_hypotheses(
    model: Model, u: np.ndarray, tol: float = 1e-8, B_override: np.ndarray | None = None
) -> HypothesisReport:
    """Numerically check the structural hypotheses of the normal form at ``u``.

    ``B_override`` replaces the viscosity matrix, which lets callers probe
    degenerate variants (e.g. B = 0) without building a new model.
    """
    u = np.asarray(u, dtype=float)
    N, h = model.N, model.h
    E = model.E(u)
    A = model.A(u)
    B = model.B(u) if B_override is None else np.asarray(B_override, dtype=float)
    scale = max(1.0, np.max(np.abs(A)))
    details: dict = {}

    symmetric = bool(np.max(np.abs(A - A.T)) <= tol * scale)
    e_min = float(np.min(np.linalg.eigvalsh(0.5 * (E + E.T))))
    positive = e_min > 0 and bool(np.max(np.abs(E[:h, h:])) <= tol)
    details["min_eig_E"] = e_min

    B22 = B[h:, h:]
    outside = np.concatenate([B[:h, :].ravel(), B[:, :h].ravel()])
    b22_sym = np.max(np.abs(B22 - B22.T)) <= tol * max(1.0, np.max(np.abs(B22)))
    b22_min = float(np.min(np.linalg.eigvalsh(0.5 * (B22 + B22.T)))) if N > h else 0.0
    block = bool(np.max(np.abs(outside), initial=0.0) <= tol and b22_sym and b22_min > tol)
    details["min_eig_B22"] = b22_min

    alpha = float(model.alpha(u))
    alpha_ok = bool(np.max(np.abs(A[:h, :h] - alpha * E[:h, :h])) <= tol * scale)

    # eigenvectors of E^-1 A via the symmetric reduction
    L = np.linalg.cholesky(E)
    Linv = np.linalg.inv(L)
    lam, Y = np.linalg.eigh(Linv @ A @ Linv.T)
    R = Linv.T @ Y
    ks_ratio = np.linalg.norm(B @ R, axis=0) / np.linalg.norm(R, axis=0)
    ks = bool(np.min(ks_ratio) > tol)
    details["ks_min_ratio"] = float(np.min(ks_ratio))

    gaps = np.diff(lam)
    radius = max(float(np.max(np.abs(lam))), 1e-300)
    strict = bool(np.min(gaps) > 1e-8 * radius)
    details["eigenvalues"] = lam.tolist()
    details["min_gap"] = float(np.min(gaps))

    # alpha only depends on u2 near its zero set
    grad = np.zeros(N)
    for j in range(N):
        du = np.zeros(N)
        du[j] = 1e-6
        grad[j] = (float(model.alpha(u + du)) - float(model.alpha(u - du))) / 2e-6
    grad_ok = bool(np.max(np.abs(grad[:h]), initial=0.0) <= 1e-6 and np.linalg.norm(grad[h:]) > 0)
    details["alpha_gradient"] = grad.tolist()

    return HypothesisReport(symmetric, positive, block, alpha_ok, ks, strict, grad_ok, details)
