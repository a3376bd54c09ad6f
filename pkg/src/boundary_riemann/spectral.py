"""Eigenstructure of E^-1 A, pencil roots of det(A - sigma E - s B) and layer directions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .model_core import Model

ZERO_ROOT_RTOL = 1e-7
NULL_RANK_CUTOFF = 1e-9
HYPERBOLIC_RTOL = 1e-8


class NonHyperbolic(ArithmeticError):
    """Two eigenvalues of E^-1 A are closer than the separation threshold."""


class ComplexRoot(ArithmeticError):
    """A pencil root has a significant imaginary part."""


class RankDeficient(ArithmeticError):
    """A21 does not have full column rank."""


@dataclass
class SpectralData:
    lambdas: np.ndarray
    rvecs: np.ndarray  # columns, E-orthonormal
    k: int  # zero-based index of the eigenvalue nearest 0

    @property
    def lambda_k(self) -> float:
        return float(self.lambdas[self.k])

    @property
    def r_k(self) -> np.ndarray:
        return self.rvecs[:, self.k]


@dataclass
class LayerDirections:
    R0: np.ndarray
    pencil_roots: np.ndarray  # the N - 2h slow roots, ascending
    pencil_vecs: np.ndarray  # columns aligned with pencil_roots
    char_index: int  # position of the near-zero root in pencil_roots
    q_dirs: list[np.ndarray]
    q_roots: np.ndarray
    v_k: np.ndarray
    t_vecs: np.ndarray  # columns
    t_eigs: np.ndarray
    s_dirs: list[np.ndarray]
    fast_roots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sigma: float = 0.0

    @property
    def char_root(self) -> float:
        return float(self.pencil_roots[self.char_index])

    def root_signature(self, rtol: float = ZERO_ROOT_RTOL) -> tuple[int, int, int]:
        roots = self.pencil_roots
        tol = rtol * max(float(np.max(np.abs(roots), initial=0.0)), 1.0)
        return (
            int(np.sum(roots < -tol)),
            int(np.sum(np.abs(roots) <= tol)),
            int(np.sum(roots > tol)),
        )


def symmetric_reduction(S: np.ndarray, T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of T^-1 S for symmetric S and SPD T.

    Factor T = L L^t, solve the symmetric problem for L^-1 S L^-t and map
    the eigenvectors back, so they come out T-orthonormal.
    """
    L = np.linalg.cholesky(0.5 * (T + T.T))
    Linv = sla.solve_triangular(L, np.eye(len(T)), lower=True)
    M = Linv @ S @ Linv.T
    lam, Y = np.linalg.eigh(0.5 * (M + M.T))
    return lam, Linv.T @ Y


def eig_EA(model: Model, u: np.ndarray, tol: float = HYPERBOLIC_RTOL) -> SpectralData:
    """Sorted real eigenvalues and E-orthonormal eigenvectors of E^-1 A."""
    u = np.asarray(u, dtype=float)
    lam, R = symmetric_reduction(model.A(u), model.E(u))
    radius = max(float(np.max(np.abs(lam))), 1e-300)
    if len(lam) > 1 and float(np.min(np.diff(lam))) <= tol * radius:
        raise NonHyperbolic(f"eigenvalue gap {np.min(np.diff(lam)):.3e} below threshold")
    k = int(np.argmin(np.abs(lam)))
    return SpectralData(lam, R, k)


def signature(S: np.ndarray, zero_tol: float = 1e-10, T: np.ndarray | None = None) -> tuple[int, int, int]:
    """(negative, zero, positive) eigenvalue counts of S, or of T^-1 S if T is given."""
    S = np.asarray(S, dtype=float)
    if T is None:
        lam = np.linalg.eigvalsh(0.5 * (S + S.T))
    else:
        lam, _ = symmetric_reduction(S, np.asarray(T, dtype=float))
    return (int(np.sum(lam < -zero_tol)), int(np.sum(np.abs(lam) <= zero_tol)), int(np.sum(lam > zero_tol)))


def fast_matrix(model: Model, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric pair (S, T) with T^-1 S = -B22^-1 A21 E11^-1 A21^t."""
    u = np.asarray(u, dtype=float)
    A21 = model.A21(u)
    S = -A21 @ np.linalg.solve(model.E11(u), A21.T)
    return 0.5 * (S + S.T), model.B22(u)


def _b22_orthonormalize(vectors: np.ndarray, B22: np.ndarray) -> np.ndarray:
    """Gram-Schmidt in the B22 inner product, column by column."""
    out = []
    for col in vectors.T:
        v = col.astype(float).copy()
        for prev in out:
            v -= (prev @ B22 @ v) * prev
        norm = np.sqrt(v @ B22 @ v)
        out.append(v / norm)
    return np.array(out).T


def build_R0(model: Model, u: np.ndarray) -> np.ndarray:
    """B22-orthonormal basis of the vectors orthogonal to the columns of A21."""
    u = np.asarray(u, dtype=float)
    A21 = model.A21(u)
    m, h = A21.shape
    if np.linalg.matrix_rank(A21, tol=1e-10 * max(1.0, np.max(np.abs(A21)))) < h:
        raise RankDeficient("A21 lost column rank")
    Q, _ = np.linalg.qr(A21)
    P = np.eye(m) - Q @ Q.T
    _, _, piv = sla.qr(P, pivoting=True)
    chosen = np.sort(piv[: m - h])
    return _b22_orthonormalize(P[:, chosen], model.B22(u))


def _fix_sign(v: np.ndarray, h: int) -> np.ndarray:
    block = v[h:] if len(v) > h else v
    j = int(np.argmax(np.abs(block) + 1e-12 * np.arange(len(block))))
    return v if block[j] >= 0 else -v


def _null_vectors(M: np.ndarray, count: int) -> np.ndarray:
    _, sv, Vt = np.linalg.svd(M)
    return Vt[-count:].T


def _pencil_eigs(model: Model, u: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """All finite roots of det(A - sigma E - s B), sorted by modulus."""
    M = model.A(u) - sigma * model.E(u)
    B = model.B(u)
    w = sla.eig(M, B, right=False, homogeneous_eigvals=True)
    num, den = w[0], w[1]
    scale = max(1.0, float(np.max(np.abs(M))))
    finite = np.abs(den) > 1e-12 * np.maximum(np.abs(num), scale * 1e-300)
    roots = num[finite] / den[finite]
    order = np.argsort(np.abs(roots))
    return roots[order], M


def near_zero_root(model: Model, u: np.ndarray, sigma: float) -> tuple[float, np.ndarray]:
    """Near-zero root of det(A - sigma E - s B) and its null vector.

    The vector is scaled so its u2 block has unit B22 norm with the
    dominant u2 entry positive.
    """
    u = np.asarray(u, dtype=float)
    roots, M = _pencil_eigs(model, u, sigma)
    root = roots[0]
    if abs(root.imag) > 1e-8 * max(1.0, abs(root)):
        raise ComplexRoot(f"near-zero pencil root {root}")
    root = float(root.real)
    B = model.B(u)
    vec = _null_vectors(M - root * B, 1)[:, 0]
    h = model.h
    B22 = B[h:, h:]
    vec = vec / np.sqrt(vec[h:] @ B22 @ vec[h:])
    return root, _fix_sign(vec, h)


def pencil_roots(model: Model, u: np.ndarray, sigma: float = 0.0, group_rtol: float = 1e-7) -> LayerDirections:
    """Slow roots of det(A - sigma E - s B) with null vectors and layer directions.

    The N - 2h roots of smallest modulus are the slow ones; the h remaining
    finite roots (present when alpha != sigma) blow up as alpha - sigma -> 0
    and are returned as ``fast_roots``.
    """
    u = np.asarray(u, dtype=float)
    N, h = model.N, model.h
    m = N - 2 * h
    roots, M = _pencil_eigs(model, u, sigma)
    slow = roots[:m]
    scale = max(1.0, float(np.max(np.abs(slow), initial=0.0)))
    if np.any(np.abs(slow.imag) > 1e-8 * scale):
        raise ComplexRoot(f"pencil roots {slow}")
    slow = np.sort(slow.real)
    fast = np.sort(roots[m:].real)

    B = model.B(u)
    B22 = B[h:, h:]
    vecs = np.zeros((N, m))
    i = 0
    while i < m:
        j = i + 1
        while j < m and slow[j] - slow[j - 1] <= group_rtol * scale:
            j += 1
        size = j - i
        centre = float(np.mean(slow[i:j]))
        V = _null_vectors(M - centre * B, size)
        gram = V[h:].T @ B22 @ V[h:]
        V = V @ np.linalg.inv(np.linalg.cholesky(gram)).T
        for c in range(size):
            vecs[:, i + c] = _fix_sign(V[:, c], h)
        i = j

    char = int(np.argmin(np.abs(slow)))
    q_idx = [i for i in range(m) if i != char and slow[i] < 0]
    S, T = fast_matrix(model, u)
    t_eigs, t_all = symmetric_reduction(S, T)
    neg = np.argsort(t_eigs)[:h]
    t_vecs = t_all[:, neg]
    s_dirs = _fast_directions_from_t(model, u, t_vecs)
    return LayerDirections(
        R0=build_R0(model, u),
        pencil_roots=slow,
        pencil_vecs=vecs,
        char_index=char,
        q_dirs=[vecs[:, i] for i in q_idx],
        q_roots=slow[q_idx],
        v_k=vecs[:, char],
        t_vecs=t_vecs,
        t_eigs=t_eigs[neg],
        s_dirs=s_dirs,
        fast_roots=fast,
        sigma=float(sigma),
    )


def _fast_directions_from_t(model: Model, u: np.ndarray, t_vecs: np.ndarray) -> list[np.ndarray]:
    h, N = model.h, model.N
    head = -np.linalg.solve(model.E11(u), model.A21(u).T @ t_vecs)
    out = []
    for j in range(t_vecs.shape[1]):
        s = np.zeros(N)
        s[:h] = head[:, j]
        s /= np.linalg.norm(s)
        j_max = int(np.argmax(np.abs(s[:h])))
        out.append(s if s[j_max] >= 0 else -s)
    return out


def slow_stable_directions(model: Model, u: np.ndarray) -> list[np.ndarray]:
    """Null vectors q_i of A - s_i B for the strictly negative non-characteristic roots."""
    return pencil_roots(model, u, 0.0).q_dirs


def fast_stable_directions(model: Model, u: np.ndarray) -> list[np.ndarray]:
    """Fast directions (-E11^-1 A21^t t_j, 0) for the negative eigenvectors t_j."""
    u = np.asarray(u, dtype=float)
    S, T = fast_matrix(model, u)
    lam, vecs = symmetric_reduction(S, T)
    neg = np.argsort(lam)[: model.h]
    return _fast_directions_from_t(model, u, vecs[:, neg])


def theta_derivative(model: Model, u: np.ndarray, sigma: float, step: float = 1e-6) -> float:
    """Centered difference of the near-zero pencil root in sigma."""
    plus, _ = near_zero_root(model, u, sigma + step)
    minus, _ = near_zero_root(model, u, sigma - step)
    return (plus - minus) / (2 * step)


def eigenvalue_expansion_check(model: Model, u: np.ndarray, zetas) -> float:
    """Least-squares coefficient c in w(zeta) ~ c zeta^2 for the near-zero eigenvalue of zeta A - B."""
    u = np.asarray(u, dtype=float)
    if model.h != 1:
        raise ValueError("the quadratic expansion is stated for h = 1")
    A, B = model.A(u), model.B(u)
    zetas = np.asarray(zetas, dtype=float)
    w = np.empty_like(zetas)
    for i, z in enumerate(zetas):
        eigs = np.linalg.eigvals(z * A - B)
        w[i] = eigs[np.argmin(np.abs(eigs))].real
    return float(np.sum(w * zetas**2) / np.sum(zetas**4))


def taylor_target(model: Model, u: np.ndarray) -> float:
    a21 = model.a21(u)
    return float(a21 @ np.linalg.solve(model.B22(u), a21))
