"""Pointwise spectral perturbations of the transversal Hessian.

At a point y of X the symmetric matrix H(y) is diagonalised by cyclic Jacobi
rotations. V removes the eigenvalue of smallest modulus, so ``H(y) - V`` is
singular; W shifts every eigenvalue by a small epsilon, so ``H(y) - W`` stays
invertible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .hessian import DomainError, ON_X_TOL, ProblemSpec, on_X_float, with_hessian
from .polycore import PolyMatrix, Polynomial

SYMMETRY_TOL = 1e-12
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 100
TIE_TOL = 1e-12
RATIONAL_TOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    point: tuple
    eigenvalues: np.ndarray  # sorted by modulus, ascending
    P: np.ndarray  # columns are eigenvectors
    matrix: np.ndarray

    def orthogonality_error(self) -> float:
        p = self.P.shape[0]
        return float(np.abs(self.P.T @ self.P - np.eye(p)).max(initial=0.0))

    def diagonalisation_error(self) -> float:
        D = self.P.T @ self.matrix @ self.P
        return float(np.abs(D - np.diag(self.eigenvalues)).max(initial=0.0))

    def reconstruction_error(self) -> float:
        R = self.P @ np.diag(self.eigenvalues) @ self.P.T
        return float(np.abs(R - self.matrix).max(initial=0.0))


@dataclass(frozen=True)
class PerturbationPair:
    V: np.ndarray
    W: np.ndarray
    epsilons: np.ndarray
    index: int  # position (in sorted order) of the eigenvalue removed by V


@dataclass(frozen=True)
class PairCheck:
    det_V: float
    det_W: float
    det_W_expected: float
    V_tolerance: float
    V_ok: bool
    W_ok: bool
    perturbed: ProblemSpec

    @property
    def ok(self) -> bool:
        return self.V_ok and self.W_ok


def _inf_norm(M: np.ndarray) -> float:
    return float(np.abs(M).sum(axis=1).max(initial=0.0))


def jacobi_eigen(M, point: Sequence[float] = ()) -> SpectralData:
    """Cyclic Jacobi sweeps until the off-diagonal Frobenius mass is below ``1e-14 ||M||``."""
    A = np.array(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    original = A.copy()
    p = A.shape[0]
    Q = np.eye(p)
    scale = np.linalg.norm(A)
    for _ in range(MAX_SWEEPS):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= OFFDIAG_TOL * scale:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                if A[i, j] == 0.0:
                    continue
                diff = A[j, j] - A[i, i]
                if abs(A[i, j]) < 1e-150 * abs(diff):
                    t = A[i, j] / diff  # theta would overflow; t ~ 1/(2 theta)
                else:
                    theta = diff / (2.0 * A[i, j])
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(p)
                R[i, i] = R[j, j] = c
                R[i, j] = s
                R[j, i] = -s
                A = R.T @ A @ R
                A[i, j] = A[j, i] = 0.0
                Q = Q @ R
    lam = np.diag(A).copy()
    order = sorted(range(p), key=lambda k: (abs(lam[k]), lam[k], k))
    return SpectralData(tuple(float(v) for v in point), lam[order], Q[:, order], original)


def default_eps_scale(S: SpectralData) -> float:
    return 1e-3 * (1.0 + _inf_norm(S.matrix))


def build_pair(S: SpectralData, eps_scale: float | None = None) -> PerturbationPair:
    """V kills the smallest-modulus eigenvalue; W shifts every eigenvalue by +-eps_scale."""
    if eps_scale is None:
        eps_scale = default_eps_scale(S)
    if not eps_scale > 0:
        raise ValueError("eps_scale must be positive")
    p = len(S.eigenvalues)
    d = np.zeros(p)
    d[0] = S.eigenvalues[0]
    V = S.P @ np.diag(d) @ S.P.T
    V = (V + V.T) / 2
    eps = np.full(p, float(eps_scale))
    for i, lam in enumerate(S.eigenvalues):
        if abs(eps[i] - lam) <= TIE_TOL:
            eps[i] = -eps[i]
    W = S.P @ np.diag(eps) @ S.P.T
    W = (W + W.T) / 2
    bound = abs(S.eigenvalues[0]) + TIE_TOL
    if np.abs(V).max(initial=0.0) > bound:
        raise ArithmeticError("entries of V exceed the removed eigenvalue")
    return PerturbationPair(V, W, eps, 0)


def rationalize(v: float, tol: float = RATIONAL_TOL) -> Fraction:
    """Continued-fraction approximant of ``v`` within ``tol``."""
    if not math.isfinite(v):
        raise ValueError("cannot rationalize a non-finite value")
    x = Fraction(v)
    h0, h1, k0, k1 = 0, 1, 1, 0
    rest = x
    while True:
        a = math.floor(rest)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        approx = Fraction(h1, k1)
        if abs(approx - x) <= tol or rest == a:
            return approx
        rest = 1 / (rest - a)


def rationalize_matrix(M: np.ndarray, nvars: int) -> PolyMatrix:
    """Symmetric constant PolyMatrix from a float matrix, entry by entry."""
    p = M.shape[0]
    rows = [[None] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            c = Polynomial.constant(rationalize(float(M[i, j])), nvars)
            rows[i][j] = rows[j][i] = c
    return PolyMatrix.from_rows(rows, nvars)


def spectral_at(P: ProblemSpec, y: Sequence[float], tol: float = ON_X_TOL) -> SpectralData:
    y = [float(v) for v in y]
    if len(y) != P.n:
        raise ValueError(f"point has {len(y)} coordinates, expected {P.n}")
    if not on_X_float(P, y, tol):
        raise DomainError("point is not on X within tolerance")
    return jacobi_eigen(P.H.eval_float(y), y)


def verify_pair(P: ProblemSpec, y: Sequence[float], pair: PerturbationPair,
                S: SpectralData | None = None) -> PairCheck:
    """Determinants of ``H(y) - V`` and ``H(y) - W`` against their predicted values.

    Also returns the spec with representation ``H - V`` (V rationalized), the
    germ ``f - v`` with constant perturbation coefficients.
    """
    S = S or spectral_at(P, y)
    Hy = S.matrix
    p = Hy.shape[0]
    dv = float(np.linalg.det(Hy - pair.V))
    dw = float(np.linalg.det(Hy - pair.W))
    expected = float(np.prod(S.eigenvalues - pair.epsilons))
    tol_v = 1e-8 * (1.0 + _inf_norm(Hy)) ** p
    v_ok = abs(dv) <= tol_v
    w_ok = abs(dw - expected) <= 1e-6 * abs(expected) and expected != 0.0
    perturbed = with_hessian(P, P.H - rationalize_matrix(pair.V, P.n), f"{P.name}-minus-v")
    return PairCheck(dv, dw, expected, tol_v, v_ok, w_ok, perturbed)
