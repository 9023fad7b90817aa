"""Problem data and the transversal Hessian.

A problem is a polynomial map ``psi = (psi_1..psi_p)`` cutting out ``X`` and a
symmetric polynomial matrix ``H = (f_ij)``; the germ under study is
``f = sum f_ij psi_i psi_j``. ``H`` restricted to ``X`` is the transversal
Hessian and ``D_f = det H`` there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ideals import GroebnerBasis, groebner, normal_form
from .polycore import (
    PolyMatrix,
    Polynomial,
    PolynomialError,
    determinant,
    mat_minor,
)

ON_X_TOL = 1e-9


class SpecError(ValueError):
    """Invalid problem data. ``code`` is a stable diagnostic identifier."""

    def __init__(self, code: str, message: str, line: int | None = None, col: int | None = None):
        self.code = code
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{code}: {message}")


class DomainError(ValueError):
    """A point handed to a function defined only on X does not lie on X."""


@dataclass(frozen=True)
class ChartMap:
    """Polynomial parametrisation ``t -> (gamma_1(t)..gamma_n(t))`` over ``[-1, 1]^arity``."""

    params: tuple
    components: tuple
    label: str = ""

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def nvars_target(self) -> int:
        return len(self.components)

    def image(self, t: Sequence) -> list[Fraction]:
        return [c.eval(t) for c in self.components]

    def image_float(self, t: Sequence[float]) -> np.ndarray:
        return np.array([c.eval_float(t) for c in self.components])

    def pullback(self, p: Polynomial) -> Polynomial:
        """``p o gamma`` as a polynomial in the chart parameters."""
        return p.compose(list(self.components))

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.components)

    def lipschitz_bound(self) -> float:
        """Upper bound on the Lipschitz constant of the chart over ``[-1, 1]^arity``."""
        if self.arity == 0:
            return 0.0
        total = 0.0
        for c in self.components:
            # |d gamma_i / d t_k| <= sum |coeff| * exponent on the unit box
            grad_sq = 0.0
            for k in range(self.arity):
                grad_sq += sum(abs(float(v)) * m[k] for m, v in c.items()) ** 2
            total += grad_sq
        return total ** 0.5


@dataclass(frozen=True)
class ProblemSpec:
    """Validated problem. Build through :func:`make_spec` or the file parser."""

    varnames: tuple
    psi: tuple
    H: PolyMatrix
    ycharts: tuple | None = None  # None means Y is the origin
    xcharts: tuple = ()
    extra_syzygies: tuple = ()
    name: str = "problem"
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def n(self) -> int:
        return len(self.varnames)

    @property
    def p(self) -> int:
        return len(self.psi)

    @property
    def y_is_origin(self) -> bool:
        return self.ycharts is None

    def cached(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def fmt(self, poly: Polynomial) -> str:
        return poly.format(self.varnames)


def make_spec(varnames: Sequence[str], psi: Sequence[Polynomial], H: Sequence[Sequence[Polynomial]] | PolyMatrix,
              ycharts: Sequence[ChartMap] | None = None, xcharts: Sequence[ChartMap] = (),
              extra_syzygies: Sequence[Sequence[Polynomial]] = (), name: str = "problem") -> ProblemSpec:
    """Check every problem invariant and build a :class:`ProblemSpec`.

    Raises :class:`SpecError` with one of the codes ``dimension-mismatch``,
    ``p-exceeds-n``, ``psi-constant-term``, ``H-not-symmetric``,
    ``chart-not-at-origin``, ``chart-not-on-X``, ``syzygy-not-annihilating``.
    """
    varnames = tuple(varnames)
    n = len(varnames)
    if n == 0:
        raise SpecError("dimension-mismatch", "at least one variable is required")
    psi = tuple(psi)
    p = len(psi)
    if p == 0:
        raise SpecError("dimension-mismatch", "psi must have at least one component")
    if p > n:
        raise SpecError("p-exceeds-n", f"psi has {p} components but only {n} variables")
    for i, f in enumerate(psi):
        if f.nvars != n:
            raise SpecError("dimension-mismatch", f"psi[{i + 1}] lives in the wrong ring")
        if f.constant_term() != 0:
            raise SpecError("psi-constant-term", f"psi[{i + 1}] does not vanish at the origin")
    if not isinstance(H, PolyMatrix):
        if len(H) != p or any(len(row) != p for row in H):
            raise SpecError("dimension-mismatch", f"H must be {p}x{p}")
        H = PolyMatrix.from_rows(H, n)
    if (H.rows, H.cols) != (p, p) or H.nvars != n:
        raise SpecError("dimension-mismatch", f"H must be {p}x{p} over {n} variables")
    for i in range(p):
        for j in range(i + 1, p):
            if H[i, j] != H[j, i]:
                raise SpecError("H-not-symmetric", f"H[{i + 1},{j + 1}] != H[{j + 1},{i + 1}]")
    xcharts = tuple(xcharts)
    for c in xcharts:
        _check_chart(c, n, "xcharts")
        for i, f in enumerate(psi):
            if not c.pullback(f).is_zero():
                raise SpecError("chart-not-on-X",
                                f"psi[{i + 1}] o {c.label or 'chart'} = {c.pullback(f).format(c.params)} != 0")
    if ycharts is not None:
        ycharts = tuple(ycharts)
        if not ycharts:
            raise SpecError("dimension-mismatch", "Y given by charts needs at least one chart")
        for c in ycharts:
            _check_chart(c, n, "Y")
    syz = []
    for idx, s in enumerate(extra_syzygies):
        s = tuple(s)
        if len(s) != p:
            raise SpecError("dimension-mismatch", f"syzygy {idx + 1} has {len(s)} entries, expected {p}")
        total = Polynomial.zero(n)
        for a, f in zip(s, psi):
            total = total + a * f
        if not total.is_zero():
            raise SpecError("syzygy-not-annihilating", f"syzygy {idx + 1} gives {total.format(varnames)} != 0")
        syz.append(s)
    return ProblemSpec(varnames, psi, H, ycharts, xcharts, tuple(syz), name)


def _check_chart(c: ChartMap, n: int, where: str) -> None:
    if len(c.components) != n:
        raise SpecError("dimension-mismatch",
                        f"{c.label or where + ' chart'} has {len(c.components)} components, expected {n}")
    for comp in c.components:
        if comp.nvars != c.arity:
            raise SpecError("dimension-mismatch", f"{c.label or where + ' chart'} component in wrong parameter ring")
        if comp.constant_term() != 0:
            raise SpecError("chart-not-at-origin",
                            f"{c.label or where + ' chart'} does not pass through the origin at t = 0")


# assembly and derivatives

def assemble_f(P: ProblemSpec) -> Polynomial:
    """The exact polynomial ``sum_ij f_ij psi_i psi_j``."""
    def compute():
        f = Polynomial.zero(P.n)
        for i in range(P.p):
            for j in range(P.p):
                if P.H[i, j]:
                    f = f + P.H[i, j] * P.psi[i] * P.psi[j]
        return f
    return P.cached("f", compute)


def jacobian(P: ProblemSpec) -> PolyMatrix:
    """``psi'``: the p x n matrix of partial derivatives of psi."""
    return P.cached("jacobian", lambda: PolyMatrix.from_rows(
        [[f.diff(j) for j in range(P.n)] for f in P.psi], P.n))


def gradient(P: ProblemSpec) -> list[Polynomial]:
    f = assemble_f(P)
    return P.cached("gradient", lambda: [f.diff(j) for j in range(P.n)])


def hessian_f(P: ProblemSpec) -> PolyMatrix:
    """Full n x n Hessian ``f''``."""
    g = gradient(P)
    return P.cached("hessian", lambda: PolyMatrix.from_rows(
        [[g[i].diff(j) for j in range(P.n)] for i in range(P.n)], P.n))


def psi_ideal(P: ProblemSpec) -> GroebnerBasis:
    return P.cached("gb_psi", lambda: groebner(P.psi, P.n))


def jacobian_ideal(P: ProblemSpec) -> GroebnerBasis:
    return P.cached("gb_jf", lambda: groebner(gradient(P), P.n))


def sigma_generators(P: ProblemSpec) -> list[Polynomial]:
    """All p x p minors of ``psi'`` followed by psi itself; their common zeros form Sigma."""
    from itertools import combinations

    J = jacobian(P)
    minors = [mat_minor(J, range(P.p), cols) for cols in combinations(range(P.n), P.p)]
    return minors + list(P.psi)


def det_H(P: ProblemSpec) -> Polynomial:
    return P.cached("detH", lambda: determinant(P.H.to_rows(), P.n))


@dataclass(frozen=True)
class HessIdentityResult:
    holds: bool
    residual: PolyMatrix
    witness: tuple | None = None  # (row, col, entry, normal form) of the first failing entry

    def __bool__(self) -> bool:
        return self.holds


def check_hess_identity(P: ProblemSpec) -> HessIdentityResult:
    """Check that ``f''/2 - psi'^T H psi'`` has all entries in the ideal (psi).

    Membership in the polynomial ideal implies the identity on X.
    """
    J = jacobian(P)
    half_hess = hessian_f(P).scale(Fraction(1, 2))
    residual = half_hess - (J.transpose() @ P.H @ J)
    B = psi_ideal(P)
    for i in range(P.n):
        for j in range(P.n):
            r = residual[i, j]
            if r.is_zero():
                continue
            nf = normal_form(r, B)
            if not nf.is_zero():
                return HessIdentityResult(False, residual, (i, j, r, nf))
    return HessIdentityResult(True, residual)


def on_X_exact(P: ProblemSpec, point: Sequence) -> bool:
    return all(f.eval(point) == 0 for f in P.psi)


def on_X_float(P: ProblemSpec, point: Sequence[float], tol: float = ON_X_TOL) -> bool:
    scale = 1.0 + float(np.linalg.norm(np.asarray(point, dtype=float)))
    return all(abs(f.eval_float(point)) <= tol * scale for f in P.psi)


def eval_Df(P: ProblemSpec, point: Sequence) -> Fraction:
    """Exact ``det H`` at a rational point of X; refuses points off X."""
    if len(point) != P.n:
        raise PolynomialError(f"point has {len(point)} coordinates, expected {P.n}")
    pt = [Fraction(v) if not isinstance(v, Fraction) else v for v in point]
    if not on_X_exact(P, pt):
        raise DomainError("D_f is only defined on X; psi does not vanish at the point")
    return det_H(P).eval(pt)


def transversal_hessian_float(P: ProblemSpec, point: Sequence[float], tol: float = ON_X_TOL) -> np.ndarray:
    if not on_X_float(P, point, tol):
        raise DomainError("point is not on X within tolerance")
    return P.H.eval_float(point)


def with_hessian(P: ProblemSpec, H: PolyMatrix, name: str | None = None) -> ProblemSpec:
    """Same psi, charts and syzygies with a different representation matrix."""
    return make_spec(P.varnames, P.psi, H, P.ycharts, P.xcharts, P.extra_syzygies,
                     name or P.name)
