"""Exact multivariate polynomials over the rationals.

Polynomials are sparse maps from exponent tuples to :class:`fractions.Fraction`
coefficients. Monomials are plain tuples of non-negative ints; the global
monomial order is graded reverse-lexicographic with ``x_1 > x_2 > ... > x_n``.

Example:
    >>> x, y = Polynomial.variables(2)
    >>> (x + y) * (x - y)
    Polynomial(x0^2 - x1^2)
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple  # tuple[int, ...]


class PolynomialError(ValueError):
    """Raised on malformed polynomial input (variable-count mismatch, bad index)."""


def grevlex_key(m: Monomial) -> tuple:
    """Sort key realising the graded reverse-lexicographic order (larger is bigger)."""
    return (sum(m), tuple(-e for e in reversed(m)))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(ea <= eb for ea, eb in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(ea, eb) for ea, eb in zip(a, b))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(ea + eb for ea, eb in zip(a, b))


def monomial_quo(a: Monomial, b: Monomial) -> Monomial:
    return tuple(ea - eb for ea, eb in zip(a, b))


def monomials_of_degree(nvars: int, k: int) -> list[Monomial]:
    """All exponent tuples of total degree ``k``, in decreasing grevlex order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), k):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return out


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise PolynomialError("floating coefficients are not accepted; use Fraction")
    return Fraction(c)


class Polynomial:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, nvars: int = 0):
        self.nvars = nvars
        clean: dict = {}
        if terms:
            for m, c in terms.items():
                m = tuple(int(e) for e in m)
                if len(m) != nvars:
                    raise PolynomialError(
                        f"monomial {m} has {len(m)} exponents, expected {nvars}")
                if any(e < 0 for e in m):
                    raise PolynomialError(f"negative exponent in {m}")
                c = _as_fraction(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
                    if not clean[m]:
                        del clean[m]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, nvars: int) -> "Polynomial":
        # Trusted constructor: terms already clean (no zeros, tuples of right length).
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        c = _as_fraction(c)
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def variable(cls, j: int, nvars: int) -> "Polynomial":
        if not 0 <= j < nvars:
            raise PolynomialError(f"variable index {j} out of range for {nvars} variables")
        m = [0] * nvars
        m[j] = 1
        return cls._raw({tuple(m): Fraction(1)}, nvars)

    @classmethod
    def variables(cls, nvars: int) -> list["Polynomial"]:
        return [cls.variable(j, nvars) for j in range(nvars)]

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Polynomial":
        return cls({tuple(m): c}, len(m))

    # basic accessors

    @property
    def terms(self) -> dict:
        """Copy of the term map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in decreasing grevlex order (the canonical order)."""
        return sorted(self._terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise PolynomialError("zero polynomial has no leading term")
        return max(self._terms, key=grevlex_key)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.leading_monomial()]

    def monic(self) -> "Polynomial":
        if not self._terms:
            return self
        lc = self.leading_coefficient()
        if lc == 1:
            return self
        return self._raw({m: c / lc for m, c in self._terms.items()}, self.nvars)

    # arithmetic

    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise PolynomialError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for m, c in other._terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return self._raw(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for m, c in other._terms.items():
            s = terms.get(m, 0) - c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return self._raw(terms, self.nvars)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c0 = Fraction(other)
            if not c0:
                return Polynomial.zero(self.nvars)
            return self._raw({m: c * c0 for m, c in self._terms.items()}, self.nvars)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                terms[m] = terms.get(m, 0) + ca * cb
        return self._raw({m: c for m, c in terms.items() if c}, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("exponent must be a non-negative integer")
        result = Polynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, m: Monomial, c: Fraction) -> "Polynomial":
        """Multiply by the single term ``c * x^m``."""
        return self._raw(
            {tuple(a + b for a, b in zip(mm, m)): cc * c for mm, cc in self._terms.items()},
            self.nvars)

    # calculus and evaluation

    def diff(self, j: int) -> "Polynomial":
        """Partial derivative with respect to variable ``j`` (0-based)."""
        if not 0 <= j < self.nvars:
            raise PolynomialError(f"variable index {j} out of range for {self.nvars} variables")
        terms = {}
        for m, c in self._terms.items():
            e = m[j]
            if e:
                mm = list(m)
                mm[j] = e - 1
                terms[tuple(mm)] = c * e
        return self._raw(terms, self.nvars)

    def __call__(self, *point):
        return self.eval(point)

    def eval(self, point: Sequence) -> Fraction:
        """Exact value at a rational point (Horner accumulation per variable)."""
        if len(point) != self.nvars:
            raise PolynomialError(
                f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [_as_fraction(v) for v in point]
        return _horner(list(self._terms.items()), pt, 0)

    def eval_float(self, point: Sequence[float]) -> float:
        """Binary-64 evaluation; no exactness guarantee."""
        if len(point) != self.nvars:
            raise PolynomialError(
                f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0.0
        for m, c in self._terms.items():
            t = float(c)
            for v, e in zip(point, m):
                if e:
                    t *= float(v) ** e
            total += t
        return total

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[j]`` for variable ``j``; result lives in the ring of ``subs``."""
        if len(subs) != self.nvars:
            raise PolynomialError(f"need {self.nvars} substitutions, got {len(subs)}")
        if not subs:
            raise PolynomialError("cannot compose a polynomial in zero variables")
        target = subs[0].nvars
        for s in subs:
            if s.nvars != target:
                raise PolynomialError("substitutions live in different rings")
        powers: list[dict] = [{0: Polynomial.constant(1, target)} for _ in subs]

        def power(j, e):
            cache = powers[j]
            if e not in cache:
                cache[e] = power(j, e - 1) * subs[j]
            return cache[e]

        result = Polynomial.zero(target)
        for m, c in self._terms.items():
            t = Polynomial.constant(c, target)
            for j, e in enumerate(m):
                if e:
                    t = t * power(j, e)
            result = result + t
        return result

    def float_packed(self) -> tuple[np.ndarray, np.ndarray]:
        """``(exponents, coefficients)`` arrays for the vectorised float kernels."""
        items = self.sorted_terms()
        exps = np.array([m for m, _ in items], dtype=np.int64).reshape(len(items), self.nvars)
        coeffs = np.array([float(c) for _, c in items], dtype=np.float64)
        return exps, coeffs

    # comparison and display

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(other, self.nvars)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def format(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{j}" for j in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Polynomial({self.format()})"


def _horner(terms: list, pt: list, j: int) -> Fraction:
    # Recursive Horner scheme in variable j over the remaining variables.
    if j == len(pt):
        return sum((c for _, c in terms), Fraction(0))
    groups: dict[int, list] = {}
    for m, c in terms:
        groups.setdefault(m[j], []).append((m, c))
    acc = Fraction(0)
    v = pt[j]
    prev = max(groups, default=0)
    for e in sorted(groups, reverse=True):
        acc = acc * v ** (prev - e) + _horner(groups[e], pt, j + 1)
        prev = e
    return acc * v ** prev


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Dispatch ``add``, ``sub`` or ``mul`` on two polynomials of the same ring."""
    if a.nvars != b.nvars:
        raise PolynomialError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PolynomialError(f"unknown operation {op!r}")


class PolyMatrix:
    """Dense row-major matrix of polynomials sharing one ring."""

    __slots__ = ("rows", "cols", "entries", "nvars")

    def __init__(self, rows: int, cols: int, entries: Sequence[Polynomial], nvars: int | None = None):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise PolynomialError(f"expected {rows * cols} entries, got {len(entries)}")
        if nvars is None:
            polys = [e for e in entries if isinstance(e, Polynomial)]
            if not polys:
                raise PolynomialError("cannot infer variable count without a polynomial entry")
            nvars = polys[0].nvars
        entries = tuple(e if isinstance(e, Polynomial) else Polynomial.constant(e, nvars) for e in entries)
        for e in entries:
            if e.nvars != nvars:
                raise PolynomialError("matrix entries live in different rings")
        self.rows, self.cols, self.entries, self.nvars = rows, cols, entries, nvars

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Polynomial]], nvars: int | None = None) -> "PolyMatrix":
        r = len(rows)
        c = len(rows[0]) if rows else 0
        if any(len(row) != c for row in rows):
            raise PolynomialError("ragged matrix rows")
        return cls(r, c, [e for row in rows for e in row], nvars)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Polynomial]], nrows: int, nvars: int) -> "PolyMatrix":
        for col in columns:
            if len(col) != nrows:
                raise PolynomialError("column length mismatch")
        return cls(nrows, len(columns),
                   [columns[c][r] for r in range(nrows) for c in range(len(columns))], nvars)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Polynomial]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> list[Polynomial]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list[Polynomial]]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix.from_columns(self.to_rows(), self.cols, self.nvars)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise PolynomialError("matrix shape mismatch")
        zero = Polynomial.zero(self.nvars)
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    acc = acc + self[i, k] * other[k, j]
                out.append(acc)
        return PolyMatrix(self.rows, other.cols, out, self.nvars)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise PolynomialError("matrix shape mismatch")
        return PolyMatrix(self.rows, self.cols,
                          [a + b for a, b in zip(self.entries, other.entries)], self.nvars)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise PolynomialError("matrix shape mismatch")
        return PolyMatrix(self.rows, self.cols,
                          [a - b for a, b in zip(self.entries, other.entries)], self.nvars)

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [e * c for e in self.entries], self.nvars)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols))

    def eval(self, point: Sequence) -> list[list[Fraction]]:
        return [[e.eval(point) for e in row] for row in self.to_rows()]

    def eval_float(self, point: Sequence[float]) -> np.ndarray:
        return np.array([[e.eval_float(point) for e in row] for row in self.to_rows()],
                        dtype=np.float64).reshape(self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols}, {[[str(e) for e in r] for r in self.to_rows()]})"


def determinant(rows: Sequence[Sequence[Polynomial]], nvars: int) -> Polynomial:
    """Cofactor expansion along the first row."""
    k = len(rows)
    if k == 0:
        return Polynomial.constant(1, nvars)
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = Polynomial.zero(nvars)
    for j in range(k):
        a = rows[0][j]
        if not a:
            continue
        sub = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * determinant(sub, nvars)
        total = total + term if j % 2 == 0 else total - term
    return total


def mat_minor(M: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> Polynomial:
    """Determinant of the submatrix on ``rows`` x ``cols`` (0-based, order respected)."""
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise PolynomialError("minor needs as many rows as columns")
    if len(rows) > min(M.rows, M.cols):
        raise PolynomialError("minor order exceeds matrix size")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise PolynomialError("repeated index in minor selection")
    if any(not 0 <= i < M.rows for i in rows) or any(not 0 <= j < M.cols for j in cols):
        raise PolynomialError("minor index out of range")
    sub = [[M[i, j] for j in cols] for i in rows]
    return determinant(sub, M.nvars)


def float_det(a: np.ndarray) -> float:
    """Determinant of a small float matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape == (0, 0):
        return 1.0
    return float(np.linalg.det(a))


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)


def stack_packed(polys: Iterable[Polynomial], nvars: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Pack several polynomials as ``(exps, coeffs, owner, count)`` for batch evaluation."""
    exps, coeffs, owner = [], [], []
    count = 0
    for idx, p in enumerate(polys):
        count = idx + 1
        for m, c in p.sorted_terms():
            exps.append(m)
            coeffs.append(float(c))
            owner.append(idx)
    e = np.array(exps, dtype=np.int64).reshape(len(exps), nvars)
    return e, np.array(coeffs, dtype=np.float64), np.array(owner, dtype=np.int64), count
