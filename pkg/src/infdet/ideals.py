"""Reduced Groebner bases, normal forms and finite-order power certificates.

All computations happen in the polynomial ring QQ[x_1..x_n] under grevlex.
Membership in a polynomial ideal is a sufficient condition for membership in
the corresponding ideal of smooth germs, so positive answers stay sound when
read locally; negative answers are only "not certified".
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .polycore import (
    Monomial,
    Polynomial,
    PolynomialError,
    grevlex_key,
    monomial_divides,
    monomial_lcm,
    monomial_quo,
    monomials_of_degree,
)

ORDER = "grevlex"


try:
    from gmpy2 import mpq as _fast_q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _fast_q = Fraction


def _heap_key(m: Monomial) -> tuple:
    # heapq is a min-heap; this key's minimum is the grevlex maximum.
    return (-sum(m), tuple(reversed(m)))


def _to_fast(p: Polynomial) -> dict:
    return {m: _fast_q(c.numerator, c.denominator) for m, c in p.items()}


def _from_fast(terms: dict, nvars: int) -> Polynomial:
    return Polynomial._raw(
        {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in terms.items() if c}, nvars)


def _lead(terms: dict) -> Monomial:
    return max(terms, key=grevlex_key)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced, monic Groebner basis sorted by increasing leading monomial."""

    generators: tuple
    original: tuple
    nvars: int
    order: str = ORDER
    leading: tuple = field(default=(), repr=False, compare=False)
    fast: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "leading", tuple(g.leading_monomial() for g in self.generators))
        object.__setattr__(self, "fast", tuple(_to_fast(g) for g in self.generators))

    def is_unit(self) -> bool:
        return any(not any(m) for m in self.leading)

    def is_zero_ideal(self) -> bool:
        return not self.generators

    def normal_form(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self)

    def member(self, p: Polynomial) -> bool:
        return member(p, self)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def _divide(terms: dict, basis: Sequence[dict], leading: Sequence[Monomial], track: bool = False):
    """Multivariate division on raw term maps; returns ``(remainder, quotients_or_None)``.

    Always reduces by the first divisor in basis order (the basis is kept
    sorted by leading monomial), so the remainder is deterministic.
    """
    p = dict(terms)
    rem: dict = {}
    quotients = [dict() for _ in basis] if track else None
    heap = [_heap_key(m) for m in p]
    heapq.heapify(heap)
    queued = set(p)
    while heap:
        key = heapq.heappop(heap)
        m = tuple(reversed(key[1]))
        queued.discard(m)
        c = p.pop(m, None)
        if c is None:
            continue
        for idx, lm in enumerate(leading):
            if monomial_divides(lm, m):
                g = basis[idx]
                q = monomial_quo(m, lm)
                factor = c / g[lm]
                if track:
                    quotients[idx][q] = quotients[idx].get(q, 0) + factor
                for gm, gc in g.items():
                    if gm == lm:
                        continue
                    tm = tuple(a + b for a, b in zip(gm, q))
                    v = p.get(tm, 0) - factor * gc
                    if v:
                        p[tm] = v
                        if tm not in queued:
                            queued.add(tm)
                            heapq.heappush(heap, _heap_key(tm))
                    else:
                        p.pop(tm, None)
                break
        else:
            rem[m] = c
    return rem, quotients


def divide(p: Polynomial, B: GroebnerBasis) -> tuple[list[Polynomial], Polynomial]:
    """Return quotients ``q`` and remainder ``r`` with ``p = sum q_i * g_i + r``."""
    if p.nvars != B.nvars:
        raise PolynomialError(f"variable count mismatch: {p.nvars} vs {B.nvars}")
    rem, quo = _divide(_to_fast(p), B.fast, B.leading, track=True)
    return [_from_fast(q, B.nvars) for q in quo], _from_fast(rem, B.nvars)


def normal_form(p: Polynomial, B: GroebnerBasis) -> Polynomial:
    if p.nvars != B.nvars:
        raise PolynomialError(f"variable count mismatch: {p.nvars} vs {B.nvars}")
    rem, _ = _divide(_to_fast(p), B.fast, B.leading)
    return _from_fast(rem, B.nvars)


def member(p: Polynomial, B: GroebnerBasis) -> bool:
    if p.is_zero():
        return True
    if B.is_unit():
        return True
    return normal_form(p, B).is_zero()


def s_polynomial(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm = monomial_lcm(lf, lg)
    return (f.mul_term(monomial_quo(lcm, lf), 1 / f._terms[lf])
            - g.mul_term(monomial_quo(lcm, lg), 1 / g._terms[lg]))


def _monic(terms: dict) -> dict:
    lc = terms[_lead(terms)]
    return {m: c / lc for m, c in terms.items()}


def _spoly(f: dict, lf: Monomial, g: dict, lg: Monomial) -> dict:
    lcm = monomial_lcm(lf, lg)
    qf, qg = monomial_quo(lcm, lf), monomial_quo(lcm, lg)
    out: dict = {}
    for m, c in f.items():
        if m != lf:
            out[tuple(a + b for a, b in zip(m, qf))] = c
    for m, c in g.items():
        if m != lg:
            tm = tuple(a + b for a, b in zip(m, qg))
            v = out.get(tm, 0) - c
            if v:
                out[tm] = v
            else:
                out.pop(tm, None)
    return out


def _coprime(a: Monomial, b: Monomial) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _buchberger(gens: list[dict]) -> list[dict]:
    """Buchberger's algorithm with the Gebauer-Moeller pair update.

    ``gens`` are monic raw term maps; returns a (non-reduced) Groebner basis.
    """
    polys: list[dict] = []
    leads: list[Monomial] = []
    sugar: list[int] = []
    active: list[int] = []  # indices whose leading monomial is not redundant
    pairs: dict = {}        # (i, j) -> selection key

    def pair_key(i, j):
        lcm = monomial_lcm(leads[i], leads[j])
        d = sum(lcm)
        s = max(sugar[i] + d - sum(leads[i]), sugar[j] + d - sum(leads[j]))
        return (s, grevlex_key(lcm), i, j)

    def update(ih: int) -> None:
        nonlocal active
        mh = leads[ih]
        # candidate new pairs (h, g)
        cands = list(active)
        keep: list[int] = []
        for pos, ig in enumerate(cands):
            mg = leads[ig]
            lcm_hg = monomial_lcm(mh, mg)
            if _coprime(mh, mg):
                keep.append(ig)
                continue
            dominated = any(
                monomial_divides(monomial_lcm(mh, leads[other]), lcm_hg)
                for other in cands[pos + 1:]
            ) or any(
                monomial_divides(monomial_lcm(mh, leads[other]), lcm_hg)
                for other in keep
            )
            if not dominated:
                keep.append(ig)
        new_pairs = [ig for ig in keep if not _coprime(mh, leads[ig])]
        # prune old pairs made redundant by h
        for (i, j) in list(pairs):
            lcm_ij = monomial_lcm(leads[i], leads[j])
            if (monomial_divides(mh, lcm_ij)
                    and monomial_lcm(leads[i], mh) != lcm_ij
                    and monomial_lcm(leads[j], mh) != lcm_ij):
                del pairs[(i, j)]
        for ig in new_pairs:
            i, j = min(ig, ih), max(ig, ih)
            pairs[(i, j)] = pair_key(i, j)
        active = [ig for ig in active if not monomial_divides(mh, leads[ig])] + [ih]

    def reduce_against_active(terms: dict) -> dict:
        basis = [polys[i] for i in active]
        lms = [leads[i] for i in active]
        rem, _ = _divide(terms, basis, lms)
        return rem

    def add(terms: dict, sug: int) -> None:
        terms = _monic(terms)
        sugar.append(max(sug, max(sum(m) for m in terms)))
        polys.append(terms)
        leads.append(_lead(terms))
        update(len(polys) - 1)

    for g in sorted(gens, key=lambda t: grevlex_key(_lead(t))):
        rem = reduce_against_active(g)
        if rem:
            add(rem, max(sum(m) for m in g))

    while pairs:
        (i, j) = min(pairs, key=pairs.__getitem__)
        sug = pairs.pop((i, j))[0]
        s = _spoly(polys[i], leads[i], polys[j], leads[j])
        if not s:
            continue
        rem = reduce_against_active(s)
        if rem:
            add(rem, sug)
    return [polys[i] for i in active]


def _reduce_basis(basis: list[dict]) -> list[dict]:
    basis = sorted((_monic(g) for g in basis), key=lambda g: grevlex_key(_lead(g)))
    minimal: list[dict] = []
    for g in basis:
        lm = _lead(g)
        if any(monomial_divides(_lead(h), lm) for h in minimal):
            continue
        minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        rem, _ = _divide(g, others, [_lead(h) for h in others])
        reduced.append(_monic(rem))
    reduced.sort(key=lambda g: grevlex_key(_lead(g)))
    return reduced


@lru_cache(maxsize=256)
def _groebner_cached(gens: tuple, nvars: int) -> tuple:
    nonzero = [g for g in gens if g]
    if not nonzero:
        return ()
    if any(g.is_constant() for g in nonzero):
        return (Polynomial.constant(1, nvars),)
    basis = _reduce_basis(_buchberger([_monic(_to_fast(g)) for g in nonzero]))
    return tuple(_from_fast(g, nvars) for g in basis)


def groebner(gens: Sequence[Polynomial], nvars: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis (grevlex) of the ideal generated by ``gens``.

    Zero generators are discarded; an empty list yields the zero ideal.
    """
    gens = tuple(gens)
    if nvars is None:
        if not gens:
            raise PolynomialError("cannot infer variable count from an empty generator list")
        nvars = gens[0].nvars
    for g in gens:
        if g.nvars != nvars:
            raise PolynomialError("generators live in different rings")
    return GroebnerBasis(_groebner_cached(gens, nvars), gens, nvars)


def is_groebner(B: GroebnerBasis) -> bool:
    """Direct check: every S-polynomial of basis pairs reduces to zero."""
    gs = B.generators
    for i in range(len(gs)):
        for j in range(i + 1, len(gs)):
            if not normal_form(s_polynomial(gs[i], gs[j]), B).is_zero():
                return False
    return True


def is_reduced(B: GroebnerBasis) -> bool:
    gs = B.generators
    for idx, g in enumerate(gs):
        if g.leading_coefficient() != 1:
            return False
        for h_idx, h in enumerate(gs):
            if h_idx == idx:
                continue
            lh = h.leading_monomial()
            if any(monomial_divides(lh, m) for m in g._terms):
                return False
    return True


@dataclass(frozen=True)
class PowerCertificate:
    """Outcome of searching the least ``k`` with ``m^k * cofactors`` inside an ideal.

    ``k`` is ``None`` when no order up to ``k_max`` works. ``witness`` holds one
    entry per probed product at the decisive order: ``(monomial, cofactor index
    or None, quotients, remainder)``. On success every remainder is zero and the
    quotients reconstruct the product from the basis; on failure the entries
    are the obstructions found at ``k_max``.
    """

    k: int | None
    k_max: int
    witness: tuple = ()
    with_cofactors: bool = False

    @property
    def succeeded(self) -> bool:
        return self.k is not None

    def describe(self) -> str:
        if self.k is None:
            return f"none up to {self.k_max}"
        return f"k = {self.k}"


def _products(nvars: int, k: int, cofactors):
    zero_one = Polynomial.constant(1, nvars)
    for m in monomials_of_degree(nvars, k):
        mono = zero_one.mul_term(m, Fraction(1))
        if cofactors is None:
            yield m, None, mono
        else:
            for ci, c in enumerate(cofactors):
                yield m, ci, mono * c


def power_certificate(B: GroebnerBasis, k_max: int = 8,
                      cofactor: Sequence[Polynomial] | None = None) -> PowerCertificate:
    """Smallest ``k <= k_max`` with every degree-``k`` monomial (times each cofactor) in the ideal."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    cofactors = None if cofactor is None else list(cofactor)
    if cofactors is not None:
        for c in cofactors:
            if c.nvars != B.nvars:
                raise PolynomialError("cofactor lives in a different ring")
    last_fail: list = []
    for k in range(k_max + 1):
        trace = []
        failed = []
        for m, ci, prod in _products(B.nvars, k, cofactors):
            q, r = divide(prod, B)
            trace.append((m, ci, tuple(q), r))
            if not r.is_zero():
                failed.append((m, ci, (), r))
        if not failed:
            return PowerCertificate(k, k_max, tuple(trace), cofactors is not None)
        last_fail = failed
    return PowerCertificate(None, k_max, tuple(last_fail), cofactors is not None)
