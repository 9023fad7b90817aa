"""Shared test utilities: corpus access, random problems, sympy conversion."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import sympy

from infdet.hessian import make_spec
from infdet.parser import load_problem
from infdet.polycore import Polynomial

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = ROOT / "corpus"
CORPUS_NAMES = sorted(p.stem for p in CORPUS_DIR.glob("*.prob"))
# the six problems named in the corpus requirements; d-infinity-t2 is an extra variant
CORE_CORPUS = ("morse-transversal", "d-infinity", "x2y2-fail", "cusp-psi",
               "full-rank-isolated", "p3-complete-intersection")


def corpus(name: str):
    return load_problem(CORPUS_DIR / f"{name}.prob")


def random_poly(rng: random.Random, n: int, deg: int, nterms: int, const: bool = True) -> Polynomial:
    v = Polynomial.variables(n)
    p = Polynomial.zero(n)
    for _ in range(nterms):
        d = rng.randint(0 if const else 1, deg)
        m = Polynomial.constant(rng.choice([-2, -1, 1, 1, 2, 3]), n)
        for _ in range(d):
            m = m * rng.choice(v)
        p = p + m
    return p


def random_spec(seed: int):
    """n <= 4, p <= 3, psi of degree <= 2 without constant term, symmetric H of degree <= 2."""
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    p = rng.randint(1, min(3, n))
    psi = []
    while len(psi) < p:
        f = random_poly(rng, n, 2, rng.randint(1, 2), const=False)
        if f:
            psi.append(f)
    H = [[None] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            H[i][j] = H[j][i] = random_poly(rng, n, 2, rng.randint(1, 2))
    return make_spec("xyzw"[:n], psi, H, name=f"random-{seed}")


def to_sympy(p: Polynomial, syms):
    total = sympy.Integer(0)
    for m, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, m):
            term *= s ** e
        total += term
    return sympy.expand(total)


def from_sympy(expr, syms) -> Polynomial:
    poly = sympy.Poly(expr, *syms)
    terms = {}
    for m, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(m)] = Fraction(int(c.p), int(c.q))
    return Polynomial(terms, len(syms))
