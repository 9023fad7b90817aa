from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import from_sympy, to_sympy
from infdet.polycore import (
    PolyMatrix,
    Polynomial,
    PolynomialError,
    determinant,
    grevlex_key,
    mat_minor,
    monomials_of_degree,
    poly_arith,
)

X, Y, Z = Polynomial.variables(3)
SX, SY, SZ = sympy.symbols("x y z")


def p3(terms):
    return Polynomial(terms, 3)


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
monos = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(monos, coeffs, max_size=5).map(p3)


# arithmetic

def test_difference_of_squares():
    assert poly_arith(X + Y, X - Y, "mul") == X**2 - Y**2


def test_self_subtraction_is_empty():
    p = X**2 * Y + 3 * Z - 1
    d = poly_arith(p, p, "sub")
    assert d.is_zero()
    assert dict(d.items()) == {}


def test_rational_product():
    a = Fraction(1, 2) * X
    b = Fraction(2, 3) * Y
    assert poly_arith(a, b, "mul") == Fraction(1, 3) * X * Y


def test_varcount_mismatch():
    with pytest.raises(PolynomialError):
        poly_arith(X, Polynomial.variable(0, 2), "add")


def test_unknown_operation():
    with pytest.raises(ValueError):
        poly_arith(X, Y, "div")


def test_zero_coefficients_are_dropped():
    p = p3({(1, 0, 0): 0, (0, 1, 0): Fraction(2, 4)})
    assert dict(p.items()) == {(0, 1, 0): Fraction(1, 2)}


def test_constant_comparison():
    assert Polynomial.constant(3, 3) == 3
    assert Polynomial.constant(Fraction(1, 2), 3) == Fraction(1, 2)


# differentiation

def test_power_rule():
    assert (X**2 * Y).diff(0) == 2 * X * Y


def test_derivative_in_unused_variable():
    assert (X**2 * Y).diff(2).is_zero()


def test_d_infinity_derivative():
    assert (X**2 + Z * Y**2).diff(2) == Y**2


def test_diff_index_out_of_range():
    with pytest.raises(PolynomialError):
        X.diff(3)


# evaluation

def test_eval_examples():
    f = X**2 + Z * Y**2
    assert f.eval([0, 0, 1]) == 0
    assert f.eval([1, 1, 1]) == 2
    u, v = Polynomial.variables(2)
    assert (2 * v).eval([0, 3]) == 6


def test_eval_length_mismatch():
    with pytest.raises(PolynomialError):
        X.eval([1, 2])


def test_eval_float_matches_exact():
    f = Fraction(1, 3) * X**3 - 2 * X * Y * Z + Fraction(5, 7)
    pt = [Fraction(1, 2), Fraction(-3, 4), Fraction(2, 5)]
    assert f.eval_float([float(v) for v in pt]) == pytest.approx(float(f.eval(pt)), rel=1e-14)


# minors

def test_minor_of_d_infinity_block():
    z = Polynomial.variable(2, 3)
    M = PolyMatrix.from_rows([[2, 0], [0, 2 * z]], 3)
    assert mat_minor(M, [0, 1], [0, 1]) == 4 * z


def test_minor_by_cofactor_expansion():
    M = PolyMatrix.from_rows([[2, 0, 0, Y], [0, 2 * Z, Y, -X]], 3)
    assert mat_minor(M, [0, 1], [2, 3]) == -Y**2


def test_minor_rejects_repeated_columns():
    M = PolyMatrix.from_rows([[1, 2], [3, 4]], 3)
    with pytest.raises(PolynomialError):
        mat_minor(M, [0, 1], [1, 1])


def test_minor_rejects_malformed_selection():
    M = PolyMatrix.from_rows([[1, 2], [3, 4]], 3)
    with pytest.raises(PolynomialError):
        mat_minor(M, [0], [0, 1])
    with pytest.raises(PolynomialError):
        mat_minor(M, [0, 2], [0, 1])


def test_minor_sign_follows_column_order():
    M = PolyMatrix.from_rows([[X, Y], [Z, 1]], 3)
    assert mat_minor(M, [0, 1], [1, 0]) == -mat_minor(M, [0, 1], [0, 1])


def test_determinant_matches_sympy():
    rows = [[X + 1, Y, Z], [Y, Z**2, X], [Polynomial.constant(Fraction(1, 2), 3), X * Y, Y - Z]]
    ours = determinant(rows, 3)
    ref = sympy.Matrix([[to_sympy(e, (SX, SY, SZ)) for e in r] for r in rows]).det()
    assert ours == from_sympy(sympy.expand(ref), (SX, SY, SZ))


# orders and helpers

def test_grevlex_order():
    # x^2 > xy > y^2 > xz > yz > z^2 in degree two
    assert monomials_of_degree(3, 2) == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    assert grevlex_key((0, 0, 3)) > grevlex_key((1, 0, 0))


def test_compose_pullback():
    (t,) = Polynomial.variables(1)
    f = X**2 + Z * Y**2
    assert f.compose([t, t**2, Polynomial.constant(3, 1)]) == t**2 + 3 * t**4


def test_format_round_values():
    f = Fraction(-1, 2) * X**2 + 3 * Y - Fraction(2, 3)
    assert f.format("xyz") == "-1/2*x^2 + 3*y - 2/3"


# properties

@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(polys)
def test_mixed_partials_commute(p):
    for i in range(3):
        for j in range(3):
            assert p.diff(i).diff(j) == p.diff(j).diff(i)


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, 2))
def test_leibniz(a, b, j):
    assert (a * b).diff(j) == a.diff(j) * b + a * b.diff(j)


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.lists(coeffs, min_size=3, max_size=3))
def test_eval_is_multiplicative(a, b, pt):
    assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
    assert (a + b).eval(pt) == a.eval(pt) + b.eval(pt)


@settings(max_examples=40, deadline=None)
@given(st.lists(polys, min_size=4, max_size=4))
def test_equal_columns_give_zero_minor(entries):
    a, b, c, d = entries
    M = PolyMatrix.from_rows([[a, b, a], [c, d, c]], 3)
    assert mat_minor(M, [0, 1], [0, 2]).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_product_matches_sympy(a, b):
    syms = (SX, SY, SZ)
    assert a * b == from_sympy(sympy.expand(to_sympy(a, syms) * to_sympy(b, syms)), syms)
