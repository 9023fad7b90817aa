from fractions import Fraction

import pytest

from helpers import CORPUS_NAMES, corpus, random_spec
from infdet.fitting import (
    SizeCapError,
    build_columns,
    build_lambda,
    column_contract,
    cramer_cofactors,
    fitting_ideal,
    sigma,
    trivial_syzygies,
    v_germ,
    v_germ_certificate,
    verify_dol,
    verify_mudet,
    verify_mudet_all,
    verify_psi_power_grad,
)
from infdet.hessian import gradient, make_spec
from infdet.ideals import groebner, member
from infdet.polycore import Polynomial, mat_minor

X, Y, Z = Polynomial.variables(3)
ONE, ZERO = Polynomial.constant(1, 3), Polynomial.zero(3)


def d_infinity():
    return make_spec("xyz", [X, Y], [[ONE, ZERO], [ZERO, Z]])


def morse():
    return make_spec("xyz", [X, Y], [[ONE, ZERO], [ZERO, ONE]])


def x2y2():
    x, y = Polynomial.variables(2)
    return make_spec("xy", [x], [[y**2]])


# columns and syzygies

def test_columns_d_infinity():
    assert build_columns(d_infinity()) == [[2, 0], [0, 2 * Z], [0, Y]]


def test_columns_morse():
    assert build_columns(morse()) == [[2, 0], [0, 2], [0, 0]]


def test_columns_zero_germ():
    P = make_spec("xyz", [X, Y], [[ZERO, ZERO], [ZERO, ZERO]])
    assert all(e.is_zero() for h in build_columns(P) for e in h)


def test_trivial_syzygies():
    assert trivial_syzygies(d_infinity()) == [[Y, -X]]
    assert trivial_syzygies(x2y2()) == []
    P = corpus("full-rank-isolated")
    assert trivial_syzygies(P) == [[Y, -X, ZERO], [Z, ZERO, -X], [ZERO, Z, -Y]]


# Lambda and K_f

def test_lambda_d_infinity():
    F = build_lambda(d_infinity())
    assert F.lam.to_rows() == [[2, 0, 0, Y], [0, 2 * Z, Y, -X]]
    assert F.column_tags == (("H", 0), ("H", 1), ("H", 2), ("Syz", 0, 1))
    assert set(F.kf_gens) == {Z, Y, X, Z * Y, Y**2}


def test_lambda_x2y2():
    x, y = Polynomial.variables(2)
    F = build_lambda(x2y2())
    assert F.lam.to_rows() == [[2 * y**2, 2 * x * y]]
    assert set(F.kf_gens) == {y**2, x * y}


def test_morse_kf_contains_unit():
    F = build_lambda(morse())
    assert Polynomial.constant(1, 3) in F.kf_gens
    assert mat_minor(F.lam, [0, 1], [0, 1]) == 4


def test_kf_ignores_extra_syzygy_order():
    w = Polynomial.variable(3, 4)
    x, y, z = Polynomial.variables(4)[:3]
    psi = [x * y, x * z]
    H = [[Polynomial.constant(1, 4), w], [w, Polynomial.constant(2, 4)]]
    extra = [[z, -y], [z * w, -y * w]]
    P1 = make_spec("xyzw", psi, H, extra_syzygies=extra)
    P2 = make_spec("xyzw", psi, H, extra_syzygies=extra[::-1])
    assert set(build_lambda(P1).kf_gens) == set(build_lambda(P2).kf_gens)


def test_isolated_constant_form_gives_unit_ideal():
    assert fitting_ideal(corpus("full-rank-isolated")).is_unit()
    assert not fitting_ideal(corpus("d-infinity")).is_unit()


def test_size_cap():
    names = [f"x{i}" for i in range(31)]
    v = Polynomial.variables(31)
    one = Polynomial.constant(1, 31)
    zero = Polynomial.zero(31)
    H = [[one if i == j else zero for j in range(3)] for i in range(3)]
    P = make_spec(names, v[:3], H)
    with pytest.raises(SizeCapError):
        build_lambda(P)


# inclusions and identities

def test_dol_examples():
    assert verify_dol(d_infinity())
    assert verify_dol(x2y2())
    zero = make_spec("xyz", [X, Y], [[ZERO, ZERO], [ZERO, ZERO]])
    assert build_lambda(zero).kf_gens == ()
    assert verify_dol(zero)


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_dol_methods_agree(name):
    P = corpus(name)
    assert verify_dol(P, method="certificate")
    assert verify_dol(P, method="groebner")


def test_dol_certificate_with_extra_syzygy():
    w = Polynomial.variable(3, 4)
    x, y, z = Polynomial.variables(4)[:3]
    P = make_spec("xyzw", [x * y, x * z], [[Polynomial.constant(1, 4), w], [w, z]],
                  extra_syzygies=[[z, -y]])
    assert verify_dol(P, method="certificate")
    assert verify_dol(P, method="groebner")


def test_dol_unknown_method():
    with pytest.raises(ValueError):
        verify_dol(d_infinity(), method="magic")


def test_mudet_d_infinity():
    P = d_infinity()
    F = build_lambda(P)
    c = verify_mudet(P, F, (0, 1))
    mu, a_mu, b_mu = c.witness
    assert c and mu == 1 and a_mu == 4 * Z and b_mu.is_zero()
    c = verify_mudet(P, F, (0, 2))
    mu, a_mu, b_mu = c.witness
    assert c and mu.is_zero() and a_mu == 2 * Y and b_mu == -2 * Y


def test_mudet_p1():
    # psi = x, f = x^2 y: mu = 1, a_mu = 2y = 2^1 * mu * det H, so b_mu = 0
    x, y = Polynomial.variables(2)
    P = make_spec("xy", [x], [[y]])
    c = verify_mudet(P, None, (0,))
    mu, a_mu, b_mu = c.witness
    assert c and mu == 1 and a_mu == 2 * y and b_mu.is_zero()


def test_mudet_rejects_bad_columns():
    with pytest.raises(ValueError):
        verify_mudet(d_infinity(), None, (1, 0))


def test_psi_power_grad_examples():
    assert verify_psi_power_grad(morse())
    assert verify_psi_power_grad(d_infinity())
    assert verify_psi_power_grad(x2y2()).status == "not-applicable"


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_psi_power_grad_methods_agree(name):
    P = corpus(name)
    a = verify_psi_power_grad(P, method="certificate")
    b = verify_psi_power_grad(P, method="groebner")
    assert a.status == b.status
    assert a.ok


def test_psi_power_products_by_groebner_on_d_infinity():
    P = d_infinity()
    B = groebner(build_lambda(P).kf_gens)
    for g in gradient(P):
        assert member(g, B)


def test_v_germ_certificate_reconstructs():
    P = corpus("p3-complete-intersection")
    F = build_lambda(P)
    cert = v_germ_certificate(P, F)
    assert cert is not None and cert.verify(P, F)
    assert cert.target == v_germ(P)


def test_cramer_representation_of_dol():
    # minor * psi_i = sum_c adj[c][i] * sigma(column c), with sigma(h^j) = df/dx_j
    for name in ("d-infinity", "p3-complete-intersection", "cusp-psi"):
        P = corpus(name)
        F = build_lambda(P)
        for subset in F.minor_subsets:
            minor = mat_minor(F.lam, range(P.p), subset)
            adj = cramer_cofactors(P, F, subset)
            for i in range(P.p):
                total = Polynomial.zero(P.n)
                for c, col in enumerate(subset):
                    total = total + adj[c][i] * sigma(P, F.lam.column(col))
                assert total == minor * P.psi[i]


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_identities_on_corpus(name):
    P = corpus(name)
    F = build_lambda(P)
    assert column_contract(P, F) == []
    assert verify_dol(P, F)
    assert all(verify_mudet_all(P, F))
    assert verify_psi_power_grad(P, F).ok


@pytest.mark.parametrize("seed", range(25))
def test_identities_on_random_specs(seed):
    P = random_spec(seed)
    F = build_lambda(P)
    assert column_contract(P, F) == []
    assert verify_dol(P, F, method="certificate")
    assert all(verify_mudet_all(P, F))
    assert verify_psi_power_grad(P, F).ok


def test_mudet_rational_coefficients():
    P = make_spec("xyz", [X, Y + Fraction(1, 2) * X**2],
                  [[Fraction(1, 3) * ONE, Z], [Z, X - Fraction(2, 5)]])
    assert all(verify_mudet_all(P))
