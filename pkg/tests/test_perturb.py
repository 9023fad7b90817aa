from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CORPUS_NAMES, corpus
from infdet.hessian import DomainError, check_hess_identity, with_hessian
from infdet.polycore import PolyMatrix, Polynomial
from infdet.perturb import (
    build_pair,
    jacobi_eigen,
    rationalize,
    rationalize_matrix,
    spectral_at,
    verify_pair,
)


def test_diagonal_matrix():
    S = jacobi_eigen([[3.0, 0.0], [0.0, -1.0]])
    assert list(S.eigenvalues) == [-1.0, 3.0]
    assert S.orthogonality_error() == 0.0


def test_two_by_two_rotation():
    S = jacobi_eigen([[2.0, 1.0], [1.0, 2.0]])
    assert S.eigenvalues == pytest.approx([1.0, 3.0], abs=1e-14)
    v = S.P[:, 0]
    assert abs(v[0] + v[1]) < 1e-14  # eigenvector (1, -1)/sqrt 2


def test_swap_matrix():
    S = jacobi_eigen([[0.0, 1.0], [1.0, 0.0]])
    assert S.eigenvalues == pytest.approx([-1.0, 1.0], abs=1e-15)
    r = 2 ** -0.5
    assert np.abs(S.P) == pytest.approx(np.full((2, 2), r), abs=1e-15)
    assert S.P[0, 0] * S.P[1, 0] < 0  # (1, -1) for eigenvalue -1


def test_one_by_one():
    S = jacobi_eigen([[-2.5]])
    assert list(S.eigenvalues) == [-2.5] and S.P.tolist() == [[1.0]]


def test_eigenvalue_order_by_modulus_then_value():
    S = jacobi_eigen(np.diag([2.0, -2.0, 0.5]))
    assert list(S.eigenvalues) == [0.5, -2.0, 2.0]


def test_rejects_non_symmetric():
    with pytest.raises(ValueError):
        jacobi_eigen([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        jacobi_eigen([[1.0, 2.0]])


def test_d_infinity_pair_at_z():
    P = corpus("d-infinity")
    y = [0.0, 0.0, 0.25]
    S = spectral_at(P, y)
    pair = build_pair(S)
    assert S.eigenvalues == pytest.approx([0.25, 1.0])
    assert pair.V == pytest.approx(np.diag([0.0, 0.25]), abs=1e-15)
    chk = verify_pair(P, y, pair, S)
    assert chk.ok
    assert chk.det_W_expected == pytest.approx((0.25 - 2e-3) * (1 - 2e-3))


def test_double_eigenvalue_keeps_rank_one():
    P = corpus("d-infinity")
    S = spectral_at(P, [0.0, 0.0, 1.0])
    pair = build_pair(S)
    assert np.linalg.matrix_rank(pair.V) == 1
    assert np.trace(pair.V) == pytest.approx(1.0)
    chk = verify_pair(P, [0.0, 0.0, 1.0], pair, S)
    assert chk.ok
    eps = pair.epsilons[0]
    assert chk.det_W == pytest.approx((1 - eps) ** 2, rel=1e-12)


def test_single_psi_pair():
    # f = x^2 y at (0, 1): H = [1], V = [1], det(H - W) = 1 - eps
    P = corpus("x2y2-fail")
    y = Polynomial.variable(1, 2)
    Q = with_hessian(P, PolyMatrix.from_rows([[y]], 2))
    S = spectral_at(Q, [0.0, 1.0])
    pair = build_pair(S)
    assert pair.V.tolist() == [[1.0]]
    chk = verify_pair(Q, [0.0, 1.0], pair, S)
    assert chk.det_V == 0.0
    assert chk.det_W == pytest.approx(1 - pair.epsilons[0])


def test_already_singular_point():
    P = corpus("d-infinity")
    pair = build_pair(spectral_at(P, [0.0, 0.0, 0.0]))
    assert np.abs(pair.V).max() == 0.0
    assert verify_pair(P, [0.0, 0.0, 0.0], pair).V_ok


def test_eps_sign_flip_on_tie():
    S = jacobi_eigen(np.diag([1e-3 * (1 + 1.0), 1.0]))
    pair = build_pair(S)
    assert pair.epsilons[0] < 0 < pair.epsilons[1]
    assert np.all(S.eigenvalues - pair.epsilons != 0)


def test_bad_eps_scale():
    with pytest.raises(ValueError):
        build_pair(jacobi_eigen(np.eye(2)), eps_scale=0.0)


def test_spectral_at_refuses_points_off_X():
    with pytest.raises(DomainError):
        spectral_at(corpus("d-infinity"), [0.5, 0.0, 0.0])
    with pytest.raises(ValueError):
        spectral_at(corpus("d-infinity"), [0.0, 0.0])


def test_perturbed_spec_keeps_hess_identity():
    P = corpus("p3-complete-intersection")
    y = [0.0, 0.0, 0.09, 0.3]
    chk = verify_pair(P, y, build_pair(spectral_at(P, y)))
    assert chk.ok
    Q = chk.perturbed
    assert check_hess_identity(Q).holds
    # the perturbed representation is singular at y up to rationalization
    assert abs(np.linalg.det(Q.H.eval_float(y))) < 1e-10


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_pairs_along_charts(name):
    P = corpus(name)
    chart = P.xcharts[0]
    for t in np.linspace(-0.4, 0.4, 9):
        tt = [float(t)] * chart.arity
        y = [c.eval_float(tt) for c in chart.components]
        assert verify_pair(P, y, build_pair(spectral_at(P, y))).ok


# rationalization

def test_rationalize_examples():
    assert rationalize(0.5) == Fraction(1, 2)
    assert rationalize(1 / 3) == Fraction(1, 3)
    assert rationalize(-2.75) == Fraction(-11, 4)
    assert rationalize(0.0) == 0
    with pytest.raises(ValueError):
        rationalize(float("nan"))


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_rationalize_within_tolerance(v):
    assert abs(float(rationalize(v)) - v) <= 1e-12 + 1e-15 * abs(v)


def test_rationalize_matrix_symmetric():
    M = rationalize_matrix(np.array([[0.5, 0.25], [0.25, 1 / 3]]), 2)
    rows = M.to_rows()
    assert rows[0][1] == rows[1][0] == Fraction(1, 4)
    assert rows[1][1] == Fraction(1, 3)


# properties against the numpy oracle

sym = st.integers(1, 5).flatmap(
    lambda p: st.lists(st.floats(-10, 10, allow_nan=False), min_size=p * p, max_size=p * p).map(
        lambda xs: (lambda A: (A + A.T) / 2)(np.array(xs).reshape(p, p))))


@settings(max_examples=150, deadline=None)
@given(sym)
def test_jacobi_matches_eigvalsh(A):
    S = jacobi_eigen(A)
    scale = 1.0 + np.abs(A).max()
    assert np.sort(S.eigenvalues) == pytest.approx(np.linalg.eigvalsh(A), abs=1e-12 * scale)
    assert S.orthogonality_error() < 1e-12
    assert S.reconstruction_error() < 1e-12 * scale
    assert np.all(np.diff(np.abs(S.eigenvalues)) >= 0)


@settings(max_examples=150, deadline=None)
@given(sym)
def test_pair_determinants(A):
    S = jacobi_eigen(A)
    pair = build_pair(S)
    p = A.shape[0]
    norm = np.abs(A).sum(axis=1).max()
    assert abs(np.linalg.det(A - pair.V)) <= 1e-8 * (1 + norm) ** p
    expected = np.prod(S.eigenvalues - pair.epsilons)
    assert np.linalg.det(A - pair.W) == pytest.approx(expected, rel=1e-6)
    assert np.abs(pair.V).max() <= abs(S.eigenvalues[0]) + 1e-12
