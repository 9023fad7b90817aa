import os
import subprocess
import sys

import numpy as np
import pytest

from infdet import kernels
from infdet.kernels import backend_module
from infdet.polycore import Polynomial, stack_packed

PY = backend_module("python")
try:
    CC = backend_module("compiled")
except ImportError:  # extension not built in this environment
    CC = None

needs_compiled = pytest.mark.skipif(CC is None, reason="compiled kernels are not built")


def packed(polys, n):
    return stack_packed(polys, n)


def test_eval_packed_matches_exact():
    x, y, z = Polynomial.variables(3)
    polys = [x**2 + z * y**2, 3 * x * y * z - 1, Polynomial.zero(3), y**5]
    pts = np.random.default_rng(0).uniform(-1, 1, (40, 3))
    out = PY.eval_packed(*packed(polys, 3), pts)
    ref = np.array([[p.eval_float(list(pt)) for p in polys] for pt in pts])
    assert out.shape == (40, 4)
    assert np.allclose(out, ref, rtol=1e-13, atol=1e-15)


def test_chart_distance_to_line():
    (t,) = Polynomial.variables(1)
    exps, coeffs, owner, _ = packed([Polynomial.zero(1), Polynomial.zero(1), t], 1)
    pts = np.array([[0.3, 0.0, 0.5], [0.0, 0.4, -0.2]])
    d, params = PY.chart_distance(pts, exps, coeffs, owner, 1, 64, 20)
    assert d == pytest.approx([0.3, 0.4], abs=1e-9)
    assert params[:, 0] == pytest.approx([0.5, -0.2], abs=1e-5)


def test_chart_distance_stays_in_parameter_box():
    (t,) = Polynomial.variables(1)
    exps, coeffs, owner, _ = packed([t, Polynomial.zero(1)], 1)
    d, params = PY.chart_distance(np.array([[3.0, 0.0]]), exps, coeffs, owner, 1, 33, 20)
    assert params[0, 0] == 1.0
    assert d[0] == pytest.approx(2.0)


@needs_compiled
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_eval(seed):
    rng = np.random.default_rng(seed)
    v = Polynomial.variables(4)
    polys = []
    for _ in range(6):
        p = Polynomial.zero(4)
        for _ in range(4):
            m = Polynomial.constant(int(rng.integers(-3, 4)), 4)
            for _ in range(int(rng.integers(0, 5))):
                m = m * v[int(rng.integers(0, 4))]
            p = p + m
        polys.append(p)
    pts = rng.uniform(-1, 1, (200, 4))
    a = PY.eval_packed(*packed(polys, 4), pts)
    b = CC.eval_packed(*packed(polys, 4), pts)
    assert np.max(np.abs(a - b)) < 1e-12


@needs_compiled
@pytest.mark.parametrize("arity, grid", [(1, 512), (2, 64)])
def test_backends_agree_on_chart_distance(arity, grid):
    rng = np.random.default_rng(arity)
    if arity == 1:
        (t,) = Polynomial.variables(1)
        comps = [t**2, t, t**3 - t]
    else:
        s, t = Polynomial.variables(2)
        comps = [s, t**2, s * t]
    exps, coeffs, owner, _ = packed(comps, arity)
    pts = rng.uniform(-0.5, 0.5, (300, 3))
    da, pa = PY.chart_distance(pts, exps, coeffs, owner, arity, grid, 20)
    db, pb = CC.chart_distance(pts, exps, coeffs, owner, arity, grid, 20)
    assert np.max(np.abs(da - db)) < 1e-12
    # minimisers are only determined to about the square root of the distance tolerance
    assert np.max(np.abs(pa - pb)) < 1e-6


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        backend_module("fortran")


def test_environment_forces_fallback():
    env = dict(os.environ, INFDET_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from infdet import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
def test_default_prefers_compiled():
    env = {k: v for k, v in os.environ.items() if k != "INFDET_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "from infdet import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "compiled"
