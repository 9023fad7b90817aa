"""Compare the compiled and numpy float kernels on default-plan workloads.

Run with ``python benchmarks/bench_kernels.py``. Each case is timed as the best
of several repeats; the maximum absolute difference between backends is shown.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from infdet.kernels import backend_module
from infdet.loja import SamplePlan, sphere_samples
from infdet.parser import parse_problem
from infdet.hessian import gradient, hessian_f
from infdet.polycore import stack_packed

CURVE = """
vars = x y z w
psi = [x, y, z - w^2]
H = [[1, 0, 0], [0, 1, 0], [0, 0, w]]
xcharts = [(t) -> (0, 0, t^2, t)]
"""


def best_of(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(plan: SamplePlan):
    P = parse_problem(CURVE, "curve")
    pts, _ = sphere_samples(P.n, plan)
    grad = stack_packed(gradient(P), P.n)
    hess = stack_packed([e for row in hessian_f(P).to_rows() for e in row], P.n)
    chart = P.xcharts[0]
    cexps, ccoeffs, cowner, _ = stack_packed(chart.components, chart.arity)
    yield "eval gradient", lambda k: k.eval_packed(*grad, pts)
    yield "eval hessian", lambda k: k.eval_packed(*hess, pts)
    yield "chart distance (curve)", lambda k: k.chart_distance(pts, cexps, ccoeffs, cowner, 1,
                                                               plan.chart_grid, 20)[0]
    # a 2-parameter chart into R^4; grid 128 per parameter
    sexps = np.array([[2, 0], [1, 1], [0, 2], [1, 0]], dtype=np.int64)
    scoeffs = np.ones(4)
    sowner = np.arange(4, dtype=np.int64)
    sub = pts[:256]
    yield "chart distance (surface)", lambda k: k.chart_distance(sub, sexps, scoeffs, sowner, 2, 128, 20)[0]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    py = backend_module("python")
    try:
        cc = backend_module("compiled")
    except ImportError:
        print("compiled kernels are not built; only the numpy backend is available")
        cc = None
    print(f"{'case':<26} {'numpy s':>10} {'compiled s':>11} {'speedup':>8} {'max diff':>10}")
    for name, fn in cases(SamplePlan()):
        tp, out_p = best_of(lambda: fn(py), args.repeats)
        if cc is None:
            print(f"{name:<26} {tp:>10.4f} {'-':>11} {'-':>8} {'-':>10}")
            continue
        tc, out_c = best_of(lambda: fn(cc), args.repeats)
        diff = float(np.max(np.abs(out_p - out_c)))
        print(f"{name:<26} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x {diff:>10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
