"""Numerical Lojasiewicz exponents for ``|grad f|`` and ``D_f``.

Both estimators sample on geometrically spaced shells, measure the distance
to the relevant set through the chart kernels, and fit a lower envelope
``log g >= log C + alpha log r`` through per-decade minima. For the gradient,
the samples with the smallest ratio g / r on each shell are refined by a
pattern search on their sphere, which sharpens the envelope where random
directions are sparse. The results are numerical evidence only.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .hessian import ChartMap, ProblemSpec, det_H, gradient, hessian_f
from .polycore import Polynomial, stack_packed

GRID_POINT_CAP = 1 << 20
DESCENT_STEPS = 20
ZERO_VALUE = 1e-12
FAIL_MARGIN = 100.0
PROBES_PER_SHELL = 4
PROBE_ITERATIONS = 40
ENVELOPE_ITERATIONS = 20
ENVELOPE_STEP = 0.25  # initial step relative to the shell radius
ENVELOPE_SHRINK = 0.7
RATIONAL_DENOMINATOR = 10**6


class LojaError(ValueError):
    """Bad sampling plan or missing charts."""


@dataclass(frozen=True)
class SamplePlan:
    rmin: float = 1e-4
    rmax: float = 0.5
    shells: int = 12
    per_shell: int = 128
    seed: int = 42
    chart_grid: int = 512

    def __post_init__(self):
        if not (0 < self.rmin < self.rmax <= 1):
            raise LojaError(f"need 0 < rmin < rmax <= 1, got rmin={self.rmin}, rmax={self.rmax}")
        if self.shells < 4:
            raise LojaError(f"shells must be at least 4, got {self.shells}")
        if self.per_shell < 16:
            raise LojaError(f"per_shell must be at least 16, got {self.per_shell}")
        if self.chart_grid < 2:
            raise LojaError(f"chart_grid must be at least 2, got {self.chart_grid}")
        if not (0 <= self.seed < 2**64):
            raise LojaError("seed must be a 64-bit unsigned integer")

    def radii(self) -> np.ndarray:
        k = np.arange(self.shells)
        return self.rmin * (self.rmax / self.rmin) ** (k / (self.shells - 1))

    def shell_rngs(self) -> list[np.random.Generator]:
        return [np.random.default_rng(s) for s in np.random.SeedSequence(self.seed).spawn(self.shells)]


@dataclass(frozen=True)
class Witness:
    """A sample where the quantity vanishes away from the reference set.

    ``exact_point`` is a nearby rational point (chart parameters for ``D_f``)
    at which the quantity was re-evaluated exactly; ``exact_zero`` records the result.
    """

    point: tuple
    value: float
    distance: float
    exact_point: tuple | None = None
    exact_zero: bool = False


@dataclass(frozen=True)
class LojaEstimate:
    alpha_hat: float
    logC_hat: float
    support_points: int
    residual_floor: float
    verdict: str  # holds, fails, inconclusive
    grid_bound: float = 0.0
    samples_used: int = 0
    witness: Witness | None = None
    note: str = ""
    envelope: tuple = field(default=(), repr=False)  # (log r, log g) per decade

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


# distances

def _grid_per_dim(arity: int, grid: int) -> int:
    if grid ** arity <= GRID_POINT_CAP:
        return grid
    return max(2, int(math.floor(GRID_POINT_CAP ** (1.0 / arity))))


def chart_grid_bound(chart: ChartMap, grid: int) -> float:
    """Worst-case overestimate of the chart distance: ``L * h * sqrt(d) / 2``."""
    g = _grid_per_dim(chart.arity, grid)
    h = 2.0 / (g - 1)
    return chart.lipschitz_bound() * h * math.sqrt(chart.arity) / 2.0


def set_distances(points: np.ndarray, charts: Sequence[ChartMap] | None, grid: int,
                  workers: int | None = None) -> tuple[np.ndarray, float]:
    """Distances from each row of ``points`` to a set and the overestimate bound.

    ``charts=None`` is the origin (exact norms, bound 0).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if charts is None:
        return np.linalg.norm(points, axis=1), 0.0
    if not charts:
        raise LojaError("a chart-defined set needs at least one chart")
    best = np.full(points.shape[0], np.inf)
    bound = 0.0
    for chart in charts:
        exps, coeffs, owner, _ = stack_packed(chart.components, chart.arity)
        g = _grid_per_dim(chart.arity, grid)
        chunks = np.array_split(np.arange(points.shape[0]), max(1, min(8, points.shape[0] // 64)))

        def work(idx, exps=exps, coeffs=coeffs, owner=owner, g=g, arity=chart.arity):
            return kernels.chart_distance(points[idx], exps, coeffs, owner, arity, g, DESCENT_STEPS)[0]

        with ThreadPoolExecutor(max_workers=workers or min(4, os.cpu_count() or 1)) as pool:
            parts = list(pool.map(work, chunks))
        best = np.minimum(best, np.concatenate(parts))
        bound = max(bound, chart_grid_bound(chart, grid))
    return best, bound


def distance_to_set(x: Sequence[float], charts: Sequence[ChartMap] | None, grid: int = 512) -> float:
    """Distance from one point to the origin (``charts=None``) or to a union of chart images."""
    d, _ = set_distances(np.asarray([x], dtype=np.float64), charts, grid, workers=1)
    return float(d[0])


# sampling

def sphere_samples(n: int, plan: SamplePlan) -> tuple[np.ndarray, np.ndarray]:
    """Uniform directions on each shell sphere; returns ``(points, shell index)``."""
    pts, shell = [], []
    for k, (rho, rng) in enumerate(zip(plan.radii(), plan.shell_rngs())):
        u = rng.standard_normal((plan.per_shell, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        pts.append(rho * u)
        shell.append(np.full(plan.per_shell, k))
    return np.vstack(pts), np.concatenate(shell)


def _eval(polys: Sequence[Polynomial], nvars: int, pts: np.ndarray) -> np.ndarray:
    exps, coeffs, owner, count = stack_packed(polys, nvars)
    return kernels.eval_packed(exps, coeffs, owner, count, pts)


def _rationalize_point(x: np.ndarray) -> tuple:
    return tuple(Fraction(float(v)).limit_denominator(RATIONAL_DENOMINATOR) for v in x)


# envelope fit

def envelope_fit(r: np.ndarray, g: np.ndarray, bound: float) -> LojaEstimate:
    """Lower-envelope fit on samples with ``r > bound``.

    Minima of g per decade of r give the support points; alpha is the
    least-squares slope through them (clipped at 0) and log C is the largest
    constant keeping every included sample above the envelope.
    """
    keep = r > bound
    if not np.any(keep):
        return LojaEstimate(math.nan, math.nan, 0, math.nan, "inconclusive", bound, 0,
                            note="all samples lie within the grid bound of the reference set")
    r, g = r[keep], g[keep]
    floor = float(g.min())
    if floor <= 0.0:
        return LojaEstimate(math.nan, math.nan, 0, floor, "inconclusive", bound, int(r.size),
                            note="exact zero near the reference set; no finite envelope")
    decade = np.floor(np.log10(r)).astype(np.int64)
    env = []
    for d in np.unique(decade):
        idx = np.flatnonzero(decade == d)
        i = idx[np.argmin(g[idx])]
        env.append((math.log(r[i]), math.log(g[i])))
    if len(env) < 2:
        return LojaEstimate(math.nan, math.nan, len(env), floor, "inconclusive", bound, int(r.size),
                            note="fewer than two decades of distance sampled", envelope=tuple(env))
    lr = np.array([e[0] for e in env])
    lg = np.array([e[1] for e in env])
    slope = float(np.polyfit(lr, lg, 1)[0])
    alpha = max(0.0, slope)
    logc = float(np.min(np.log(g) - alpha * np.log(r)))
    return LojaEstimate(alpha, logc, len(env), floor, "holds", bound, int(r.size), envelope=tuple(env))


def _failed(fit: LojaEstimate, witness: Witness, note: str) -> LojaEstimate:
    return LojaEstimate(fit.alpha_hat, fit.logC_hat, fit.support_points, min(fit.residual_floor, witness.value)
                        if not math.isnan(fit.residual_floor) else witness.value,
                        "fails", fit.grid_bound, fit.samples_used, witness, note, fit.envelope)


def fail_distance(bound: float, plan: SamplePlan) -> float:
    """Distance beyond which a vanishing value counts as a witness.

    The grid margin alone degenerates to 0 for exact distances, so the
    smallest sampled radius is used as a floor.
    """
    return max(FAIL_MARGIN * bound, plan.rmin)


def _pick_witness(points, values, dists, threshold, exact=None):
    bad = np.flatnonzero((values < ZERO_VALUE) & (dists > threshold))
    if bad.size == 0:
        return None
    i = bad[np.argmax(dists[bad])]
    ep, ez = exact(i) if exact else (None, False)
    return Witness(tuple(float(v) for v in points[i]), float(values[i]), float(dists[i]), ep, ez)


# gradient exponent

def _lowest_per_shell(values: np.ndarray, shell: np.ndarray, count: int) -> np.ndarray:
    picks = []
    for k in np.unique(shell):
        idx = np.flatnonzero(shell == k)
        picks.extend(idx[np.argsort(values[idx], kind="stable")[:count]])
    return np.array(picks, dtype=np.int64)


def gradient_probes(P: ProblemSpec, starts: np.ndarray) -> np.ndarray:
    """Gauss-Newton search for zeros of ``grad f`` on the sphere through each start."""
    grad = gradient(P)
    hess = [e for row in hessian_f(P).to_rows() for e in row]
    x = starts.copy()
    rho = np.linalg.norm(x, axis=1)
    for _ in range(PROBE_ITERATIONS):
        G = _eval(grad, P.n, x)
        Hm = _eval(hess, P.n, x).reshape(-1, P.n, P.n)
        for i in range(x.shape[0]):
            A = np.vstack([Hm[i], x[i][None, :]])
            b = np.concatenate([-G[i], [0.0]])
            step = np.linalg.lstsq(A, b, rcond=None)[0]
            y = x[i] + step
            norm = np.linalg.norm(y)
            if np.all(np.isfinite(y)) and norm > 0:
                x[i] = rho[i] * y / norm
    return x


def _distance_to_union(P: ProblemSpec, pts: np.ndarray, grid: int) -> tuple[np.ndarray, float]:
    dx, bx = set_distances(pts, P.xcharts, grid)
    dy, by = set_distances(pts, P.ycharts, grid)
    return np.minimum(dx, dy), max(bx, by)


def envelope_probes(P: ProblemSpec, starts: np.ndarray, plan: SamplePlan,
                    bound: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coordinate pattern search on each start's sphere minimising ``log g - log r``.

    Only points with ``r > bound`` count; the step shrinks by a fixed factor
    every round, so the search is deterministic. Returns ``(points, g, r)``.
    """
    grad = gradient(P)
    x = starts.copy()
    rho = np.linalg.norm(x, axis=1)

    def ratio(y):
        g = np.linalg.norm(_eval(grad, P.n, y), axis=1)
        r, _ = _distance_to_union(P, y, plan.chart_grid)
        with np.errstate(divide="ignore"):
            v = np.log(g) - np.log(r)
        v[~(r > bound)] = np.inf
        return v, g, r

    cur, g, r = ratio(x)
    step = ENVELOPE_STEP
    m = x.shape[0]
    for _ in range(ENVELOPE_ITERATIONS):
        cands = np.empty((2 * P.n, m, P.n))
        for k in range(P.n):
            for s, sign in enumerate((1.0, -1.0)):
                y = x.copy()
                y[:, k] += sign * step * rho
                cands[2 * k + s] = y * (rho / np.linalg.norm(y, axis=1))[:, None]
        v, _, _ = ratio(cands.reshape(-1, P.n))
        v = v.reshape(2 * P.n, m)
        best = np.argmin(v, axis=0)
        bv = v[best, np.arange(m)]
        better = bv < cur
        x[better] = cands[best[better], np.flatnonzero(better)]
        cur = np.where(better, bv, cur)
        step *= ENVELOPE_SHRINK
    _, g, r = ratio(x)
    return x, g, r


def estimate_gradient_exponent(P: ProblemSpec, plan: SamplePlan = SamplePlan()) -> LojaEstimate:
    """Exponent in ``|grad f(x)| >= C dist(x, X u Y)^alpha`` near the origin."""
    if not P.xcharts:
        raise LojaError("estimating the gradient exponent needs charts of X")
    pts, shell = sphere_samples(P.n, plan)
    grad = gradient(P)
    g = np.linalg.norm(_eval(grad, P.n, pts), axis=1)
    r, bound = _distance_to_union(P, pts, plan.chart_grid)
    threshold = fail_distance(bound, plan)

    def exact(points):
        def check(i):
            q = _rationalize_point(points[i])
            return q, all(d.eval(q) == 0 for d in grad)
        return check

    w = _pick_witness(pts, g, r, threshold, exact(pts))
    if w is None:
        starts = pts[_lowest_per_shell(g, shell, PROBES_PER_SHELL)]
        probes = gradient_probes(P, starts)
        pg = np.linalg.norm(_eval(grad, P.n, probes), axis=1)
        pr, _ = _distance_to_union(P, probes, plan.chart_grid)
        w = _pick_witness(probes, pg, pr, threshold, exact(probes))
        note = "critical point of f found away from X u Y"
    else:
        note = "gradient vanishes at a sample away from X u Y"
    with np.errstate(divide="ignore"):
        ratio = np.where(r > bound, np.log(g) - np.log(r), np.inf)
    starts = pts[_lowest_per_shell(ratio, shell, PROBES_PER_SHELL)]
    ex, eg, er = envelope_probes(P, starts, plan, bound)
    if w is None:
        w = _pick_witness(ex, eg, er, threshold, exact(ex))
        note = "gradient vanishes at a refined sample away from X u Y"
    fit = envelope_fit(np.concatenate([r, er]), np.concatenate([g, eg]), bound)
    if w is not None:
        return _failed(fit, w, note)
    return fit


# D_f exponent

def chart_samples(arity: int, plan: SamplePlan) -> np.ndarray:
    """Chart parameters on the shells ``|t| = rho``; directions uniform on the sphere."""
    out = []
    for rho, rng in zip(plan.radii(), plan.shell_rngs()):
        u = rng.standard_normal((plan.per_shell, arity))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        out.append(rho * u)
    return np.vstack(out)


def _df_probes(q: Polynomial, dq: list[Polynomial], starts: np.ndarray, limit: float) -> np.ndarray:
    t = starts.copy()
    for _ in range(PROBE_ITERATIONS):
        val = _eval([q], q.nvars, t)[:, 0]
        grad = _eval(dq, q.nvars, t)
        nrm = np.einsum("ij,ij->i", grad, grad)
        ok = nrm > 0
        t[ok] -= (val[ok] / nrm[ok])[:, None] * grad[ok]
    inside = np.linalg.norm(t, axis=1) <= limit
    return t[inside]


def estimate_Df_exponent(P: ProblemSpec, plan: SamplePlan = SamplePlan()) -> LojaEstimate:
    """Exponent in ``|D_f(x)| >= C dist(x, Y)^alpha`` for x on X near the origin."""
    if not P.xcharts:
        raise LojaError("estimating the D_f exponent needs charts of X")
    if all(c.is_constant() for c in P.xcharts):
        return LojaEstimate(0.0, 0.0, 0, math.nan, "holds", 0.0, 0,
                            note="X is the origin, which lies in Y; the inequality is vacuous")
    D = det_H(P)
    rs, gs, images, params = [], [], [], []
    bound = 0.0
    polys = []
    for chart in P.xcharts:
        q = chart.pullback(D)
        polys.append(q)
        t = chart_samples(chart.arity, plan)
        x = _eval(chart.components, chart.arity, t)
        d, b = set_distances(x, P.ycharts, plan.chart_grid)
        bound = max(bound, b)
        rs.append(d)
        gs.append(np.abs(_eval([q], chart.arity, t)[:, 0]))
        images.append(x)
        params.append(t)
    r, g = np.concatenate(rs), np.concatenate(gs)
    fit = envelope_fit(r, g, bound)
    for chart, q, t, x, d, v in zip(P.xcharts, polys, params, images, rs, gs):
        def exact(i, t=t, q=q):
            tq = _rationalize_point(t[i])
            return tq, q.eval(tq) == 0

        w = _pick_witness(x, v, d, fail_distance(bound, plan), exact)
        if w is None:
            shell = np.repeat(np.arange(plan.shells), plan.per_shell)
            starts = t[_lowest_per_shell(v, shell, PROBES_PER_SHELL)]
            pt = _df_probes(q, [q.diff(k) for k in range(chart.arity)], starts, plan.rmax)
            if pt.size:
                px = _eval(chart.components, chart.arity, pt)
                pv = np.abs(_eval([q], chart.arity, pt)[:, 0])
                pd, _ = set_distances(px, P.ycharts, plan.chart_grid)

                def exact(i, t=pt, q=q):
                    tq = _rationalize_point(t[i])
                    return tq, q.eval(tq) == 0

                w = _pick_witness(px, pv, pd, fail_distance(bound, plan), exact)
        if w is not None:
            return _failed(fit, w, f"D_f vanishes on X away from Y (chart {chart.label or '?'})")
    return fit
