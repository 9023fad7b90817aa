"""Numpy implementations of the float kernels.

These define the reference semantics; the compiled module in ``_ckernels``
must agree with them to rounding.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 22  # grid-distance work per block, in float64 elements


def _ipow(base: np.ndarray, e: int) -> np.ndarray:
    out = np.ones_like(base)
    for _ in range(e):
        out = out * base
    return out


def eval_packed(exps, coeffs, owner, count, pts):
    """Evaluate ``count`` packed polynomials at every row of ``pts``; returns ``(N, count)``."""
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n_pts = pts.shape[0]
    out = np.zeros((n_pts, count), dtype=np.float64)
    for k in range(exps.shape[0]):
        term = np.full(n_pts, coeffs[k])
        for j in range(exps.shape[1]):
            e = int(exps[k, j])
            if e:
                term = term * _ipow(pts[:, j], e)
        out[:, owner[k]] += term
    return out


def param_grid(arity: int, grid: int) -> np.ndarray:
    """All points of the ``grid^arity`` lattice on ``[-1, 1]^arity``, first parameter slowest."""
    axis = np.linspace(-1.0, 1.0, grid)
    mesh = np.meshgrid(*([axis] * arity), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def chart_distance(pts, exps, coeffs, owner, arity, grid, steps):
    """Distance from each point to one chart image over ``[-1, 1]^arity``.

    Grid argmin, then ``steps`` rounds of coordinate pattern search starting at
    the grid spacing and halving every round. Returns ``(dist, params)``.
    """
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n_pts, n = pts.shape
    tgrid = param_grid(arity, grid)
    images = eval_packed(exps, coeffs, owner, n, tgrid)
    best = np.empty(n_pts)
    arg = np.empty(n_pts, dtype=np.int64)
    block = max(1, CHUNK // max(1, images.shape[0] * n))
    for s in range(0, n_pts, block):
        diff = pts[s:s + block, None, :] - images[None, :, :]
        d2 = np.einsum("abk,abk->ab", diff, diff)
        arg[s:s + block] = np.argmin(d2, axis=1)
        best[s:s + block] = d2[np.arange(d2.shape[0]), arg[s:s + block]]
    t = tgrid[arg].copy()
    step = 2.0 / (grid - 1)
    for _ in range(steps):
        for k in range(arity):
            for sign in (1.0, -1.0):
                cand = t.copy()
                cand[:, k] = np.clip(cand[:, k] + sign * step, -1.0, 1.0)
                diff = pts - eval_packed(exps, coeffs, owner, n, cand)
                d2 = np.einsum("ak,ak->a", diff, diff)
                better = d2 < best
                best = np.where(better, d2, best)
                t[better] = cand[better]
        step *= 0.5
    return np.sqrt(best), t
