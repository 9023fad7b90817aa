# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels; same semantics as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline double _ipow(double base, long e) noexcept nogil:
    cdef double out = 1.0
    cdef long i
    for i in range(e):
        out = out * base
    return out


cdef void _eval_one(const double* x, const long long[:, ::1] exps, const double[::1] coeffs,
                    const long long[::1] owner, double* out, Py_ssize_t count) noexcept nogil:
    cdef Py_ssize_t k, j
    cdef double term
    for j in range(count):
        out[j] = 0.0
    for k in range(exps.shape[0]):
        term = coeffs[k]
        for j in range(exps.shape[1]):
            if exps[k, j]:
                term = term * _ipow(x[j], exps[k, j])
        out[owner[k]] += term


def eval_packed(exps, coeffs, owner, Py_ssize_t count, pts):
    cdef const long long[:, ::1] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const long long[::1] o = np.ascontiguousarray(owner, dtype=np.int64)
    cdef double[:, ::1] x = np.array(pts, dtype=np.float64, order="C", copy=True)
    result = np.zeros((x.shape[0], count), dtype=np.float64)
    cdef double[:, ::1] out = result
    cdef Py_ssize_t i
    if count == 0:
        return result
    with nogil:
        for i in range(x.shape[0]):
            _eval_one(&x[i, 0], e, c, o, &out[i, 0], count)
    return result


def chart_distance(pts, exps, coeffs, owner, Py_ssize_t arity, Py_ssize_t grid, int steps):
    from ._pykernels import param_grid

    cdef double[:, ::1] x = np.array(pts, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n_pts = x.shape[0], n = x.shape[1]
    cdef const long long[:, ::1] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const long long[::1] o = np.ascontiguousarray(owner, dtype=np.int64)
    tgrid_arr = param_grid(arity, grid)
    cdef double[:, ::1] tgrid = tgrid_arr
    cdef double[:, ::1] images = eval_packed(exps, coeffs, owner, n, tgrid_arr)
    cdef Py_ssize_t n_grid = images.shape[0]
    dist_arr = np.empty(n_pts, dtype=np.float64)
    params_arr = np.empty((n_pts, arity), dtype=np.float64)
    cdef double[::1] dist = dist_arr
    cdef double[:, ::1] params = params_arr
    work_arr = np.empty(n, dtype=np.float64)
    cand_arr = np.empty(arity, dtype=np.float64)
    cdef double[::1] work = work_arr
    cdef double[::1] cand = cand_arr
    cdef Py_ssize_t i, g, j, k, s, ss, best_g
    cdef double d2, diff, best, step, sign, saved
    with nogil:
        for i in range(n_pts):
            best = -1.0
            best_g = 0
            for g in range(n_grid):
                d2 = 0.0
                for j in range(n):
                    diff = x[i, j] - images[g, j]
                    d2 = d2 + diff * diff
                if best < 0.0 or d2 < best:
                    best = d2
                    best_g = g
            for k in range(arity):
                params[i, k] = tgrid[best_g, k]
            step = 2.0 / (grid - 1)
            for s in range(steps):
                for k in range(arity):
                    for ss in range(2):
                        sign = 1.0 - 2.0 * ss
                        for j in range(arity):
                            cand[j] = params[i, j]
                        saved = cand[k] + sign * step
                        if saved > 1.0:
                            saved = 1.0
                        elif saved < -1.0:
                            saved = -1.0
                        cand[k] = saved
                        _eval_one(&cand[0], e, c, o, &work[0], n)
                        d2 = 0.0
                        for j in range(n):
                            diff = x[i, j] - work[j]
                            d2 = d2 + diff * diff
                        if d2 < best:
                            best = d2
                            params[i, k] = saved
                step = step * 0.5
            dist[i] = sqrt(best)
    return dist_arr, params_arr
