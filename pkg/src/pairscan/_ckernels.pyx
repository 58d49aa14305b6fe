# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def interval_accumulate(lo, hi, weights, Py_ssize_t size):
    cdef const long long[:] lo_v = np.ascontiguousarray(lo, dtype=np.int64)
    cdef const long long[:] hi_v = np.ascontiguousarray(hi, dtype=np.int64)
    cdef const double[:] w_v = np.ascontiguousarray(weights, dtype=np.float64)
    diff_arr = np.zeros(size + 1, dtype=np.float64)
    cdef double[:] diff = diff_arr
    cdef Py_ssize_t j, n = lo_v.shape[0]
    cdef long long a, b
    for j in range(n):
        a = lo_v[j]
        b = hi_v[j]
        if a < 0:
            a = 0
        if b > size:
            b = size
        if b <= a:
            continue
        diff[a] += w_v[j]
        diff[b] -= w_v[j]
    return np.cumsum(diff_arr[:size])


def profile_accumulate(pos, weights, table, long long offset, long long start,
                       long long step, Py_ssize_t size):
    cdef const long long[:] p_v = np.ascontiguousarray(pos, dtype=np.int64)
    cdef const double[:] w_v = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:] tab = np.ascontiguousarray(table, dtype=np.float64)
    out_arr = np.zeros(size, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t j, n = p_v.shape[0]
    cdef long long L = tab.shape[0]
    cdef long long base, i, d
    for j in range(n):
        base = p_v[j] + offset - start
        # ceil division that is correct for negative numerators
        if base >= 0:
            i = (base + step - 1) // step
        else:
            i = -((-base) // step)
        if i < 0:
            i = 0
        while i < size:
            d = start + i * step - p_v[j] - offset
            if d >= L:
                break
            if d >= 0:
                out[i] += w_v[j] * tab[d]
            i += 1
    return out_arr


def sliding_window_max(t, vals, grid, double delta):
    cdef const double[:] t_v = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[:] g_v = np.ascontiguousarray(grid, dtype=np.float64)
    vals2 = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t n = t_v.shape[0], m = g_v.shape[0], k = vals2.shape[1]
    csum_arr = np.zeros((n + 1, k), dtype=np.float64)
    csum_arr[1:] = np.cumsum(vals2, axis=0)
    cdef const double[:, :] cs = csum_arr
    best_arr = np.full(k, -np.inf)
    arg_arr = np.zeros(k, dtype=np.int64)
    cdef double[:] best = best_arr
    cdef long long[:] arg = arg_arr
    cdef Py_ssize_t i, c, lo = 0, hi = 0
    cdef double z
    for i in range(m):
        while hi < n and t_v[hi] <= g_v[i]:
            hi += 1
        while lo < n and t_v[lo] < g_v[i] - delta:
            lo += 1
        for c in range(k):
            z = cs[hi, c] - cs[lo, c]
            if z > best[c]:
                best[c] = z
                arg[c] = i
    return best_arr, arg_arr
