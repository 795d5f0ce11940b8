# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the per-trial kernels in ``_pykernels``."""

import numpy as np

from libc.math cimport INFINITY, sqrt
from libc.stdlib cimport free, malloc


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


def ml_search(y, x, candidates):
    cdef double complex[:, :, ::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef double complex[:, :, ::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef double complex[:, :, ::1] cv = np.ascontiguousarray(candidates, dtype=np.complex128)
    cdef Py_ssize_t n_trials = yv.shape[0], n = yv.shape[1], t = yv.shape[2]
    cdef Py_ssize_t nj = xv.shape[2], k_total = cv.shape[0]
    if xv.shape[0] != n_trials or xv.shape[1] != n or cv.shape[1] != nj or cv.shape[2] != t:
        raise ValueError("ml_search: inconsistent shapes")
    index = np.zeros(n_trials, dtype=np.int64)
    metric = np.empty(n_trials, dtype=np.float64)
    cdef long long[::1] iv = index
    cdef double[::1] mv = metric
    cdef Py_ssize_t b, k, r, s, j, arg
    cdef double best, acc
    cdef double complex e
    with nogil:
        for b in range(n_trials):
            best = INFINITY
            arg = 0
            for k in range(k_total):
                acc = 0.0
                for r in range(n):
                    for s in range(t):
                        e = yv[b, r, s]
                        for j in range(nj):
                            e = e - xv[b, r, j] * cv[k, j, s]
                        acc = acc + _abs2(e)
                    if acc >= best:
                        break
                if acc < best:
                    best = acc
                    arg = k
            iv[b] = arg
            mv[b] = best
    return index, metric


def symbol_stats(y, x, disp_a, disp_b):
    cdef double complex[:, :, ::1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef double complex[:, :, ::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef double[:, :, ::1] av = np.ascontiguousarray(disp_a, dtype=np.float64)
    cdef double[:, :, ::1] bv = np.ascontiguousarray(disp_b, dtype=np.float64)
    cdef Py_ssize_t n_trials = yv.shape[0], n = yv.shape[1], t = yv.shape[2]
    cdef Py_ssize_t nj = xv.shape[2], m = av.shape[0]
    stats = np.empty((n_trials, m), dtype=np.complex128)
    norm2 = np.empty(n_trials, dtype=np.float64)
    cdef double complex[:, ::1] sv = stats
    cdef double[::1] nv = norm2
    cdef Py_ssize_t b, r, s, j, q
    cdef double complex p, ta, tb
    cdef double acc
    cdef double complex *prod = <double complex *> malloc(t * nj * sizeof(double complex))
    if prod == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(n_trials):
                # prod = Y^H X  (t x nj)
                for s in range(t):
                    for j in range(nj):
                        p = 0
                        for r in range(n):
                            p = p + yv[b, r, s].conjugate() * xv[b, r, j]
                        prod[s * nj + j] = p
                for q in range(m):
                    ta = 0
                    tb = 0
                    for s in range(t):
                        for j in range(nj):
                            ta = ta + prod[s * nj + j] * av[q, j, s]
                            tb = tb + prod[s * nj + j] * bv[q, j, s]
                    sv[b, q] = ta.real - 1j * tb.imag
                acc = 0.0
                for r in range(n):
                    for j in range(nj):
                        acc = acc + _abs2(xv[b, r, j])
                nv[b] = acc
    finally:
        free(prod)
    return stats, norm2


def snr_trace(h_i, h_j, double z1, double z2):
    cdef double complex[:, :, ::1] hi = np.ascontiguousarray(h_i, dtype=np.complex128)
    cdef double complex[:, :, ::1] hj = np.ascontiguousarray(h_j, dtype=np.complex128)
    cdef Py_ssize_t n_trials = hi.shape[0], n = hi.shape[1], nr = hi.shape[2], nj = hj.shape[1]
    if hj.shape[0] != n_trials or hj.shape[2] != nr:
        raise ValueError("snr_trace: inconsistent shapes")
    out = np.empty(n_trials, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double complex *q = <double complex *> malloc(n * n * sizeof(double complex))
    cdef double complex *g = <double complex *> malloc(n * nj * sizeof(double complex))
    cdef Py_ssize_t b, r, c, k, j
    cdef double complex acc
    cdef double d, total
    if q == NULL or g == NULL:
        free(q)
        free(g)
        raise MemoryError()
    try:
        with nogil:
            for b in range(n_trials):
                # q = z1 I + z2 H H^H (lower triangle), g = H_i H_j^T
                for r in range(n):
                    for c in range(r + 1):
                        acc = 0
                        for k in range(nr):
                            acc = acc + hi[b, r, k] * hi[b, c, k].conjugate()
                        q[r * n + c] = z2 * acc
                    q[r * n + r] = q[r * n + r] + z1
                    for j in range(nj):
                        acc = 0
                        for k in range(nr):
                            acc = acc + hi[b, r, k] * hj[b, j, k]
                        g[r * nj + j] = acc
                # in-place Cholesky q = L L^H
                for c in range(n):
                    d = q[c * n + c].real
                    for k in range(c):
                        d = d - _abs2(q[c * n + k])
                    d = sqrt(d)
                    q[c * n + c] = d
                    for r in range(c + 1, n):
                        acc = q[r * n + c]
                        for k in range(c):
                            acc = acc - q[r * n + k] * q[c * n + k].conjugate()
                        q[r * n + c] = acc / d
                # forward substitution L Z = G; trace = ||Z||_F^2
                total = 0.0
                for j in range(nj):
                    for r in range(n):
                        acc = g[r * nj + j]
                        for k in range(r):
                            acc = acc - q[r * n + k] * g[k * nj + j]
                        g[r * nj + j] = acc / q[r * n + r].real
                        total = total + _abs2(g[r * nj + j])
                ov[b] = total
    finally:
        free(q)
        free(g)
    return out
