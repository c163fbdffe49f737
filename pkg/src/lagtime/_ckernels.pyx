# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the fallback)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, hypot, copysign

cnp.import_array()


def laguerre_array(Py_ssize_t n, double alpha, x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t size = xv.shape[0]
    out = np.ones(size)
    if n == 0:
        return out
    prev_arr = np.ones(size)
    cdef double[::1] cur = out
    cdef double[::1] prev = prev_arr
    cdef Py_ssize_t i, k
    cdef double nxt
    for i in range(size):
        cur[i] = 1.0 + alpha - xv[i]
    # k outer, points inner: the inner loop vectorizes
    for k in range(1, n):
        for i in range(size):
            nxt = ((2 * k + 1 + alpha - xv[i]) * cur[i] - (k + alpha) * prev[i]) / (k + 1)
            prev[i] = cur[i]
            cur[i] = nxt
    return out


def laguerre_table(Py_ssize_t nmax, double alpha, x):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t size = xv.shape[0]
    out = np.empty((nmax + 1, size))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, k
    for i in range(size):
        ov[0, i] = 1.0
    if nmax >= 1:
        for i in range(size):
            ov[1, i] = 1.0 + alpha - xv[i]
    for k in range(1, nmax):
        for i in range(size):
            ov[k + 1, i] = ((2 * k + 1 + alpha - xv[i]) * ov[k, i]
                            - (k + alpha) * ov[k - 1, i]) / (k + 1)
    return out


cdef inline void _neumaier(double *s, double *comp, double t) noexcept nogil:
    cdef double tot = s[0] + t
    if fabs(s[0]) >= fabs(t):
        comp[0] += (s[0] - tot) + t
    else:
        comp[0] += (t - tot) + s[0]
    s[0] = tot


def hyp2f1_terminating_array(Py_ssize_t n, double b, double c, z):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t size = zv.shape[0]
    out = np.empty(size, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, m
    cdef double complex term
    cdef double s_re, s_im, c_re, c_im, ratio
    for i in range(size):
        term = 1.0
        s_re = 1.0
        s_im = 0.0
        c_re = 0.0
        c_im = 0.0
        for m in range(n):
            ratio = (m - n) * (b + m) / ((c + m) * (m + 1))
            term = term * ratio * zv[i]
            _neumaier(&s_re, &c_re, term.real)
            _neumaier(&s_im, &c_im, term.imag)
        ov[i] = (s_re + c_re) + 1j * (s_im + c_im)
    return out


def tridiag_ql(diag, offdiag, int vectors, double tol, int maxiter):
    d_arr = np.array(diag, dtype=np.float64)
    cdef Py_ssize_t n = d_arr.shape[0]
    e_arr = np.zeros(n)
    e_arr[: n - 1] = offdiag
    # rows of zt are the columns being rotated, so each rotation is contiguous
    if vectors == 2:
        zt_arr = np.eye(n)
    elif vectors == 1:
        zt_arr = np.zeros((n, 1))
        zt_arr[0, 0] = 1.0
    else:
        zt_arr = np.zeros((n, 0))
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[:, ::1] zt = zt_arr
    cdef Py_ssize_t rows = zt.shape[1]
    cdef Py_ssize_t l, m, i, k
    cdef int it
    cdef bint underflow
    cdef double dd, g, r, s, c, p, f, b, zk
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            if it == maxiter:
                return d_arr, zt_arr.T, l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(rows):
                    zk = zt[i, k]
                    zt[i, k] = c * zk - s * zt[i + 1, k]
                    zt[i + 1, k] = s * zk + c * zt[i + 1, k]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d_arr, zt_arr.T, -1
