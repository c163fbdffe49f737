"""Pure-Python/numpy versions of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is missing or ``LAGTIME_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np


def laguerre_array(n, alpha, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def laguerre_table(nmax, alpha, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((nmax + 1, x.size))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + alpha - x
    for k in range(1, nmax):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


def hyp2f1_terminating_array(n, b, c, z):
    """Sum of the n+1 terms of 2F1(-n, b; c; z), Neumaier-compensated."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    term = np.ones_like(z)
    s_re = np.ones(z.shape)
    s_im = np.zeros(z.shape)
    comp_re = np.zeros(z.shape)
    comp_im = np.zeros(z.shape)
    for m in range(n):
        term = term * ((m - n) * (b + m) / ((c + m) * (m + 1))) * z
        for s, comp, t in ((s_re, comp_re, term.real), (s_im, comp_im, term.imag)):
            tot = s + t
            big = np.abs(s) >= np.abs(t)
            comp += np.where(big, (s - tot) + t, (t - tot) + s)
            s[...] = tot
    return (s_re + comp_re) + 1j * (s_im + comp_im)


def tridiag_ql(diag, offdiag, vectors, tol, maxiter):
    """Implicit-shift QL iteration on a symmetric tridiagonal matrix.

    ``vectors``: 0 skips eigenvectors, 1 tracks only their first components,
    2 tracks the full matrix. Returns ``(eigenvalues, z, fail_index)`` with
    ``fail_index == -1`` on success. Eigenvalues come back unsorted.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in offdiag] + [0.0]
    # rows of zt are the columns being rotated
    if vectors == 2:
        zt = np.eye(n)
    elif vectors == 1:
        zt = np.zeros((n, 1))
        zt[0, 0] = 1.0
    else:
        zt = np.zeros((n, 0))
    track = zt.shape[1] > 0

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            if it == maxiter:
                return np.array(d), zt.T, l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
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
                if track:
                    zi = zt[i].copy()
                    zi1 = zt[i + 1]
                    zt[i] = c * zi - s * zi1
                    zt[i + 1] = s * zi + c * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d), zt.T, -1
