# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: all-pairs proximity edges and a dense symmetric eigensolver.

Both routines mirror ``_pycore`` operation for operation; the Python module is
the reference and the fallback when this extension is not built.
"""

import numpy as np

from libc.math cimport sin, cos, asin, sqrt, fabs, hypot, M_PI


cdef double DEG = M_PI / 180.0


def threshold_edges(double[::1] lat, double[::1] lon, double threshold, double radius):
    """Return ``(i, j, dist)`` arrays for every pair i < j closer than ``threshold``."""
    cdef Py_ssize_t n = lat.shape[0]
    cdef Py_ssize_t i, j, m = 0, cap = 1024
    cdef double p1, p2, dp, dl, a, d, s1, s2
    phi = np.empty(n)
    cphi = np.empty(n)
    lam = np.empty(n)
    cdef double[::1] phi_v = phi, cphi_v = cphi, lam_v = lam
    for i in range(n):
        phi_v[i] = lat[i] * DEG
        cphi_v[i] = cos(phi_v[i])
        lam_v[i] = lon[i] * DEG

    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    out_d = np.empty(cap)
    cdef long long[::1] oi = out_i, oj = out_j
    cdef double[::1] od = out_d

    for i in range(n):
        for j in range(i + 1, n):
            s1 = sin((phi_v[j] - phi_v[i]) * 0.5)
            s2 = sin((lam_v[j] - lam_v[i]) * 0.5)
            a = s1 * s1 + cphi_v[i] * cphi_v[j] * s2 * s2
            if a > 1.0:
                a = 1.0
            d = 2.0 * radius * asin(sqrt(a))
            if d < threshold:
                if m == cap:
                    cap *= 2
                    out_i = np.resize(out_i, cap)
                    out_j = np.resize(out_j, cap)
                    out_d = np.resize(out_d, cap)
                    oi = out_i
                    oj = out_j
                    od = out_d
                oi[m] = i
                oj[m] = j
                od[m] = d
                m += 1
    return out_i[:m].copy(), out_j[:m].copy(), out_d[:m].copy()


cdef void _tred2(double[:, ::1] U, double[::1] d, double[::1] e, Py_ssize_t n):
    # Householder reduction to tridiagonal form. U holds the transpose of the
    # working matrix so that every inner loop walks a contiguous row.
    cdef Py_ssize_t i, j, k
    cdef double scale, h, f, g, hh
    for j in range(n):
        d[j] = U[j, n - 1]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += fabs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = U[j, i - 1]
                U[j, i] = 0.0
                U[i, j] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                U[i, j] = f
                g = e[j] + U[j, j] * f
                for k in range(j + 1, i):
                    g += U[j, k] * d[k]
                    e[k] += U[j, k] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    U[j, k] -= f * e[k] + g * d[k]
                d[j] = U[j, i - 1]
                U[j, i] = 0.0
        d[i] = h

    for i in range(n - 1):
        U[i, n - 1] = U[i, i]
        U[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = U[i + 1, k] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += U[i + 1, k] * U[j, k]
                for k in range(i + 1):
                    U[j, k] -= g * d[k]
        for k in range(i + 1):
            U[i + 1, k] = 0.0
    for j in range(n):
        d[j] = U[j, n - 1]
        U[j, n - 1] = 0.0
    U[n - 1, n - 1] = 1.0
    e[0] = 0.0


cdef Py_ssize_t _tql2(double[:, ::1] U, double[::1] d, double[::1] e,
                      Py_ssize_t n, int max_iter):
    # Implicit QL on the tridiagonal (d, e). Returns -1 on success, otherwise
    # the index of the eigenvalue that failed to converge.
    cdef Py_ssize_t i, k, l, m
    cdef int it
    cdef double f = 0.0, tst1 = 0.0, eps = 2.0 ** -52
    cdef double g, p, r, dl1, h, c, c2, c3, el1, s, s2, t
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        tst1 = max(tst1, fabs(d[l]) + fabs(e[l]))
        m = l
        while m < n:
            if fabs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > max_iter:
                    return l
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f = f + h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    for k in range(n):
                        t = U[i + 1, k]
                        U[i + 1, k] = s * U[i, k] + c * t
                        U[i, k] = c * U[i, k] - s * t
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if fabs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return -1


def symmetric_eigh(a, int max_iter=50):
    """Full eigendecomposition of a dense symmetric matrix.

    Returns ``(w, V, failed)``: eigenvalues ascending, eigenvectors as columns,
    and ``failed`` = -1 on success or the index that exceeded ``max_iter``.
    """
    A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0)), -1
    U = A.T.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    cdef double[:, ::1] Uv = U
    cdef double[::1] dv = d, ev = e
    _tred2(Uv, dv, ev, n)
    cdef Py_ssize_t failed = _tql2(Uv, dv, ev, n, max_iter)
    if failed >= 0:
        return d, U.T.copy(), failed
    # selection sort, same pairing as the reference
    cdef Py_ssize_t i, j, k
    cdef double p
    for i in range(n - 1):
        k = i
        p = dv[i]
        for j in range(i + 1, n):
            if dv[j] < p:
                k = j
                p = dv[j]
        if k != i:
            dv[k] = dv[i]
            dv[i] = p
            for j in range(n):
                p = Uv[i, j]
                Uv[i, j] = Uv[k, j]
                Uv[k, j] = p
    return d, U.T.copy(), -1
