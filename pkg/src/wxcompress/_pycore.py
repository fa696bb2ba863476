"""Pure-Python (numpy) versions of the compiled kernels in ``_core.pyx``.

Same algorithms, same loop structure; the innermost loops are vectorized.
"""

import math

import numpy as np


def threshold_edges(lat, lon, threshold, radius):
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    n = lat.shape[0]
    phi = lat * (math.pi / 180.0)
    cphi = np.cos(phi)
    lam = lon * (math.pi / 180.0)
    out_i, out_j, out_d = [], [], []
    for i in range(n - 1):
        s1 = np.sin((phi[i + 1:] - phi[i]) * 0.5)
        s2 = np.sin((lam[i + 1:] - lam[i]) * 0.5)
        a = s1 * s1 + cphi[i] * cphi[i + 1:] * s2 * s2
        np.minimum(a, 1.0, out=a)
        d = 2.0 * radius * np.arcsin(np.sqrt(a))
        hit = np.flatnonzero(d < threshold)
        if hit.size:
            out_i.append(np.full(hit.size, i, dtype=np.int64))
            out_j.append(hit + (i + 1))
            out_d.append(d[hit])
    if not out_i:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    return (np.concatenate(out_i).astype(np.int64),
            np.concatenate(out_j).astype(np.int64),
            np.concatenate(out_d))


def _tred2(U, d, e, n):
    for j in range(n):
        d[j] = U[j, n - 1]
    for i in range(n - 1, 0, -1):
        scale = float(np.abs(d[:i]).sum())
        h = 0.0
        if scale == 0.0:
            e[i] = d[i - 1]
            d[:i] = U[:i, i - 1]
            U[:i, i] = 0.0
            U[i, :i] = 0.0
        else:
            d[:i] /= scale
            h = float(d[:i] @ d[:i])
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            e[:i] = 0.0
            for j in range(i):
                f = d[j]
                U[i, j] = f
                row = U[j, j + 1:i]
                g = e[j] + U[j, j] * f + float(row @ d[j + 1:i])
                e[j + 1:i] += row * f
                e[j] = g
            e[:i] /= h
            f = float(e[:i] @ d[:i])
            hh = f / (h + h)
            e[:i] -= hh * d[:i]
            for j in range(i):
                U[j, j:i] -= d[j] * e[j:i] + e[j] * d[j:i]
                d[j] = U[j, i - 1]
                U[j, i] = 0.0
        d[i] = h

    for i in range(n - 1):
        U[i, n - 1] = U[i, i]
        U[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            d[:i + 1] = U[i + 1, :i + 1] / h
            block = U[:i + 1, :i + 1]
            g = block @ U[i + 1, :i + 1]
            block -= np.outer(g, d[:i + 1])
        U[i + 1, :i + 1] = 0.0
    d[:] = U[:, n - 1]
    U[:, n - 1] = 0.0
    U[n - 1, n - 1] = 1.0
    e[0] = 0.0


def _tql2(U, d, e, n, max_iter):
    e[:n - 1] = e[1:n].copy()
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0 ** -52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n:
            if abs(e[m]) <= eps * tst1:
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
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                d[l + 2:] -= h
                f = f + h
                p = d[m]
                c = c2 = c3 = 1.0
                el1 = e[l + 1]
                s = s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    lo = U[i].copy()
                    hi = U[i + 1]
                    U[i] = c * lo - s * hi
                    U[i + 1] = s * lo + c * hi
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return -1


def symmetric_eigh(a, max_iter=50):
    A = np.ascontiguousarray(a, dtype=np.float64)
    n = A.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0)), -1
    U = A.T.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    _tred2(U, d, e, n)
    failed = _tql2(U, d, e, n, max_iter)
    if failed >= 0:
        return d, U.T.copy(), failed
    for i in range(n - 1):
        k = i + int(np.argmin(d[i:]))
        if d[k] < d[i]:
            d[i], d[k] = d[k], d[i]
            U[[i, k]] = U[[k, i]]
    return d, U.T.copy(), -1
