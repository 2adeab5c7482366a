"""Implicit-shift QL iteration for symmetric tridiagonal matrices (numba kernels)."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps


@njit(cache=True)
def _tql(d, e, zt, want_vectors, max_iter):
    """In-place QL with Wilkinson-type shifts.

    ``d`` holds the diagonal, ``e[i]`` couples i and i+1 (``e[n-1]`` is
    scratch). Rotations are applied to the rows of ``zt`` (eigenvectors
    stored as rows). Returns 0 on success or the index of the first
    eigenvalue that failed to converge plus one.
    """
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
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
                if want_vectors:
                    for k in range(zt.shape[1]):
                        f = zt[i + 1, k]
                        zt[i + 1, k] = s * zt[i, k] + c * f
                        zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def tql(diag: np.ndarray, off: np.ndarray, vectors: np.ndarray | None = None, max_iter: int = 60):
    """Eigenvalues (and optionally rotated vectors) of a symmetric tridiagonal matrix.

    Returns ``(values, vectors_rows, status)``; ``vectors_rows[i]`` is the
    eigenvector of ``values[i]`` when ``vectors`` was the identity.
    Nothing is sorted here.
    """
    d = np.array(diag, dtype=np.float64)
    n = d.shape[0]
    e = np.zeros(n)
    e[:n - 1] = off
    if vectors is None:
        zt = np.zeros((1, 1))
        status = _tql(d, e, zt, False, max_iter)
        return d, None, status
    zt = np.ascontiguousarray(np.array(vectors, dtype=np.float64).T)
    status = _tql(d, e, zt, True, max_iter)
    return d, zt, status
