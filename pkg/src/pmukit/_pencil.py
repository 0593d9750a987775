"""Compiled kernel for the matrix-pencil Gram construction.

The Gram matrix of a Hankel data matrix is Toeplitz-structured along each
diagonal: entry (i, j) is a windowed lag-(j-i) product sum. Building it from
running sums costs O(N*L) instead of the O(N*L^2) dense product.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def hankel_gram(y: np.ndarray, L: int) -> np.ndarray:
    """Gram matrix Y^T Y of the (N-L)x(L+1) Hankel matrix of y."""
    n = y.shape[0]
    rows = n - L
    g = np.empty((L + 1, L + 1), np.float64)
    c = np.empty(n, np.float64)
    for d in range(L + 1):
        m = n - d
        acc = 0.0
        for i in range(m):
            acc += y[i] * y[i + d]
            c[i] = acc
        for j in range(L - d + 1):
            v = c[rows - 1 + j]
            if j > 0:
                v -= c[j - 1]
            g[j, j + d] = v
            g[j + d, j] = v
    return g
