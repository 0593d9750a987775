"""Trailing-window rolling median and MAD kernels.

The analysis path runs these over 54,000-sample channels for whole fleets,
so the kernel is numba-compiled: a sorted sliding buffer gives O(n*w)
median maintenance, and the MAD of each window is taken in O(w) by walking
outward from the median over the already-sorted buffer.

Missing samples are encoded as NaN on input and are simply never entered
into the window buffer.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _rolling_median_mad(x: np.ndarray, order: int, need_mad: bool):
    n = x.shape[0]
    med = np.full(n, np.nan)
    mad = np.full(n, np.nan)
    buf = np.empty(order, np.float64)
    cnt = 0
    for i in range(n):
        v = x[i]
        if not np.isnan(v):
            lo, hi = 0, cnt
            while lo < hi:
                mid = (lo + hi) >> 1
                if buf[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            for j in range(cnt, lo, -1):
                buf[j] = buf[j - 1]
            buf[lo] = v
            cnt += 1
        old = i - order
        if old >= 0:
            u = x[old]
            if not np.isnan(u):
                lo, hi = 0, cnt
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if buf[mid] < u:
                        lo = mid + 1
                    else:
                        hi = mid
                for j in range(lo, cnt - 1):
                    buf[j] = buf[j + 1]
                cnt -= 1
        if i >= order - 1 and cnt > 0:
            m = 0.5 * (buf[(cnt - 1) >> 1] + buf[cnt >> 1])
            med[i] = m
            if need_mad:
                # First element strictly above m.
                lo, hi = 0, cnt
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if buf[mid] <= m:
                        lo = mid + 1
                    else:
                        hi = mid
                left = lo - 1
                right = lo
                k1 = (cnt - 1) >> 1
                k2 = cnt >> 1
                d1 = 0.0
                d2 = 0.0
                for t in range(k2 + 1):
                    dl = m - buf[left] if left >= 0 else np.inf
                    dr = buf[right] - m if right < cnt else np.inf
                    if dl <= dr:
                        d = dl
                        left -= 1
                    else:
                        d = dr
                        right += 1
                    if t == k1:
                        d1 = d
                    if t == k2:
                        d2 = d
                mad[i] = 0.5 * (d1 + d2)
    return med, mad


def rolling_median(x: np.ndarray, order: int) -> np.ndarray:
    """Median of the trailing `order` non-NaN samples ending at each index.

    Defined from index order-1 onward; earlier entries are NaN. Windows with
    zero valid samples yield NaN.
    """
    med, _ = _rolling_median_mad(np.ascontiguousarray(x, dtype=np.float64), int(order), False)
    return med

def rolling_median_mad(x: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Trailing-window median and median-absolute-deviation, NaN-aware."""
    return _rolling_median_mad(np.ascontiguousarray(x, dtype=np.float64), int(order), True)
