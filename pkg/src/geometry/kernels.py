"""numba kernels for the O(n*m) sampling and grouping loops.

Distances are squared L2, accumulated as dx*dx + dy*dy + dz*dz so that the
brute-force oracles in the test suite reproduce them bit-for-bit.
"""

import numpy as np
from numba import njit, prange


@njit
def fps_kernel(points: np.ndarray, n: int, start: int) -> np.ndarray:
    m = points.shape[0]
    selected = np.empty(n, dtype=np.int64)
    taken = np.zeros(m, dtype=np.bool_)
    min_dist = np.full(m, np.inf)

    selected[0] = start
    taken[start] = True
    last = start
    for i in range(1, n):
        lx = points[last, 0]
        ly = points[last, 1]
        lz = points[last, 2]
        best = -1.0
        best_index = -1
        for j in range(m):
            dx = points[j, 0] - lx
            dy = points[j, 1] - ly
            dz = points[j, 2] - lz
            d = dx * dx + dy * dy + dz * dz
            if d < min_dist[j]:
                min_dist[j] = d
            # strict comparison keeps the lowest index on ties
            if not taken[j] and min_dist[j] > best:
                best = min_dist[j]
                best_index = j
        selected[i] = best_index
        taken[best_index] = True
        last = best_index
    return selected


@njit(parallel=True)
def knn_kernel(points: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    n = centers.shape[0]
    m = points.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    for c in prange(n):
        dist = np.empty(m)
        cx = centers[c, 0]
        cy = centers[c, 1]
        cz = centers[c, 2]
        for j in range(m):
            dx = points[j, 0] - cx
            dy = points[j, 1] - cy
            dz = points[j, 2] - cz
            dist[j] = dx * dx + dy * dy + dz * dz
        # mergesort is stable: equal distances keep ascending point index
        order = np.argsort(dist, kind="mergesort")
        for t in range(k):
            out[c, t] = order[t]
    return out
