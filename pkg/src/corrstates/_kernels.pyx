# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the all-pairs distance-correlation hot loop."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def centered_distance_matrix(const double[::1] x):
    """Double-centered pairwise absolute-distance matrix of a 1-D series."""
    cdef Py_ssize_t L = x.shape[0]
    out = np.empty((L, L), dtype=np.float64)
    cdef double[:, ::1] a = out
    means = np.empty(L, dtype=np.float64)
    cdef double[::1] m = means
    cdef Py_ssize_t i, j
    cdef double d, s, grand

    for i in range(L):
        for j in range(L):
            d = x[i] - x[j]
            a[i, j] = d if d >= 0.0 else -d

    # row means double as column means: the distance matrix is symmetric
    grand = 0.0
    for i in range(L):
        s = 0.0
        for j in range(L):
            s += a[i, j]
        m[i] = s / L
        grand += s
    grand /= <double>(L * L)

    for i in range(L):
        for j in range(L):
            a[i, j] = a[i, j] - m[i] - m[j] + grand
    return out


def s1_abs_products(const double[::1] xs, const double[::1] ys,
                    const long long[::1] ranks):
    """Sum over pairs j < k of |xs_j - xs_k| * |ys_j - ys_k|.

    ``xs`` must be ascending; ``ranks`` are the distinct 0-based ranks of
    ``ys``. Runs in O(L log L) with Fenwick trees over the y-ranks holding
    counts and weighted sums (x, y, x*y). Pairs with equal x or y contribute
    exactly zero on whichever side of the rank split they land.
    """
    cdef Py_ssize_t L = xs.shape[0]
    cnt_arr = np.zeros(L + 1, dtype=np.float64)
    sx_arr = np.zeros(L + 1, dtype=np.float64)
    sy_arr = np.zeros(L + 1, dtype=np.float64)
    sxy_arr = np.zeros(L + 1, dtype=np.float64)
    cdef double[::1] fcnt = cnt_arr
    cdef double[::1] fsx = sx_arr
    cdef double[::1] fsy = sy_arr
    cdef double[::1] fsxy = sxy_arr
    cdef double total = 0.0
    cdef double tx = 0.0, ty = 0.0, txy = 0.0
    cdef double c1, sx1, sy1, sxy1, c2, sx2, sy2, sxy2, xj, yj, xyj
    cdef Py_ssize_t j, i, r

    for j in range(L):
        r = ranks[j] + 1
        c1 = sx1 = sy1 = sxy1 = 0.0
        i = r
        while i > 0:
            c1 += fcnt[i]
            sx1 += fsx[i]
            sy1 += fsy[i]
            sxy1 += fsxy[i]
            i -= i & (-i)
        c2 = j - c1
        sx2 = tx - sx1
        sy2 = ty - sy1
        sxy2 = txy - sxy1
        xj = xs[j]
        yj = ys[j]
        xyj = xj * yj
        total += (xyj * c1 - xj * sy1 - yj * sx1 + sxy1)
        total -= (xyj * c2 - xj * sy2 - yj * sx2 + sxy2)
        i = r
        while i <= L:
            fcnt[i] += 1.0
            fsx[i] += xj
            fsy[i] += yj
            fsxy[i] += xyj
            i += i & (-i)
        tx += xj
        ty += yj
        txy += xyj
    return total
