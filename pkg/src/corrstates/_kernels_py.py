"""Pure-numpy fallback for the distance-correlation kernels."""

import numpy as np


def centered_distance_matrix(x):
    """Double-centered pairwise absolute-distance matrix of a 1-D series."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    d = np.abs(x[:, None] - x[None, :])
    # row means double as column means: the distance matrix is symmetric
    m = d.mean(axis=1)
    return d - m[:, None] - m[None, :] + m.mean()


def s1_abs_products(xs, ys, ranks, chunk=512):
    """Sum over pairs j < k of |xs_j - xs_k| * |ys_j - ys_k|.

    O(L^2) time but O(chunk * L) memory, so it stays usable at large L.
    The rank argument exists for signature parity with the compiled kernel.
    """
    del ranks
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    total = 0.0
    for start in range(0, xs.size, chunk):
        stop = start + chunk
        xd = np.abs(xs[start:stop, None] - xs[None, :])
        yd = np.abs(ys[start:stop, None] - ys[None, :])
        total += float(np.einsum("ij,ij->", xd, yd))
    return total / 2.0  # the full double sum counts each unordered pair twice


def pairwise_dcov_sq(flat):
    """All-pairs squared distance covariance from flattened centered matrices."""
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    gram = flat @ flat.T
    gram /= flat.shape[1]
    # single write per unordered pair: mirror the upper triangle
    return np.triu(gram) + np.triu(gram, 1).T
