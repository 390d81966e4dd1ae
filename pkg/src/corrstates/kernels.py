"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set CORRSTATES_FORCE_PYTHON=1 to skip the extension (used by the benchmark
and to reproduce fallback behaviour on machines without a compiler).
"""

import os

import numpy as np

if os.environ.get("CORRSTATES_FORCE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

centered_distance_matrix = _impl.centered_distance_matrix
s1_abs_products = _impl.s1_abs_products

# the all-pairs Gram product is a plain matmul; BLAS beats a hand-written
# loop, so both backends share the numpy implementation
from ._kernels_py import pairwise_dcov_sq  # noqa: E402


def row_abs_sums(x):
    """row_j = sum_k |x_j - x_k|, in O(L log L) via sorted prefix sums."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    length = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    prefix = np.cumsum(xs)
    total = prefix[-1]
    idx = np.arange(length, dtype=np.float64)
    sorted_rows = xs * (2.0 * idx + 1.0 - length) + total - prefix - np.concatenate(
        ([0.0], prefix[:-1])
    )
    rows = np.empty(length, dtype=np.float64)
    rows[order] = sorted_rows
    return rows


def dcov_sq_fast(x, y):
    """Squared distance covariance without materializing L x L matrices.

    Equals the double-centering V-statistic up to round-off; may come out a
    hair negative, callers clamp. O(L log L) with the compiled kernel.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    length = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    yo = np.ascontiguousarray(y[order])
    ranks = np.empty(length, dtype=np.int64)
    ranks[np.argsort(yo, kind="stable")] = np.arange(length, dtype=np.int64)
    s1 = 2.0 * s1_abs_products(xs, yo, ranks)
    row_x = row_abs_sums(x)
    row_y = row_abs_sums(y)
    return float(
        s1 / length**2
        + (row_x.sum() * row_y.sum()) / float(length) ** 4
        - 2.0 * float(row_x @ row_y) / float(length) ** 3
    )
