"""Pearson and distance correlation, per-epoch matrices, inter-epoch distances."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateSeriesError, ValidationError
from .timeseries import Epoch

FULL_HORIZON = "full-horizon"
NORM_CONVENTION = "strict-upper-triangle"

# above this many bytes of centered distance matrices, the distance-kind
# matrix builder switches from the dense centering-reuse path to the
# memory-bounded pairwise kernel
DENSE_LIMIT_BYTES = 2 << 30


class Kind(str, enum.Enum):
    PEARSON = "pearson"
    DISTANCE = "distance"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric N x N correlation matrix for one epoch (or the full horizon)."""

    kind: Kind
    epoch_index: int | str  # 1-based ordinal, or FULL_HORIZON
    values: np.ndarray
    tickers: tuple[str, ...] | None = None
    degenerate: tuple[str, ...] = ()  # constant stocks zeroed under the distance kind
    clamp_count: int = 0  # negative-roundoff dcov^2 clamps

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError("correlation matrix must be square")
        v = np.ascontiguousarray(v, dtype=np.float64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def offdiag(self) -> np.ndarray:
        """Strict-upper-triangle elements, each unordered pair once."""
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]


@dataclass(frozen=True)
class EpochDistanceMatrix:
    """Euclidean distances between epoch correlation matrices."""

    values: np.ndarray  # (K, K), zero diagonal
    kind: Kind
    norm_convention: str = NORM_CONVENTION

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n_epochs(self) -> int:
        return self.values.shape[0]


def _as_series(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size < 2:
        raise ValidationError(f"series {name} must have length >= 2")
    return x


def pearson(x, y) -> float:
    """Pearson correlation coefficient, clamped to [-1, 1]."""
    x = _as_series(x, "x")
    y = _as_series(y, "y")
    if x.size != y.size:
        raise ValidationError("series lengths differ")
    dx = x - x.mean()
    dy = y - y.mean()
    vx = float(dx @ dx)
    vy = float(dy @ dy)
    if vx == 0.0:
        raise DegenerateSeriesError("zero variance in series x")
    if vy == 0.0:
        raise DegenerateSeriesError("zero variance in series y")
    r = float(dx @ dy) / np.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def distance_covariance_sq(x, y) -> float:
    """Squared distance covariance (biased V-statistic via double centering)."""
    x = _as_series(x, "x")
    y = _as_series(y, "y")
    if x.size != y.size:
        raise ValidationError("series lengths differ")
    a = kernels.centered_distance_matrix(x)
    b = kernels.centered_distance_matrix(y)
    v = float((np.asarray(a) * np.asarray(b)).mean())
    return max(v, 0.0)


def distance_correlation(x, y, with_flag: bool = False):
    """Distance correlation in [0, 1]; 0 when either distance variance is 0.

    With ``with_flag=True`` also returns whether the degenerate (constant
    series) convention fired.
    """
    vxy = distance_covariance_sq(x, y)
    vx = distance_covariance_sq(x, x)
    vy = distance_covariance_sq(y, y)
    if vx == 0.0 or vy == 0.0:
        return (0.0, True) if with_flag else 0.0
    r = float(np.sqrt(vxy / np.sqrt(vx * vy)))
    r = min(1.0, r)
    return (r, False) if with_flag else r


def _mirror_upper(m: np.ndarray) -> np.ndarray:
    """Exact symmetry: each unordered pair taken once from the upper triangle."""
    return np.triu(m) + np.triu(m, 1).T


def correlation_matrix_from_returns(
    returns: np.ndarray,
    kind: Kind,
    epoch_index: int | str,
    tickers: tuple[str, ...] | None = None,
    dense_limit_bytes: int = DENSE_LIMIT_BYTES,
) -> CorrelationMatrix:
    """Equal-time cross-correlation matrix over all stock pairs of one window."""
    r = np.ascontiguousarray(returns, dtype=np.float64)
    n, length = r.shape
    if length < 2:
        raise ValidationError("window must span at least 2 days")
    kind = Kind(kind)
    names = tickers if tickers is not None else tuple(str(i + 1) for i in range(n))

    if kind is Kind.PEARSON:
        centered = r - r.mean(axis=1, keepdims=True)
        norms = np.sqrt(np.einsum("ij,ij->i", centered, centered))
        for i in np.flatnonzero(norms == 0.0):
            raise DegenerateSeriesError(
                f"constant stock {names[i]!r} in epoch {epoch_index} (Pearson undefined)"
            )
        z = centered / norms[:, None]
        c = _mirror_upper(z @ z.T)
        c = np.clip(c, -1.0, 1.0)
        np.fill_diagonal(c, 1.0)
        return CorrelationMatrix(kind, epoch_index, c, tickers)

    if n * length * length * 8 <= dense_limit_bytes:
        # center each stock's distance matrix once, reuse across all pairings
        flat = np.empty((n, length * length), dtype=np.float64)
        for i in range(n):
            flat[i] = np.asarray(kernels.centered_distance_matrix(r[i])).ravel()
        v = np.asarray(kernels.pairwise_dcov_sq(flat))
    else:
        # long windows: O(L log L) per pair, no L^2 matrices in memory
        v = np.empty((n, n), dtype=np.float64)
        for i in range(n):
            for j in range(i, n):
                v[i, j] = v[j, i] = kernels.dcov_sq_fast(r[i], r[j])
    clamps = int(np.count_nonzero(v < 0.0))
    v = np.maximum(v, 0.0)
    dvar = np.diag(v).copy()
    degenerate_idx = np.flatnonzero(dvar == 0.0)
    dvar[degenerate_idx] = 1.0  # avoid 0/0; those rows are zeroed below
    c = np.sqrt(v / np.sqrt(np.outer(dvar, dvar)))
    c = np.minimum(c, 1.0)
    c[degenerate_idx, :] = 0.0
    c[:, degenerate_idx] = 0.0
    c = _mirror_upper(c)
    np.fill_diagonal(c, 1.0)
    degenerate = tuple(names[i] for i in degenerate_idx)
    return CorrelationMatrix(kind, epoch_index, c, tickers, degenerate, clamps)


def correlation_matrix(epoch: Epoch, kind: Kind, tickers=None) -> CorrelationMatrix:
    return correlation_matrix_from_returns(epoch.returns, kind, epoch.index, tickers)


def epoch_distance_matrix(matrices: list[CorrelationMatrix]) -> EpochDistanceMatrix:
    """Euclidean distance between each pair of same-kind correlation matrices.

    The norm runs over the strict upper triangle (each unordered element pair
    once); the full-matrix convention differs only by a global sqrt(2) factor.
    """
    if not matrices:
        raise ValidationError("need at least one correlation matrix")
    kind = matrices[0].kind
    n = matrices[0].n
    for m in matrices:
        if m.kind != kind:
            raise ValidationError("mixed correlation kinds")
        if m.n != n:
            raise ValidationError("mixed matrix dimensions")
    k = len(matrices)
    flat = np.stack([m.offdiag() for m in matrices])
    xi = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(i + 1, k):
            d = float(np.linalg.norm(flat[i] - flat[j]))
            xi[i, j] = d
            xi[j, i] = d
    return EpochDistanceMatrix(xi, kind)
