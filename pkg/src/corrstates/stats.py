"""Moments and histograms of correlation-matrix elements (off-diagonal only)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationMatrix, Kind
from .errors import ValidationError


@dataclass(frozen=True)
class Moments:
    """Population moments of the strict-upper-triangle element distribution."""

    epoch_index: int | str
    kind: Kind
    mu: float
    sigma: float
    gamma1: float  # skewness
    gamma2: float  # excess kurtosis
    degenerate: bool = False


@dataclass(frozen=True)
class Histogram:
    counts: np.ndarray  # len == bins
    edges: np.ndarray  # len == bins + 1
    underflow: int
    overflow: int

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow


def matrix_moments(matrix: CorrelationMatrix) -> Moments:
    """Mean, std, skewness and excess kurtosis of the off-diagonal elements.

    Population convention (divide by the element count): the off-diagonals are
    the whole population, not a sample.
    """
    vals = matrix.offdiag()
    mu = float(vals.mean())
    if vals.max() == vals.min():
        return Moments(matrix.epoch_index, matrix.kind, mu, 0.0, 0.0, 0.0, degenerate=True)
    d = vals - mu
    m2 = float(np.mean(d**2))
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    sigma = float(np.sqrt(m2))
    return Moments(
        epoch_index=matrix.epoch_index,
        kind=matrix.kind,
        mu=mu,
        sigma=sigma,
        gamma1=m3 / m2**1.5,
        gamma2=m4 / m2**2 - 3.0,
    )


def histogram(matrix: CorrelationMatrix, bins: int, lo: float, hi: float) -> Histogram:
    """Bin the off-diagonal elements over [lo, hi); out-of-range goes to
    underflow/overflow so the total count is always N(N-1)/2.

    Bins are half-open with the final bin closed; a value on an interior edge
    lands in the higher bin.
    """
    if bins < 1:
        raise ValidationError(f"need at least one bin, got {bins}")
    if not lo < hi:
        raise ValidationError(f"invalid histogram range [{lo}, {hi}]")
    vals = matrix.offdiag()
    underflow = int(np.count_nonzero(vals < lo))
    overflow = int(np.count_nonzero(vals > hi))
    in_range = vals[(vals >= lo) & (vals <= hi)]
    counts, edges = np.histogram(in_range, bins=bins, range=(lo, hi))
    return Histogram(counts, edges, underflow, overflow)
