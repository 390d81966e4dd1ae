"""Eigendecomposition, participation ratios and the GOE delocalization baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationMatrix, Kind
from .errors import ValidationError

ZERO_THRESHOLD = 1e-8


@dataclass(frozen=True)
class Spectrum:
    epoch_index: int | str
    kind: Kind
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns aligned with eigenvalues, orthonormal
    participation_ratios: np.ndarray
    clamp_count: int = 0  # tiny negative eigenvalues clamped to zero

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def e_max(self) -> float:
        return float(self.eigenvalues[-1])


@dataclass(frozen=True)
class SpectrumSummary:
    epoch_index: int | str
    kind: Kind
    e_max: float
    pr_emax: float
    zero_count: int
    mean_pr: float


def participation_ratio(v) -> float:
    """Inverse fourth moment of a unit eigenvector; 1 = localized, N = uniform."""
    v = np.asarray(v, dtype=np.float64).ravel()
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"eigenvector not unit-normalized (|v| = {norm!r})")
    return float(1.0 / np.sum(v**4))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Largest-magnitude component positive, so spectra are reproducible."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]


def eigendecompose(matrix: CorrelationMatrix) -> Spectrum:
    """Full symmetric eigendecomposition with eigenvalues ascending."""
    c = matrix.values
    if not np.array_equal(c, c.T):
        raise ValidationError("matrix is not symmetric")
    eigenvalues, vectors = np.linalg.eigh(c)
    # Pearson matrices are Gram matrices, so negatives there are round-off;
    # distance-correlation matrices (elementwise sqrt of a Gram matrix) can
    # carry genuinely negative eigenvalues, which are reported as-is.
    roundoff = (eigenvalues < 0.0) & (eigenvalues >= -1e-10)
    clamps = int(np.count_nonzero(roundoff))
    eigenvalues = np.where(roundoff, 0.0, eigenvalues)
    vectors = _fix_signs(vectors)
    prs = 1.0 / np.sum(vectors**4, axis=0)
    return Spectrum(matrix.epoch_index, matrix.kind, eigenvalues, vectors, prs, clamps)


def spectrum_summary(spectrum: Spectrum, zero_threshold: float = ZERO_THRESHOLD) -> SpectrumSummary:
    return SpectrumSummary(
        epoch_index=spectrum.epoch_index,
        kind=spectrum.kind,
        e_max=spectrum.e_max,
        pr_emax=float(spectrum.participation_ratios[-1]),
        zero_count=int(np.count_nonzero(spectrum.eigenvalues < zero_threshold)),
        mean_pr=float(spectrum.participation_ratios.mean()),
    )


def sample_goe(n: int, rng: np.random.Generator) -> np.ndarray:
    """GOE matrix with off-diagonal variance 1/n, diagonal variance 2/n."""
    a = rng.standard_normal((n, n))
    return (a + a.T) / np.sqrt(2.0 * n)


def goe_pr_baseline(n: int, trials: int, seed: int) -> float:
    """Empirical mean participation ratio over GOE eigenvectors (expect ~ n/3).

    Each trial draws from its own spawned random stream, so the estimate is
    deterministic for a given seed regardless of evaluation order.
    """
    if n < 2:
        raise ValidationError("need dimension >= 2")
    if trials < 1:
        raise ValidationError("need at least one trial")
    streams = np.random.SeedSequence(seed).spawn(trials)
    total = 0.0
    for stream in streams:
        m = sample_goe(n, np.random.default_rng(stream))
        _, vectors = np.linalg.eigh(m)
        total += float(np.sum(1.0 / np.sum(vectors**4, axis=0)))
    return total / (trials * n)
