"""Epoch-wise correlation analysis of financial panels: Pearson and distance
correlation matrices, spectral statistics, and market-state clustering."""

from .clustering import (
    Dendrogram,
    MarketStateModel,
    TransitionMatrix,
    build_market_states,
    cut,
    transitions,
    ward_linkage,
)
from .correlation import (
    FULL_HORIZON,
    CorrelationMatrix,
    EpochDistanceMatrix,
    Kind,
    correlation_matrix,
    correlation_matrix_from_returns,
    distance_correlation,
    distance_covariance_sq,
    epoch_distance_matrix,
    pearson,
)
from .errors import (
    CorrStatesError,
    DegenerateSeriesError,
    IngestionError,
    NumericError,
    ValidationError,
)
from .pipeline import RunConfig, run_pipeline
from .spectral import (
    Spectrum,
    SpectrumSummary,
    eigendecompose,
    goe_pr_baseline,
    participation_ratio,
    spectrum_summary,
)
from .stats import Histogram, Moments, histogram, matrix_moments
from .timeseries import (
    Epoch,
    PricePanel,
    ReturnPanel,
    compute_returns,
    load_prices,
    slice_epochs,
)

__version__ = "0.1.0"
