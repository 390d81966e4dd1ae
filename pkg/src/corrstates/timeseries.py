"""Price panel ingestion, daily returns and epoch slicing."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestionError, ValidationError


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PricePanel:
    """Rectangular N-stock x T-day panel of positive closing prices."""

    tickers: tuple[str, ...]
    dates: tuple[str, ...]
    prices: np.ndarray  # shape (N, T)
    sectors: dict[str, str] | None = None

    def __post_init__(self):
        n, t = self.prices.shape
        if n != len(self.tickers) or t != len(self.dates):
            raise ValidationError("price matrix shape does not match ticker/date labels")
        if n < 2 or t < 3:
            raise ValidationError(f"panel too small: need N >= 2 and T >= 3, got N={n}, T={t}")
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0):
            raise ValidationError("prices must be strictly positive and finite")
        if any(self.dates[i] >= self.dates[i + 1] for i in range(t - 1)):
            raise ValidationError("dates must be strictly increasing")
        object.__setattr__(self, "prices", _freeze(self.prices))

    @property
    def n_stocks(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnPanel:
    """Daily simple returns; column t is labeled by the later day of the pair."""

    tickers: tuple[str, ...]
    dates: tuple[str, ...]
    returns: np.ndarray  # shape (N, T-1)

    def __post_init__(self):
        if self.returns.shape != (len(self.tickers), len(self.dates)):
            raise ValidationError("return matrix shape does not match ticker/date labels")
        object.__setattr__(self, "returns", _freeze(self.returns))

    @property
    def n_stocks(self) -> int:
        return len(self.tickers)

    @property
    def n_days(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class Epoch:
    """A contiguous window of returns; the unit of all per-epoch analysis."""

    index: int  # 1-based
    start: int  # offset into the ReturnPanel, inclusive
    end: int  # exclusive
    returns: np.ndarray = field(repr=False)  # shape (N, end-start), read-only view

    @property
    def length(self) -> int:
        return self.end - self.start


def load_prices(path, sectors_path=None) -> PricePanel:
    """Load a wide CSV (date column + one column per ticker) into a PricePanel.

    Rejects incomplete panels: every cell must parse as a positive number.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if len(header) < 2:
            raise IngestionError(f"{path}: header must have a date column plus tickers")
        tickers = [c.strip() for c in header[1:]]
        seen = set()
        for tk in tickers:
            if not tk:
                raise IngestionError(f"{path}: empty ticker name in header")
            if tk in seen:
                raise IngestionError(f"{path}: duplicate ticker {tk!r}")
            seen.add(tk)

        dates: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(tickers) + 1:
                raise IngestionError(
                    f"{path}:{lineno}: expected {len(tickers) + 1} columns, got {len(row)}"
                )
            date = row[0].strip()
            vals = []
            for tk, cell in zip(tickers, row[1:]):
                cell = cell.strip()
                if not cell:
                    raise IngestionError(f"{path}: missing cell for ticker {tk!r} on {date}")
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: unparseable price {cell!r} for ticker {tk!r} on {date}"
                    ) from None
                if not np.isfinite(v) or v <= 0:
                    raise IngestionError(
                        f"{path}: non-positive price {v!r} for ticker {tk!r} on {date}"
                    )
                vals.append(v)
            dates.append(date)
            rows.append(vals)

    if len(dates) != len(set(dates)):
        raise IngestionError(f"{path}: duplicate dates")
    for i in range(len(dates) - 1):
        if dates[i] >= dates[i + 1]:
            raise IngestionError(f"{path}: dates not strictly increasing at {dates[i + 1]!r}")

    sectors = load_sectors(sectors_path) if sectors_path else None
    prices = np.array(rows, dtype=np.float64).T  # (N, T)
    try:
        return PricePanel(tuple(tickers), tuple(dates), prices, sectors)
    except ValidationError as exc:
        raise IngestionError(f"{path}: {exc}") from None


def load_sectors(path) -> dict[str, str]:
    """Load the optional two-column ticker,sector sidecar CSV."""
    sectors: dict[str, str] = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if lineno == 1 and [c.strip().lower() for c in row[:2]] == ["ticker", "sector"]:
                continue
            if len(row) < 2:
                raise IngestionError(f"{path}:{lineno}: expected ticker,sector")
            sectors[row[0].strip()] = row[1].strip()
    return sectors


def compute_returns(panel: PricePanel) -> ReturnPanel:
    """Daily simple returns r(t) = (P(t+1) - P(t)) / P(t), one column fewer."""
    p = panel.prices
    returns = (p[:, 1:] - p[:, :-1]) / p[:, :-1]
    return ReturnPanel(panel.tickers, panel.dates[1:], returns)


def slice_epochs(panel: ReturnPanel, epoch_length: int) -> list[Epoch]:
    """Non-overlapping epochs of uniform length; trailing remainder days dropped."""
    if epoch_length < 1:
        raise ValidationError(f"epoch length must be positive, got {epoch_length}")
    t = panel.n_days
    if epoch_length > t:
        raise ValidationError(f"epoch length {epoch_length} exceeds {t} return days")
    k = t // epoch_length
    return [
        Epoch(
            index=i + 1,
            start=i * epoch_length,
            end=(i + 1) * epoch_length,
            returns=panel.returns[:, i * epoch_length : (i + 1) * epoch_length],
        )
        for i in range(k)
    ]


def epoch_date_range(panel: ReturnPanel, epoch: Epoch) -> str:
    """Human-readable date span covered by an epoch, e.g. '2008-01-02:2008-02-28'."""
    return f"{panel.dates[epoch.start]}:{panel.dates[epoch.end - 1]}"
