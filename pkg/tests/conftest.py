import csv

import numpy as np
import pytest

from corrstates import PricePanel, ReturnPanel


def write_price_csv(path, tickers, dates, prices):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", *tickers])
        for j, d in enumerate(dates):
            w.writerow([d, *[repr(float(prices[i][j])) for i in range(len(tickers))]])


def synthetic_prices(n, t, seed=0):
    rng = np.random.default_rng(seed)
    return np.cumprod(1.0 + 0.01 * rng.standard_normal((n, t)), axis=1) * 100.0


def synthetic_price_csv(path, n, t, seed=0):
    prices = synthetic_prices(n, t, seed)
    tickers = [f"S{i:03d}" for i in range(n)]
    dates = [f"d{j:05d}" for j in range(t)]
    write_price_csv(path, tickers, dates, prices)
    return path


@pytest.fixture
def small_panel():
    prices = np.array(
        [
            [100.0, 110.0, 99.0, 105.0, 108.0],
            [50.0, 51.0, 52.0, 50.0, 49.0],
            [20.0, 22.0, 21.0, 23.0, 24.0],
        ]
    )
    return PricePanel(
        ("AAA", "BBB", "CCC"),
        ("d1", "d2", "d3", "d4", "d5"),
        prices,
    )


def return_panel(returns, prefix="d"):
    returns = np.asarray(returns, dtype=np.float64)
    n, t = returns.shape
    return ReturnPanel(
        tuple(f"S{i:03d}" for i in range(n)),
        tuple(f"{prefix}{j:05d}" for j in range(t)),
        returns,
    )
