"""Acceptance suite: one test per gate, each printing a PASS line.

Run with `pytest -s tests/test_acceptance.py` to see the per-gate report.
The full-data reproduction checks need a real S&P panel; point
CORRSTATES_SP500_CSV at a wide price CSV to enable them.
"""

import os
import time

import numpy as np
import pytest
from scipy import integrate

from corrstates import (
    Kind,
    RunConfig,
    correlation_matrix_from_returns,
    distance_correlation,
    distance_covariance_sq,
    eigendecompose,
    goe_pr_baseline,
    participation_ratio,
    pearson,
    run_pipeline,
    transitions,
    ward_linkage,
)
from corrstates.correlation import FULL_HORIZON

from conftest import synthetic_price_csv
from test_clustering import brute_force_ward, dist_matrix
from test_correlation import triple_sum_dcov_sq
from test_pipeline_cli import outdir_checksums


def report(name):
    print(f"\nACCEPTANCE PASS: {name}")


def test_estimator_oracle():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for _ in range(1000):
        length = int(rng.integers(2, 13))
        x = rng.standard_normal(length) * rng.uniform(0.1, 10)
        y = rng.standard_normal(length) * rng.uniform(0.1, 10)
        v = distance_covariance_sq(x, y)
        expected = triple_sum_dcov_sq(x, y)
        assert v == pytest.approx(expected, rel=1e-10, abs=1e-13)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    report(f"estimator oracle (1000 pairs, rel 1e-10, {elapsed:.2f}s)")


def test_nonlinearity_detection():
    # Thresholds calibrated by Monte Carlo: for x ~ U[-1,1], y = x^2 at
    # L = 500 the sample Pearson coefficient has sd ~ 0.056, so the linear
    # gate sits at ~3 sigma (0.16); the distance gate 0.3 is far below the
    # observed minimum (~0.47).
    passes = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-1.0, 1.0, 500)
        y = x**2
        if abs(pearson(x, y)) < 0.16 and distance_correlation(x, y) > 0.3:
            passes += 1
    assert passes >= 99
    report(f"nonlinearity detection ({passes}/100 trials)")


def _abs_product_moment(corr):
    """E|UV| for centered unit-variance bivariate normal, by quadrature."""
    if corr == 1.0:
        return 1.0  # E|U*U| = E[U^2]
    cov = np.array([[1.0, corr], [corr, 1.0]])
    det = np.linalg.det(cov)
    inv = np.linalg.inv(cov)

    def integrand(v, u):
        q = inv[0, 0] * u * u + 2 * inv[0, 1] * u * v + inv[1, 1] * v * v
        return abs(u * v) * np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(det))

    value, _ = integrate.dblquad(integrand, -8, 8, -8, 8, epsabs=1e-10)
    return value


def _bvn_dcor_oracle(rho):
    """Distance correlation of a standard bivariate normal, assembled from the
    triple-expectation definition with each expectation done by quadrature."""
    # X - X' has variance 2; rescale to unit variance and carry the factor 2
    e_abs_u = np.sqrt(2.0) * np.sqrt(2.0 / np.pi)
    t = {c: 2.0 * _abs_product_moment(c) for c in (rho, rho / 2.0, 1.0, 0.5)}
    dcov_sq = t[rho] + e_abs_u**2 - 2.0 * t[rho / 2.0]
    dvar = t[1.0] + e_abs_u**2 - 2.0 * t[0.5]
    return float(np.sqrt(dcov_sq / dvar))


def test_bivariate_normal_oracle():
    for rho in (0.25, 0.5, 0.9):
        oracle = _bvn_dcor_oracle(rho)
        measured = []
        streams = np.random.SeedSequence([0, int(rho * 100)]).spawn(3)
        for stream in streams:
            rng = np.random.default_rng(stream)
            z = rng.multivariate_normal([0.0, 0.0], [[1.0, rho], [rho, 1.0]], size=5000)
            measured.append(distance_correlation(z[:, 0], z[:, 1]))
        assert float(np.mean(measured)) == pytest.approx(oracle, abs=0.02)
    report("bivariate-normal oracle (rho 0.25/0.5/0.9, +-0.02)")


def test_participation_ratio_identities():
    n = 370
    basis = np.zeros(n)
    basis[17] = 1.0
    assert participation_ratio(basis) == 1.0
    uniform = np.full(n, 1.0 / np.sqrt(n))
    assert participation_ratio(uniform) == pytest.approx(n, rel=1e-12)
    report("participation-ratio identities (basis -> 1, uniform -> N)")


def test_goe_baseline():
    t0 = time.perf_counter()
    value = goe_pr_baseline(370, trials=10, seed=0)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    assert value == pytest.approx(370.0 / 3.0, rel=0.05)
    report(f"GOE baseline (mean PR {value:.1f} vs 123.33, {elapsed:.1f}s)")


def test_rank_bound_and_trace():
    rng = np.random.default_rng(7)
    returns = rng.standard_normal((370, 40))
    m = correlation_matrix_from_returns(returns, Kind.PEARSON, 1)
    sp = eigendecompose(m)
    zeros = int(np.count_nonzero(sp.eigenvalues < 1e-8))
    assert zeros >= 331
    assert float(sp.eigenvalues.sum()) == pytest.approx(370.0, rel=1e-10)
    report(f"rank bound ({zeros} zero eigenvalues >= 331) and trace identity")


def test_ward_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    for case in range(200):
        k = int(rng.integers(2, 8))
        dim = int(rng.integers(1, 4))
        points = rng.standard_normal((k, dim))
        if case % 4 == 0 and k >= 3:
            points[1] = points[0]  # exact ties
        if case % 7 == 0 and k >= 4:
            points[3] = points[2]
        dend = ward_linkage(dist_matrix(points))
        expected = brute_force_ward(points)
        got = [(m.left, m.right, m.size) for m in dend.merges]
        want = [(a, b, s) for a, b, _, s in expected]
        assert got == want
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    report(f"Ward oracle (200 instances K<=7, exact, {elapsed:.2f}s)")


def test_transition_conservation():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        k = int(rng.integers(2, 60))
        n = int(rng.integers(1, 8))
        labels = rng.integers(1, n + 1, size=k)
        tm = transitions(labels, n_states=n)
        assert int(tm.counts.sum()) == k - 1
        for state in range(1, n + 1):
            assert int(tm.counts[state - 1].sum()) == int(
                np.count_nonzero(labels[:-1] == state)
            )
    report("transition conservation (1000 label sequences, exact)")


def test_pipeline_determinism_across_thread_counts(tmp_path):
    csv_path = synthetic_price_csv(tmp_path / "panel.csv", n=20, t=400, seed=5)
    sums = []
    for threads in (1, 4, 0):  # 0 = all available cores
        out = tmp_path / f"out_t{threads}"
        run_pipeline(
            RunConfig(input=str(csv_path), outdir=str(out), n_states=3, threads=threads)
        )
        sums.append(outdir_checksums(out))
    assert sums[0] == sums[1] == sums[2]
    report("determinism across thread counts {1, 4, max} (byte-identical products)")


def test_performance_allpairs_dcc():
    rng = np.random.default_rng(17)
    returns = rng.standard_normal((370, 40))
    correlation_matrix_from_returns(returns, Kind.DISTANCE, 1)  # warm-up
    t0 = time.perf_counter()
    correlation_matrix_from_returns(returns, Kind.DISTANCE, 1)
    elapsed = time.perf_counter() - t0
    assert elapsed < 2.0
    report(f"all-pairs DCC N=370 L=40 in {elapsed:.3f}s (< 2s)")


def test_performance_full_pipeline(tmp_path):
    csv_path = synthetic_price_csv(tmp_path / "big.csv", n=370, t=5552, seed=23)
    t0 = time.perf_counter()
    manifest = run_pipeline(
        RunConfig(input=str(csv_path), outdir=str(tmp_path / "out"), threads=0)
    )
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    timings = manifest["timings_seconds"]
    assert sum(timings.values()) < 600.0
    # 138 epochs per kind came out of the slicer
    assert "matrices/pearson/epoch_0138.csv" in manifest["products"]
    assert "matrices/pearson/epoch_0139.csv" not in manifest["products"]
    report(f"full 138-epoch both-kinds pipeline in {elapsed:.0f}s (< 600s)")


@pytest.mark.skipif(
    not os.environ.get("CORRSTATES_SP500_CSV"),
    reason="full-data reproduction needs a real S&P panel (CORRSTATES_SP500_CSV)",
)
def test_full_data_reproduction(tmp_path):
    """Reported, not gating: market-data drift makes exact equality unattainable."""
    from corrstates import compute_returns, load_prices, slice_epochs

    panel = load_prices(os.environ["CORRSTATES_SP500_CSV"])
    returns = compute_returns(panel)
    epochs = slice_epochs(returns, 40)
    print(f"\nfull-data: {panel.n_stocks} stocks, {returns.n_days} returns, {len(epochs)} epochs")
    full_pcc = correlation_matrix_from_returns(returns.returns, Kind.PEARSON, FULL_HORIZON)
    full_dcc = correlation_matrix_from_returns(returns.returns, Kind.DISTANCE, FULL_HORIZON)
    mean_pcc = float(full_pcc.offdiag().mean())
    mean_dcc = float(full_dcc.offdiag().mean())
    print(f"full-data: mean PCC {mean_pcc:.3f} (reference 0.347 +- 0.05)")
    print(f"full-data: mean DCC {mean_dcc:.3f} (reference 0.34 +- 0.05)")
    assert mean_pcc == pytest.approx(0.347, abs=0.05)
    assert mean_dcc == pytest.approx(0.34, abs=0.05)
    report("full-data reproduction (reported)")
