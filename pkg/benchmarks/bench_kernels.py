"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each workload twice in subprocesses -- once with the compiled extension,
once with CORRSTATES_FORCE_PYTHON=1 -- and prints a comparison table.

Usage: python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np


def bench(fn, min_time=0.2, min_reps=3):
    """Best-of-repetitions wall time in seconds."""
    fn()  # warm up
    times = []
    start = time.perf_counter()
    while len(times) < min_reps or time.perf_counter() - start < min_time:
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def run_benchmarks():
    from corrstates import Kind, kernels
    from corrstates.correlation import correlation_matrix_from_returns

    rng = np.random.default_rng(0)
    results = {"backend": kernels.BACKEND}

    # per-epoch all-pairs distance-correlation matrix (dense centering path)
    r_epoch = rng.standard_normal((370, 40))
    results["allpairs_dcc_n370_L40"] = bench(
        lambda: correlation_matrix_from_returns(r_epoch, Kind.DISTANCE, 1)
    )

    # single long-window distance covariance (pairwise O(L log L) path)
    x = rng.standard_normal(5551)
    y = rng.standard_normal(5551)
    results["dcov_pair_L5551"] = bench(lambda: kernels.dcov_sq_fast(x, y))

    # double-centered distance matrix of one series
    z = rng.standard_normal(2000)
    results["centered_matrix_L2000"] = bench(
        lambda: kernels.centered_distance_matrix(z)
    )

    return results


def main():
    if os.environ.get("CORRSTATES_BENCH_CHILD"):
        print(json.dumps(run_benchmarks()))
        return

    rows = {}
    for force in ("", "1"):
        env = dict(os.environ, CORRSTATES_BENCH_CHILD="1")
        if force:
            env["CORRSTATES_FORCE_PYTHON"] = force
        else:
            env.pop("CORRSTATES_FORCE_PYTHON", None)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        data = json.loads(out.stdout)
        rows[data.pop("backend")] = data

    if "cython" not in rows:
        print("warning: compiled extension unavailable; showing python backend only")

    names = sorted(next(iter(rows.values())))
    print(f"{'workload':<28} " + " ".join(f"{b + ' (s)':>14}" for b in rows) + "  speedup")
    for name in names:
        line = f"{name:<28} " + " ".join(f"{rows[b][name]:>14.6f}" for b in rows)
        if len(rows) == 2:
            line += f"  {rows['python'][name] / rows['cython'][name]:>6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
