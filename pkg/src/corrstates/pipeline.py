"""End-to-end orchestration: ingest -> correlate -> spectra -> moments -> cluster
-> transitions, with a checksum manifest.

Each stage reads the previous stage's serialized products, so the CLI can
re-run any stage independently and get the same bytes as a single-shot run.
"""

from __future__ import annotations

import glob
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import clustering, io, kernels, spectral, stats, timeseries
from .correlation import (
    FULL_HORIZON,
    Kind,
    correlation_matrix,
    correlation_matrix_from_returns,
    epoch_distance_matrix,
)
from .errors import CorrStatesError, NumericError, ValidationError

DEFAULT_KINDS = (Kind.PEARSON, Kind.DISTANCE)


@dataclass(frozen=True)
class RunConfig:
    input: str
    outdir: str
    sectors: str | None = None
    epoch_length: int = 40
    kinds: tuple[Kind, ...] = DEFAULT_KINDS
    n_states: int = 5
    zero_threshold: float = 1e-8
    bins: int = 50
    hist_range: tuple[float, float] = (-1.0, 1.0)
    seed: int = 0
    goe_trials: int = 10
    threads: int = 0  # 0 = auto

    def validate(self) -> "RunConfig":
        if self.epoch_length < 2:
            raise ValidationError(f"epoch length must be >= 2, got {self.epoch_length}")
        if self.n_states < 1:
            raise ValidationError(f"n_states must be >= 1, got {self.n_states}")
        if self.bins < 1:
            raise ValidationError(f"bins must be >= 1, got {self.bins}")
        if not self.hist_range[0] < self.hist_range[1]:
            raise ValidationError(f"invalid histogram range {self.hist_range}")
        if self.threads < 0:
            raise ValidationError("threads must be >= 0")
        return self

    def to_dict(self) -> dict:
        return {
            "input": self.input,
            "outdir": self.outdir,
            "sectors": self.sectors,
            "epoch_length": self.epoch_length,
            "kinds": [str(k) for k in self.kinds],
            "n_states": self.n_states,
            "zero_threshold": self.zero_threshold,
            "bins": self.bins,
            "hist_range": list(self.hist_range),
            "seed": self.seed,
            "goe_trials": self.goe_trials,
            "threads": self.threads,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "kinds" in d:
            d["kinds"] = tuple(Kind(k) for k in d["kinds"])
        if "hist_range" in d:
            d["hist_range"] = tuple(d["hist_range"])
        return cls(**d)


def load_config(path, **overrides) -> RunConfig:
    with open(path) as fh:
        d = json.load(fh)
    d.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(d).validate()


def _pool_size(config: RunConfig) -> int:
    return config.threads if config.threads > 0 else (os.cpu_count() or 1)


def _pmap(config: RunConfig, fn, items):
    """Order-preserving map; results are identical at any pool size."""
    workers = _pool_size(config)
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- products


def _matrix_dir(config, kind) -> str:
    return os.path.join(config.outdir, "matrices", str(kind))


def _epoch_base(config, kind, index) -> str:
    return os.path.join(_matrix_dir(config, kind), f"epoch_{index:04d}")


def _epoch_matrix_bases(config, kind) -> list[str]:
    paths = sorted(glob.glob(os.path.join(_matrix_dir(config, kind), "epoch_*.csv")))
    if not paths:
        raise ValidationError(
            f"no correlation matrices for kind {kind} in {config.outdir}; run `correlate` first"
        )
    return [p[:-4] for p in paths]


def _returns_path(config) -> str:
    return os.path.join(config.outdir, "returns.csv")


# ------------------------------------------------------------------ stages


def stage_ingest(config: RunConfig) -> list[str]:
    panel = timeseries.load_prices(config.input, config.sectors)
    returns = timeseries.compute_returns(panel)
    os.makedirs(config.outdir, exist_ok=True)
    path = _returns_path(config)
    io.write_returns_csv(path, returns)
    written = [path]
    if panel.sectors:
        spath = os.path.join(config.outdir, "sectors.json")
        with open(spath, "w") as fh:
            json.dump(panel.sectors, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(spath)
    return written


def stage_correlate(config: RunConfig) -> list[str]:
    returns = io.read_returns_csv(_returns_path(config))
    epochs = timeseries.slice_epochs(returns, config.epoch_length)
    written: list[str] = []
    for kind in config.kinds:
        os.makedirs(_matrix_dir(config, kind), exist_ok=True)
        matrices = _pmap(
            config, lambda e, k=kind: correlation_matrix(e, k, returns.tickers), epochs
        )
        for m in matrices:
            written += io.write_matrix(_epoch_base(config, kind, m.epoch_index), m)
        full = correlation_matrix_from_returns(
            returns.returns, kind, FULL_HORIZON, returns.tickers
        )
        written += io.write_matrix(os.path.join(_matrix_dir(config, kind), "full_horizon"), full)
        xi = epoch_distance_matrix(matrices)
        written += io.write_xi(os.path.join(config.outdir, f"fig7_xi_{kind}"), xi)
    return written


def stage_spectra(config: RunConfig) -> list[str]:
    written: list[str] = []
    for kind in config.kinds:
        bases = _epoch_matrix_bases(config, kind)
        spectra = _pmap(config, lambda b: spectral.eigendecompose(io.read_matrix(b)), bases)
        rows = []
        pr_rows = []
        summaries = []
        for sp in spectra:
            for lam, pr in zip(sp.eigenvalues, sp.participation_ratios):
                rows.append((sp.epoch_index, sp.kind, lam, pr))
                pr_rows.append((sp.epoch_index, sp.kind, pr))
            summaries.append(spectral.spectrum_summary(sp, config.zero_threshold))
        eig_path = os.path.join(config.outdir, f"fig3_eigs_{kind}.csv")
        io.write_spectra_csv(eig_path, rows)
        pr_path = os.path.join(config.outdir, f"fig4_pr_{kind}.csv")
        io.write_pr_csv(pr_path, pr_rows)
        sum_path = os.path.join(config.outdir, f"spectra_summary_{kind}.csv")
        io.write_summary_csv(sum_path, summaries)
        written += [eig_path, pr_path, sum_path]
    return written


def stage_baseline_goe(config: RunConfig) -> list[str]:
    returns = io.read_returns_csv(_returns_path(config))
    n = returns.n_stocks
    value = spectral.goe_pr_baseline(n, config.goe_trials, config.seed)
    path = os.path.join(config.outdir, "baseline_goe.json")
    with open(path, "w") as fh:
        json.dump(
            {
                "dim": n,
                "trials": config.goe_trials,
                "seed": config.seed,
                "mean_pr": value,
                "n_over_3": n / 3.0,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return [path]


def stage_moments(config: RunConfig) -> list[str]:
    written: list[str] = []
    lo, hi = config.hist_range
    for kind in config.kinds:
        bases = _epoch_matrix_bases(config, kind)
        matrices = [io.read_matrix(b) for b in bases]
        summary = io.read_summary_csv(
            os.path.join(config.outdir, f"spectra_summary_{kind}.csv")
        )
        moment_rows = []
        hist_entries = []
        for m in matrices:
            mom = stats.matrix_moments(m)
            e_max, pr_emax = summary[int(m.epoch_index)]
            moment_rows.append((mom, e_max, pr_emax))
            hist_entries.append((m.epoch_index, kind, stats.histogram(m, config.bins, lo, hi)))
        mom_path = os.path.join(config.outdir, f"fig6_moments_{kind}.csv")
        io.write_moments_csv(mom_path, moment_rows)
        hist_path = os.path.join(config.outdir, f"fig2_hist_{kind}.csv")
        io.write_hist_csv(hist_path, hist_entries)
        written += [mom_path, hist_path]
    return written


def stage_cluster(config: RunConfig) -> list[str]:
    returns = io.read_returns_csv(_returns_path(config))
    epochs = timeseries.slice_epochs(returns, config.epoch_length)
    epoch_keys = [timeseries.epoch_date_range(returns, e) for e in epochs]
    written: list[str] = []
    for kind in config.kinds:
        xi = io.read_xi(os.path.join(config.outdir, f"fig7_xi_{kind}"))
        dendrogram = clustering.ward_linkage(xi)
        dend_path = os.path.join(config.outdir, f"fig8_dendrogram_{kind}.csv")
        io.write_dendrogram_csv(dend_path, dendrogram)
        written.append(dend_path)

        labels = clustering.cut(dendrogram, config.n_states)
        matrices = [io.read_matrix(b) for b in _epoch_matrix_bases(config, kind)]
        model = clustering.build_market_states(labels, matrices)
        states_path = os.path.join(config.outdir, f"fig9_states_{kind}.json")
        io.write_states_json(states_path, model, epoch_keys)
        written.append(states_path)
        state_dir = os.path.join(config.outdir, "states", str(kind))
        os.makedirs(state_dir, exist_ok=True)
        for s, sm in enumerate(model.state_matrices, start=1):
            written += io.write_matrix(os.path.join(state_dir, f"state_{s}"), sm)
    return written


def stage_transitions(config: RunConfig) -> list[str]:
    written = []
    for kind in config.kinds:
        labels = io.read_labels_json(
            os.path.join(config.outdir, f"fig9_states_{kind}.json")
        )
        tm = clustering.transitions(labels, config.n_states)
        path = os.path.join(config.outdir, f"fig10_transitions_{kind}.csv")
        io.write_transitions_csv(path, tm)
        written.append(path)
    return written


STAGES = (
    ("ingest", stage_ingest),
    ("correlate", stage_correlate),
    ("spectra", stage_spectra),
    ("baseline-goe", stage_baseline_goe),
    ("moments", stage_moments),
    ("cluster", stage_cluster),
    ("transitions", stage_transitions),
)


def run_pipeline(config: RunConfig) -> dict:
    """Run all stages, then write manifest.json with config echo, input hash,
    product checksums and per-stage timings. Returns the manifest dict.

    A failing stage removes its partial products and aborts with the stage
    name attached to the error.
    """
    config.validate()
    os.makedirs(config.outdir, exist_ok=True)
    products: list[str] = []
    timings: dict[str, float] = {}
    for name, fn in STAGES:
        t0 = time.perf_counter()
        try:
            written = fn(config)
        except Exception as exc:
            _clean_stage_products(config, products)
            if isinstance(exc, CorrStatesError):
                raise type(exc)(f"stage {name!r} failed: {exc}") from exc
            raise NumericError(f"stage {name!r} failed: {exc}") from exc
        timings[name] = time.perf_counter() - t0
        products += written

    manifest = {
        "status": "ok",
        "config": config.to_dict(),
        "kernel_backend": kernels.BACKEND,
        "input_sha256": io.sha256_file(config.input),
        "products": {
            rel: io.sha256_file(os.path.join(config.outdir, rel))
            for rel in sorted(io.relpaths(products, config.outdir))
        },
        "timings_seconds": timings,
    }
    with open(os.path.join(config.outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _clean_stage_products(config: RunConfig, known: list[str]) -> None:
    """Remove files not attributable to completed stages."""
    keep = set(os.path.abspath(p) for p in known)
    for path in glob.glob(os.path.join(config.outdir, "**"), recursive=True):
        if os.path.isfile(path) and os.path.abspath(path) not in keep:
            if os.path.basename(path) == "manifest.json":
                continue
            os.remove(path)
