"""Command-line interface. Exit codes: 0 success, 1 validation error, 2 runtime."""

from __future__ import annotations

import json
import sys

import click

from . import pipeline, spectral
from .errors import CorrStatesError, ValidationError
from .pipeline import RunConfig


def _config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="JSON config file; flags override its fields."),
        click.option("--input", "input_", type=click.Path(), default=None,
                     help="Wide price CSV (date column + one column per ticker)."),
        click.option("--sectors", type=click.Path(), default=None,
                     help="Optional ticker,sector sidecar CSV."),
        click.option("--outdir", type=click.Path(), default=None,
                     help="Directory for all products."),
        click.option("--epoch-length", type=int, default=None, help="Days per epoch (default 40)."),
        click.option("--kinds", type=str, default=None,
                     help="Comma list of correlation kinds (default pearson,distance)."),
        click.option("--n-states", type=int, default=None, help="Market states to cut (default 5)."),
        click.option("--zero-threshold", type=float, default=None,
                     help="Eigenvalue zero threshold (default 1e-8)."),
        click.option("--bins", type=int, default=None, help="Histogram bins (default 50)."),
        click.option("--hist-range", type=str, default=None,
                     help="Histogram range as lo,hi (default -1,1)."),
        click.option("--seed", type=int, default=None, help="Seed for the GOE baseline."),
        click.option("--goe-trials", type=int, default=None, help="GOE matrices to sample."),
        click.option("--threads", type=int, default=None, help="Worker threads (0 = auto)."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(config_path, input_, sectors, outdir, epoch_length, kinds, n_states,
                  zero_threshold, bins, hist_range, seed, goe_trials, threads) -> RunConfig:
    overrides = {
        "input": input_,
        "sectors": sectors,
        "outdir": outdir,
        "epoch_length": epoch_length,
        "kinds": kinds.split(",") if kinds else None,
        "n_states": n_states,
        "zero_threshold": zero_threshold,
        "bins": bins,
        "hist_range": [float(x) for x in hist_range.split(",")] if hist_range else None,
        "seed": seed,
        "goe_trials": goe_trials,
        "threads": threads,
    }
    if config_path:
        return pipeline.load_config(config_path, **overrides)
    present = {k: v for k, v in overrides.items() if v is not None}
    if "input" not in present or "outdir" not in present:
        raise ValidationError("--input and --outdir are required (or supply --config)")
    return RunConfig.from_dict(present).validate()


@click.group()
def cli():
    """Epoch-wise Pearson/distance correlation analysis and market-state clustering."""


def _stage_command(name, fn, doc):
    @cli.command(name, help=doc)
    @_config_options
    def command(**kw):
        config = _build_config(**kw)
        written = fn(config)
        for path in written:
            click.echo(path)

    return command


_stage_command("ingest", pipeline.stage_ingest,
               "Load the price panel, compute returns, write returns.csv.")
_stage_command("correlate", pipeline.stage_correlate,
               "Per-epoch correlation matrices and the inter-epoch distance matrix.")
_stage_command("spectra", pipeline.stage_spectra,
               "Eigenvalues and participation ratios for every epoch matrix.")
_stage_command("moments", pipeline.stage_moments,
               "Element-distribution moments and histograms per epoch.")
_stage_command("cluster", pipeline.stage_cluster,
               "Ward dendrogram, market-state cut, per-state average matrices.")
_stage_command("transitions", pipeline.stage_transitions,
               "Transition counts between consecutive-epoch market states.")


@cli.command("run", help="Run the full pipeline and write manifest.json.")
@_config_options
def run(**kw):
    config = _build_config(**kw)
    manifest = pipeline.run_pipeline(config)
    click.echo(json.dumps({"status": manifest["status"],
                           "products": len(manifest["products"]),
                           "outdir": config.outdir}))


@cli.command("baseline-goe", help="Mean eigenvector participation ratio of sampled GOE matrices.")
@click.option("--dim", type=int, required=True, help="Matrix dimension N.")
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def baseline_goe(dim, trials, seed):
    value = spectral.goe_pr_baseline(dim, trials, seed)
    click.echo(json.dumps({"dim": dim, "trials": trials, "seed": seed,
                           "mean_pr": value, "n_over_3": dim / 3.0}))


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except CorrStatesError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (OSError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
