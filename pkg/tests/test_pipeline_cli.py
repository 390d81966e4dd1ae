import json
import os
import shutil

import numpy as np
import pytest

from corrstates import Kind, RunConfig, run_pipeline, ValidationError
from corrstates import io as cio
from corrstates.cli import main as cli_main
from corrstates.pipeline import (
    stage_cluster,
    stage_correlate,
    stage_ingest,
    stage_moments,
    stage_spectra,
    stage_transitions,
)

from conftest import synthetic_price_csv


def outdir_checksums(outdir):
    sums = {}
    for root, _, files in os.walk(outdir):
        for name in files:
            if name == "manifest.json":
                continue
            path = os.path.join(root, name)
            sums[os.path.relpath(path, outdir)] = cio.sha256_file(path)
    return sums


@pytest.fixture(scope="module")
def panel_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "prices.csv"
    return synthetic_price_csv(path, n=5, t=130, seed=42)


class TestRunPipeline:
    def test_product_inventory(self, panel_csv, tmp_path):
        config = RunConfig(
            input=str(panel_csv), outdir=str(tmp_path / "out"), n_states=2, threads=1
        )
        manifest = run_pipeline(config)
        assert manifest["status"] == "ok"
        products = manifest["products"]
        # 3 epochs x 2 kinds, matrix csv+json each
        for kind in ("pearson", "distance"):
            for e in (1, 2, 3):
                assert f"matrices/{kind}/epoch_{e:04d}.csv" in products
            assert f"matrices/{kind}/full_horizon.csv" in products
            for fig in (
                f"fig2_hist_{kind}.csv",
                f"fig3_eigs_{kind}.csv",
                f"fig4_pr_{kind}.csv",
                f"fig6_moments_{kind}.csv",
                f"fig7_xi_{kind}.csv",
                f"fig8_dendrogram_{kind}.csv",
                f"fig9_states_{kind}.json",
                f"fig10_transitions_{kind}.csv",
            ):
                assert fig in products
            assert f"states/{kind}/state_1.csv" in products
        assert "baseline_goe.json" in products
        assert "returns.csv" in products
        assert manifest["input_sha256"] == cio.sha256_file(panel_csv)

    def test_rerun_is_byte_identical(self, panel_csv, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            run_pipeline(
                RunConfig(input=str(panel_csv), outdir=str(out), n_states=2, threads=1)
            )
        assert outdir_checksums(a) == outdir_checksums(b)

    def test_stage_isolation(self, panel_csv, tmp_path):
        out = tmp_path / "out"
        config = RunConfig(input=str(panel_csv), outdir=str(out), n_states=2, threads=1)
        run_pipeline(config)
        before = outdir_checksums(out)

        # re-run every downstream stage from the serialized upstream products
        stage_correlate(config)
        stage_spectra(config)
        stage_moments(config)
        stage_cluster(config)
        stage_transitions(config)
        assert outdir_checksums(out) == before

    def test_failing_stage_cleans_partial_products(self, panel_csv, tmp_path):
        out = tmp_path / "out"
        config = RunConfig(
            input=str(panel_csv), outdir=str(out), n_states=50, threads=1
        )  # more states than epochs: cluster stage fails
        with pytest.raises(ValidationError, match="cluster"):
            run_pipeline(config)
        leftovers = outdir_checksums(out)
        assert not any(p.startswith("states/") for p in leftovers)
        assert not any("fig8" in p or "fig9" in p for p in leftovers)
        assert "returns.csv" in leftovers  # upstream products survive

    def test_config_validation(self, panel_csv, tmp_path):
        with pytest.raises(ValidationError):
            RunConfig(input=str(panel_csv), outdir=str(tmp_path), epoch_length=1).validate()
        with pytest.raises(ValidationError):
            RunConfig(input=str(panel_csv), outdir=str(tmp_path), bins=0).validate()
        with pytest.raises(ValidationError):
            RunConfig(input=str(panel_csv), outdir=str(tmp_path), n_states=0).validate()


class TestSerialization:
    def test_matrix_roundtrip(self, tmp_path):
        from corrstates import CorrelationMatrix

        rng = np.random.default_rng(0)
        a = rng.uniform(-1, 1, (6, 6))
        v = (a + a.T) / 2
        np.fill_diagonal(v, 1.0)
        m = CorrelationMatrix(Kind.DISTANCE, 7, v, tickers=tuple("ABCDEF"), clamp_count=2)
        cio.write_matrix(tmp_path / "m", m)
        back = cio.read_matrix(tmp_path / "m")
        assert np.array_equal(back.values, m.values)
        assert back.kind == m.kind
        assert back.epoch_index == 7
        assert back.tickers == m.tickers
        assert back.clamp_count == 2

    def test_returns_roundtrip(self, tmp_path):
        from conftest import return_panel

        rng = np.random.default_rng(1)
        panel = return_panel(rng.standard_normal((4, 11)))
        cio.write_returns_csv(tmp_path / "r.csv", panel)
        back = cio.read_returns_csv(tmp_path / "r.csv")
        assert back.tickers == panel.tickers
        assert back.dates == panel.dates
        assert np.array_equal(back.returns, panel.returns)

    def test_dendrogram_roundtrip(self, tmp_path):
        from corrstates import ward_linkage
        from test_clustering import dist_matrix

        rng = np.random.default_rng(2)
        dend = ward_linkage(dist_matrix(rng.standard_normal((6, 2))))
        cio.write_dendrogram_csv(tmp_path / "d.csv", dend)
        back = cio.read_dendrogram_csv(tmp_path / "d.csv")
        assert back.n_leaves == dend.n_leaves
        assert back.merges == dend.merges


class TestCli:
    def run_cli(self, *args):
        with pytest.raises(SystemExit) as exc:
            cli_main(list(args))
        return exc.value.code

    def test_full_run_and_staged_rerun(self, panel_csv, tmp_path):
        out = tmp_path / "out"
        code = self.run_cli(
            "run", "--input", str(panel_csv), "--outdir", str(out),
            "--n-states", "2", "--threads", "1",
        )
        assert code == 0
        assert (out / "manifest.json").exists()
        before = outdir_checksums(out)
        for sub in ("correlate", "spectra", "moments", "cluster", "transitions"):
            assert self.run_cli(
                sub, "--input", str(panel_csv), "--outdir", str(out),
                "--n-states", "2", "--threads", "1",
            ) == 0
        assert outdir_checksums(out) == before

    def test_config_file_with_flag_override(self, panel_csv, tmp_path):
        cfg = {
            "input": str(panel_csv),
            "outdir": str(tmp_path / "o1"),
            "n_states": 2,
            "threads": 1,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert self.run_cli("run", "--config", str(cfg_path)) == 0
        # flag overrides the config file's outdir
        assert self.run_cli("run", "--config", str(cfg_path), "--outdir", str(tmp_path / "o2")) == 0
        assert (tmp_path / "o2" / "manifest.json").exists()

    def test_baseline_goe_command(self, capsys):
        assert self.run_cli("baseline-goe", "--dim", "30", "--trials", "2", "--seed", "5") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["dim"] == 30
        assert 1.0 <= doc["mean_pr"] <= 30.0

    def test_validation_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("date,A,B\nd1,1.0,\nd2,1.0,2.0\nd3,1.0,2.0\n")
        code = self.run_cli("ingest", "--input", str(bad), "--outdir", str(tmp_path / "o"))
        assert code == 1

    def test_missing_required_flags_exit_code(self):
        assert self.run_cli("run") == 1

    def test_runtime_error_exit_code(self, tmp_path):
        code = self.run_cli(
            "ingest", "--input", str(tmp_path / "nonexistent.csv"),
            "--outdir", str(tmp_path / "o"),
        )
        assert code == 2
