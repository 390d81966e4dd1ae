"""Product serialization: matrix files with JSON headers, figure-ready CSV tables."""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .clustering import Dendrogram, MergeRecord, TransitionMatrix
from .correlation import CorrelationMatrix, EpochDistanceMatrix, Kind
from .errors import ValidationError
from .timeseries import ReturnPanel


def fmtf(x: float) -> str:
    """Round-trip float formatting; keeps products byte-stable."""
    return f"{float(x):.17g}"


def _write_float_matrix(path, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in values:
            w.writerow([fmtf(v) for v in row])


def _read_float_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(c) for c in row] for row in csv.reader(fh)])


def write_matrix(base_path, matrix: CorrelationMatrix) -> list[str]:
    """Write `<base>.csv` (values) plus `<base>.json` (kind, epoch, tickers)."""
    csv_path = f"{base_path}.csv"
    meta_path = f"{base_path}.json"
    _write_float_matrix(csv_path, matrix.values)
    meta = {
        "kind": str(matrix.kind),
        "epoch_index": matrix.epoch_index,
        "tickers": list(matrix.tickers) if matrix.tickers else None,
        "norm_convention": "strict-upper-triangle",
        "degenerate": list(matrix.degenerate),
        "clamp_count": matrix.clamp_count,
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, meta_path]


def read_matrix(base_path) -> CorrelationMatrix:
    with open(f"{base_path}.json") as fh:
        meta = json.load(fh)
    values = _read_float_matrix(f"{base_path}.csv")
    return CorrelationMatrix(
        kind=Kind(meta["kind"]),
        epoch_index=meta["epoch_index"],
        values=values,
        tickers=tuple(meta["tickers"]) if meta.get("tickers") else None,
        degenerate=tuple(meta.get("degenerate", ())),
        clamp_count=meta.get("clamp_count", 0),
    )


def write_xi(base_path, xi: EpochDistanceMatrix) -> list[str]:
    csv_path = f"{base_path}.csv"
    meta_path = f"{base_path}.json"
    _write_float_matrix(csv_path, xi.values)
    with open(meta_path, "w") as fh:
        json.dump(
            {"kind": str(xi.kind), "norm_convention": xi.norm_convention},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    return [csv_path, meta_path]


def read_xi(base_path) -> EpochDistanceMatrix:
    with open(f"{base_path}.json") as fh:
        meta = json.load(fh)
    return EpochDistanceMatrix(
        values=_read_float_matrix(f"{base_path}.csv"),
        kind=Kind(meta["kind"]),
        norm_convention=meta["norm_convention"],
    )


def write_returns_csv(path, panel: ReturnPanel) -> None:
    """Wide CSV, same shape as the price input: date column plus one per ticker."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", *panel.tickers])
        for t, date in enumerate(panel.dates):
            w.writerow([date, *(fmtf(v) for v in panel.returns[:, t])])


def read_returns_csv(path) -> ReturnPanel:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise ValidationError(f"{path}: not a wide returns CSV")
        tickers = tuple(c.strip() for c in header[1:])
        dates = []
        rows = []
        for row in reader:
            if not row:
                continue
            dates.append(row[0].strip())
            rows.append([float(c) for c in row[1:]])
    return ReturnPanel(tickers, tuple(dates), np.array(rows, dtype=np.float64).T)


def write_spectra_csv(path, rows) -> None:
    """One row per eigenvalue: epoch, kind, eigenvalue, participation ratio."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "kind", "eigenvalue", "participation_ratio"])
        for epoch, kind, lam, pr in rows:
            w.writerow([epoch, str(kind), fmtf(lam), fmtf(pr)])


def write_pr_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "kind", "participation_ratio"])
        for epoch, kind, pr in rows:
            w.writerow([epoch, str(kind), fmtf(pr)])


def write_summary_csv(path, summaries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "kind", "e_max", "pr_emax", "zero_count", "mean_pr"])
        for s in summaries:
            w.writerow(
                [s.epoch_index, str(s.kind), fmtf(s.e_max), fmtf(s.pr_emax), s.zero_count, fmtf(s.mean_pr)]
            )


def read_summary_csv(path) -> dict:
    """Map epoch -> (e_max, pr_emax) for joining into the moments table."""
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out[int(row["epoch"])] = (float(row["e_max"]), float(row["pr_emax"]))
    return out


def write_moments_csv(path, rows) -> None:
    """Joined moments + spectral scalars: the six scatter panels in one table."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "kind", "mu", "sigma", "gamma1", "gamma2", "e_max", "pr_emax"])
        for m, e_max, pr_emax in rows:
            w.writerow(
                [
                    m.epoch_index,
                    str(m.kind),
                    fmtf(m.mu),
                    fmtf(m.sigma),
                    fmtf(m.gamma1),
                    fmtf(m.gamma2),
                    fmtf(e_max),
                    fmtf(pr_emax),
                ]
            )


def write_hist_csv(path, entries) -> None:
    """Per-epoch histograms; bin_index -1 / n_bins are under/overflow rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["epoch", "kind", "bin_index", "lo", "hi", "count"])
        for epoch, kind, hist in entries:
            w.writerow([epoch, str(kind), -1, "-inf", fmtf(hist.edges[0]), hist.underflow])
            for b, count in enumerate(hist.counts):
                w.writerow(
                    [epoch, str(kind), b, fmtf(hist.edges[b]), fmtf(hist.edges[b + 1]), int(count)]
                )
            w.writerow(
                [epoch, str(kind), len(hist.counts), fmtf(hist.edges[-1]), "+inf", hist.overflow]
            )


def write_dendrogram_csv(path, dendrogram: Dendrogram) -> None:
    """Merge table (left, right, height, size), consumable by dendrogram plotters.

    Heights are sqrt of the Ward squared distance.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["left", "right", "height", "size"])
        for m in dendrogram.merges:
            w.writerow([m.left, m.right, fmtf(m.height), m.size])


def read_dendrogram_csv(path) -> Dendrogram:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        merges = tuple(
            MergeRecord(int(r["left"]), int(r["right"]), float(r["height"]), int(r["size"]))
            for r in reader
        )
    return Dendrogram(n_leaves=len(merges) + 1, merges=merges)


def write_states_json(path, model, epoch_keys) -> None:
    """Market-state report: per-epoch labels keyed by date range, means, sizes."""
    doc = {
        "n_states": model.n_states,
        "state_means": [float(x) for x in model.state_means],
        "state_sizes": [int(x) for x in model.state_sizes],
        "labels": [
            {"epoch": i + 1, "dates": key, "state": int(lab)}
            for i, (key, lab) in enumerate(zip(epoch_keys, model.labels))
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_labels_json(path) -> np.ndarray:
    with open(path) as fh:
        doc = json.load(fh)
    entries = sorted(doc["labels"], key=lambda e: e["epoch"])
    return np.array([e["state"] for e in entries], dtype=np.int64)


def write_transitions_csv(path, tm: TransitionMatrix) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["from_state", "to_state", "count"])
        n = tm.n_states
        for a in range(n):
            for b in range(n):
                w.writerow([a + 1, b + 1, int(tm.counts[a, b])])


def read_transitions_csv(path) -> TransitionMatrix:
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append((int(r["from_state"]), int(r["to_state"]), int(r["count"])))
    n = max(max(a, b) for a, b, _ in rows)
    counts = np.zeros((n, n), dtype=np.int64)
    for a, b, c in rows:
        counts[a - 1, b - 1] = c
    return TransitionMatrix(counts)


def sha256_file(path) -> str:
    import hashlib

    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def relpaths(paths, root) -> list[str]:
    return [os.path.relpath(p, root) for p in paths]
