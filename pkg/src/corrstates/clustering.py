"""Ward agglomerative clustering of epochs into market states and their dynamics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationMatrix, EpochDistanceMatrix
from .errors import ValidationError


@dataclass(frozen=True)
class MergeRecord:
    left: int  # node id, < right
    right: int
    height: float  # sqrt of the Ward squared distance at the merge
    size: int  # merged cluster size


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree; leaves are epochs 1..K, merge m creates node K+m."""

    n_leaves: int
    merges: tuple[MergeRecord, ...]


@dataclass(frozen=True)
class MarketStateModel:
    """States relabeled so mean off-diagonal correlation ascends with state id."""

    n_states: int
    labels: np.ndarray  # epoch order, values 1..n_states
    state_means: np.ndarray
    state_matrices: tuple[CorrelationMatrix, ...]
    state_sizes: np.ndarray


@dataclass(frozen=True)
class TransitionMatrix:
    counts: np.ndarray  # (n, n) ints; [a-1][b-1] = #steps from state a to b

    @property
    def n_states(self) -> int:
        return self.counts.shape[0]


def _validate_distance_matrix(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValidationError("distance matrix must be square")
    if not np.array_equal(v, v.T):
        raise ValidationError("distance matrix must be symmetric")
    if np.any(np.diag(v) != 0.0):
        raise ValidationError("distance matrix must have a zero diagonal")
    if np.any(v < 0.0):
        raise ValidationError("distance matrix entries must be non-negative")
    return v


def ward_linkage(xi: EpochDistanceMatrix | np.ndarray) -> Dendrogram:
    """Ward linkage via the Lance-Williams recurrence on squared distances.

    Ties between candidate pairs break toward the lexicographically smallest
    (node id, node id), so the merge sequence is reproducible.
    """
    values = xi.values if isinstance(xi, EpochDistanceMatrix) else xi
    values = _validate_distance_matrix(values)
    k = values.shape[0]
    if k < 2:
        raise ValidationError("need at least two epochs to cluster")

    d2 = values**2
    ids = list(range(1, k + 1))
    sizes = [1] * k
    active = list(range(k))  # positions into d2 rows/cols
    merges: list[MergeRecord] = []

    for step in range(k - 1):
        best = None
        best_pair = None
        for ai in range(len(active)):
            for aj in range(ai + 1, len(active)):
                p, q = active[ai], active[aj]
                d = d2[p, q]
                pair = (min(ids[p], ids[q]), max(ids[p], ids[q]))
                if best is None or d < best or (d == best and pair < best_pair):
                    best, best_pair, bi, bj = d, pair, ai, aj
        p, q = active[bi], active[bj]
        sp, sq = sizes[p], sizes[q]
        new_size = sp + sq
        merges.append(
            MergeRecord(
                left=min(ids[p], ids[q]),
                right=max(ids[p], ids[q]),
                height=float(np.sqrt(max(best, 0.0))),
                size=new_size,
            )
        )
        for pos in active:
            if pos == p or pos == q:
                continue
            sk = sizes[pos]
            d_new = ((sp + sk) * d2[p, pos] + (sq + sk) * d2[q, pos] - sk * best) / (
                new_size + sk
            )
            d2[p, pos] = d_new
            d2[pos, p] = d_new
        ids[p] = k + 1 + step
        sizes[p] = new_size
        del active[bj]

    return Dendrogram(n_leaves=k, merges=tuple(merges))


def cut(dendrogram: Dendrogram, n: int) -> np.ndarray:
    """Partition into exactly n clusters by undoing the last n-1 merges.

    Returns raw labels 1..n in epoch order; cluster ids follow the smallest
    leaf they contain.
    """
    k = dendrogram.n_leaves
    if not 1 <= n <= k:
        raise ValidationError(f"cluster count {n} out of range [1, {k}]")
    members: dict[int, list[int]] = {i: [i] for i in range(1, k + 1)}
    for step, merge in enumerate(dendrogram.merges[: k - n]):
        members[k + 1 + step] = members.pop(merge.left) + members.pop(merge.right)
    clusters = sorted(members.values(), key=min)
    labels = np.empty(k, dtype=np.int64)
    for label, leaves in enumerate(clusters, start=1):
        for leaf in leaves:
            labels[leaf - 1] = label
    return labels


def build_market_states(
    labels: np.ndarray, matrices: list[CorrelationMatrix]
) -> MarketStateModel:
    """Per-state element-wise average matrices, states ordered by mean correlation."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size != len(matrices):
        raise ValidationError("one label per correlation matrix required")
    raw_ids = np.unique(labels)
    kind = matrices[0].kind
    tickers = matrices[0].tickers

    raw_means = []
    raw_matrices = []
    raw_sizes = []
    for rid in raw_ids:
        stack = [matrices[i].values for i in np.flatnonzero(labels == rid)]
        assert stack, "empty state cannot arise from a dendrogram cut"
        avg = np.mean(stack, axis=0)
        avg = np.triu(avg) + np.triu(avg, 1).T
        np.fill_diagonal(avg, 1.0)
        m = CorrelationMatrix(kind, f"state-{rid}", avg, tickers)
        raw_matrices.append(m)
        raw_means.append(float(m.offdiag().mean()))
        raw_sizes.append(len(stack))

    order = np.argsort(raw_means, kind="stable")
    relabel = {int(raw_ids[pos]): rank + 1 for rank, pos in enumerate(order)}
    new_labels = np.array([relabel[int(a)] for a in labels], dtype=np.int64)
    state_matrices = tuple(
        CorrelationMatrix(kind, f"state-{rank + 1}", raw_matrices[pos].values, tickers)
        for rank, pos in enumerate(order)
    )
    return MarketStateModel(
        n_states=len(raw_ids),
        labels=new_labels,
        state_means=np.array([raw_means[pos] for pos in order]),
        state_matrices=state_matrices,
        state_sizes=np.array([raw_sizes[pos] for pos in order], dtype=np.int64),
    )


def transitions(labels: np.ndarray, n_states: int | None = None) -> TransitionMatrix:
    """Counts of consecutive-epoch state moves, self-transitions included."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size < 2:
        raise ValidationError("need at least two epochs to count transitions")
    if np.any(labels < 1):
        raise ValidationError("labels must be 1-based")
    n = int(labels.max()) if n_states is None else n_states
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (labels[:-1] - 1, labels[1:] - 1), 1)
    return TransitionMatrix(counts)
