"""External clustering metrics: pair-counting precision/recall/F, NMI and ARI."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from .errors import LengthMismatch

METRIC_NAMES = ("fscore", "precision", "recall", "nmi", "ari")


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # rows: true clusters, columns: predicted clusters

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _pair(truth, pred):
    truth = np.ravel(np.asarray(truth))
    pred = np.ravel(np.asarray(pred))
    if truth.shape != pred.shape:
        raise LengthMismatch(f"{truth.size} true labels vs {pred.size} predicted")
    return truth, pred


def contingency(truth, pred) -> ContingencyTable:
    truth, pred = _pair(truth, pred)
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    counts = np.zeros((ti.max(initial=-1) + 1, pi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (ti, pi), 1)
    return ContingencyTable(counts)


def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def pair_counts(truth, pred):
    """``(TP, FP, FN, TN)`` over all unordered point pairs."""
    table = contingency(truth, pred)
    n = table.n
    same_both = int(_comb2(table.counts).sum())
    same_pred = int(_comb2(table.col_sums).sum())
    same_truth = int(_comb2(table.row_sums).sum())
    tp = same_both
    fp = same_pred - same_both
    fn = same_truth - same_both
    tn = n * (n - 1) // 2 - tp - fp - fn
    return tp, fp, fn, tn


def precision_recall_fscore(counts):
    tp, fp, fn, _ = counts
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return float(p), float(r), float(f)


def _entropy(counts, n):
    c = counts[counts > 0] / n
    return float(-(c * np.log(c)).sum())


def nmi(truth, pred) -> float:
    """Mutual information over the arithmetic mean of the two entropies (natural log)."""
    table = contingency(truth, pred)
    n = table.n
    if n == 0:
        return 0.0
    hu = _entropy(table.row_sums, n)
    hv = _entropy(table.col_sums, n)
    if hu + hv == 0:
        return 0.0
    nz = table.counts > 0
    nij = table.counts[nz].astype(float)
    outer = np.outer(table.row_sums, table.col_sums)[nz].astype(float)
    mi = float(np.sum(nij / n * np.log(n * nij / outer)))
    val = mi / (0.5 * (hu + hv))
    return float(min(max(val, 0.0), 1.0))


def adjusted_rand(truth, pred) -> float:
    table = contingency(truth, pred)
    n = table.n
    sum_ij = float(_comb2(table.counts).sum())
    sum_a = float(_comb2(table.row_sums).sum())
    sum_b = float(_comb2(table.col_sums).sum())
    total = float(n * (n - 1) // 2)
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    num = sum_ij - expected
    den = max_index - expected
    if den == 0:
        # both partitions trivial in the same way
        return 1.0 if num == 0 else 0.0
    return float(num / den)


def all_metrics(truth, pred) -> Dict[str, float]:
    p, r, f = precision_recall_fscore(pair_counts(truth, pred))
    return {"fscore": f, "precision": p, "recall": r,
            "nmi": nmi(truth, pred), "ari": adjusted_rand(truth, pred)}


@dataclass(frozen=True)
class MetricSummary:
    mean: Dict[str, float]
    std: Dict[str, float]
    runs: int

    def formatted(self) -> Dict[str, str]:
        return {m: f"{self.mean[m]:.3f} ({self.std[m]:.3f})" for m in METRIC_NAMES}

    def to_dict(self) -> dict:
        return {"mean": dict(self.mean), "std": dict(self.std), "runs": self.runs,
                "formatted": self.formatted()}


def metric_report(truth, assignments: Sequence) -> MetricSummary:
    """Mean and population std of every metric across k-means restarts.

    ``assignments`` holds label arrays or objects with a ``labels`` attribute.
    """
    if len(assignments) == 0:
        raise ValueError("need at least one assignment")
    rows = [all_metrics(truth, getattr(a, "labels", a)) for a in assignments]
    mean = {m: float(np.mean([r[m] for r in rows])) for m in METRIC_NAMES}
    std = {m: float(np.std([r[m] for r in rows])) for m in METRIC_NAMES}
    return MetricSummary(mean=mean, std=std, runs=len(rows))
