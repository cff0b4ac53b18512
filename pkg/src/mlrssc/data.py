"""Synthetic benchmark, text-file ingestion, PCA and feature concatenation."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import MultiViewDataset, validate_dataset
from .errors import DegenerateData, MismatchedColumns, ParseError

_MEAN_A = (1.0, 1.0)
_COV_A = ((1.0, 0.5), (0.5, 1.5))
_MEAN_B = (2.0, 2.0)
_COV_B = ((0.3, 0.0), (0.0, 0.6))


@dataclass(frozen=True)
class SyntheticSpec:
    n_points: int = 1000
    # means[v][c] and covs[v][c] for view v, component c
    means: Tuple = ((_MEAN_A, _MEAN_B), (_MEAN_B, _MEAN_A))
    covs: Tuple = ((_COV_A, _COV_B), (_COV_B, _COV_A))
    mixing: Tuple[float, ...] = (0.5, 0.5)
    seed: int = 0

    def __post_init__(self):
        if not np.isclose(sum(self.mixing), 1.0):
            raise ValueError("mixing proportions must sum to 1")
        for view in self.covs:
            for cov in view:
                cov = np.asarray(cov, dtype=float)
                if not np.allclose(cov, cov.T) or np.linalg.eigvalsh(cov).min() <= 0:
                    raise ValueError("covariances must be symmetric positive definite")


def _component_sizes(n, mixing):
    sizes = np.floor(np.asarray(mixing) * n).astype(int)
    sizes[: n - sizes.sum()] += 1
    return sizes


def sample_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    rng = np.random.default_rng(spec.seed)
    k = len(spec.mixing)
    sizes = _component_sizes(spec.n_points, spec.mixing)
    labels = rng.permutation(np.repeat(np.arange(1, k + 1), sizes))
    views = []
    for means, covs in zip(spec.means, spec.covs):
        z = rng.standard_normal((2, spec.n_points))
        X = np.empty((len(means[0]), spec.n_points))
        for c in range(k):
            idx = labels == c + 1
            L = np.linalg.cholesky(np.asarray(covs[c], dtype=float))
            X[:, idx] = np.asarray(means[c], dtype=float)[:, None] + L @ z[:, idx]
        views.append(X)
    return MultiViewDataset(views=tuple(views), labels=labels, k=k)


def generate_synthetic(seed: int = 0, n_points: int = 1000) -> MultiViewDataset:
    """Two-view, two-component Gaussian mixture benchmark with balanced clusters.

    Both views share the latent component of each point; view 2 swaps the
    component parameters of view 1.
    """
    return sample_synthetic(SyntheticSpec(n_points=n_points, seed=seed))


_SPLIT = re.compile(r"[,\s]+")


def _read_matrix(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            tokens = [t for t in _SPLIT.split(text) if t]
            try:
                row = [float(t) for t in tokens]
            except ValueError:
                bad = next(t for t in tokens if not _is_float(t))
                raise ParseError(path, lineno, f"non-numeric token {bad!r}") from None
            if rows and len(row) != len(rows[0]):
                raise ParseError(path, lineno, f"expected {len(rows[0])} columns, found {len(row)}")
            if not all(np.isfinite(row)):
                raise ParseError(path, lineno, "non-finite value")
            rows.append(row)
    if not rows:
        raise ParseError(path, 1, "file holds no data")
    return np.asarray(rows, dtype=float)


def _is_float(t):
    try:
        float(t)
    except ValueError:
        return False
    return True


def _read_labels(path):
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                labels.append(int(text))
            except ValueError:
                raise ParseError(path, lineno, f"expected one integer label, got {text!r}") from None
    return np.asarray(labels, dtype=np.int64)


def load_views(view_paths: Sequence, labels_path: Optional[os.PathLike] = None,
               k: Optional[int] = None) -> MultiViewDataset:
    """Read delimited text views (rows are samples) into a ``D x N`` dataset.

    ``k`` defaults to the number of distinct labels when labels are given.
    """
    mats = [_read_matrix(p) for p in view_paths]
    n = mats[0].shape[0]
    for p, m in zip(view_paths, mats):
        if m.shape[0] != n:
            raise MismatchedColumns(f"{p} has {m.shape[0]} samples, expected {n}")
    labels = _read_labels(labels_path) if labels_path is not None else None
    if k is None:
        if labels is None:
            raise ValueError("k is required when no labels are given")
        k = int(np.unique(labels).size)
    return validate_dataset(MultiViewDataset(views=tuple(m.T for m in mats), labels=labels, k=k))


def save_views(d: MultiViewDataset, out_dir, prefix: str = "view"):
    """Write each view as ``<prefix><i>.csv`` (rows are samples) plus ``labels.txt``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, X in enumerate(d.views, start=1):
        p = out / f"{prefix}{i}.csv"
        np.savetxt(p, X.T, delimiter=",", fmt="%.17g")
        paths.append(p)
    label_path = None
    if d.labels is not None:
        label_path = out / "labels.txt"
        np.savetxt(label_path, d.labels, fmt="%d")
    return paths, label_path


def pca_reduce(X, variance_fraction: float = 0.9):
    """Project centered data on the fewest principal directions reaching ``variance_fraction``."""
    if not 0 < variance_fraction <= 1:
        raise ValueError("variance_fraction must lie in (0, 1]")
    X = np.asarray(X, dtype=float)
    if X.shape[1] < 2:
        raise DegenerateData("PCA needs at least two points")
    Xc = X - X.mean(axis=1, keepdims=True)
    U, S, _ = np.linalg.svd(Xc, full_matrices=False)
    var = S ** 2
    total = var.sum()
    if not total > 0:
        raise DegenerateData("data has zero variance")
    rank = int(np.count_nonzero(S > S[0] * max(Xc.shape) * np.finfo(float).eps))
    cum = np.cumsum(var[:rank]) / total
    r = int(np.searchsorted(cum, variance_fraction - 1e-12) + 1)
    r = min(r, rank)
    return U[:, :r].T @ Xc


def concat_features(d: MultiViewDataset) -> MultiViewDataset:
    return MultiViewDataset(views=(np.vstack(d.views),), labels=d.labels, k=d.k)
