"""Gram matrices for the kernelized solvers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .core import KernelKind, KernelSpec
from .errors import DegenerateData


@dataclass(frozen=True)
class GramMatrix:
    K: np.ndarray
    kind: KernelKind
    sigma: Optional[float] = None


def gram_linear(X) -> GramMatrix:
    X = np.asarray(X, dtype=float)
    K = X.T @ X
    # force exact symmetry; the product is symmetric only up to rounding
    K = np.triu(K) + np.triu(K, 1).T
    return GramMatrix(K=K, kind=KernelKind.LINEAR)


def median_pairwise_distance(X) -> float:
    """Median Euclidean distance over the N(N-1)/2 unordered point pairs."""
    X = np.asarray(X, dtype=float)
    if X.shape[1] < 2:
        raise DegenerateData("need at least two points")
    d = pdist(X.T)
    if not np.any(d > 0):
        raise DegenerateData("all pairwise distances are zero")
    return float(np.median(d))


def _sq_dists(X):
    sq = np.einsum("ij,ij->j", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X.T @ X)
    np.maximum(D, 0.0, out=D)
    return D


def gram_gaussian(X, sigma) -> GramMatrix:
    """``K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2))`` with exact unit diagonal."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    X = np.asarray(X, dtype=float)
    K = np.exp(-_sq_dists(X) / (2.0 * sigma * sigma))
    K = np.triu(K, 1)
    K = K + K.T
    np.fill_diagonal(K, 1.0)
    return GramMatrix(K=K, kind=KernelKind.GAUSSIAN, sigma=float(sigma))


def build_grams(views: Sequence[np.ndarray], spec: KernelSpec) -> List[GramMatrix]:
    """One Gram matrix per view; Gaussian widths are set per view from its median distance."""
    if spec.kind is KernelKind.LINEAR:
        return [gram_linear(X) for X in views]
    mults = spec.multipliers(len(views))
    return [gram_gaussian(X, m * median_pairwise_distance(X)) for X, m in zip(views, mults)]
