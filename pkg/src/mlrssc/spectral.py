"""Affinity construction, normalized spectral embedding and seeded k-means."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.linalg

from .errors import BadK, EigenFailure

DEGREE_FLOOR = 1e-12
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-9


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray  # 1-based
    inertia: float
    empty_clusters: int = 0
    n_iter: int = 0


def affinity_from_representation(C) -> np.ndarray:
    """``W = |C| + |C|^T``."""
    absC = np.abs(np.asarray(C, dtype=float))
    return absC + absC.T


def average_representations(c_views: Sequence[np.ndarray]) -> np.ndarray:
    if len(c_views) == 0:
        raise ValueError("need at least one representation")
    out = np.zeros_like(np.asarray(c_views[0], dtype=float))
    for C in c_views:
        out += C
    return out / len(c_views)


def spectral_embedding(W, k: int) -> np.ndarray:
    """Row-normalized top-``k`` eigenvectors of ``D^-1/2 W D^-1/2``."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"k={k} must lie in [1, {n}]")
    deg = W.sum(axis=1)
    deg = np.where(deg > 0, deg, DEGREE_FLOOR)
    d = 1.0 / np.sqrt(deg)
    M = W * d[:, None] * d[None, :]
    M = 0.5 * (M + M.T)
    try:
        _, vecs = scipy.linalg.eigh(M, subset_by_index=[n - k, n - 1], check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    # eigh returns ascending order; put the leading eigenvector first
    vecs = vecs[:, ::-1]
    norms = np.linalg.norm(vecs, axis=1)
    zero = norms == 0
    norms[zero] = 1.0
    emb = vecs / norms[:, None]
    return emb


def _lloyd(points, centers, max_iter, tol):
    sq = np.einsum("ij,ij->i", points, points)
    k = centers.shape[0]
    prev = np.inf
    inertias = []
    for it in range(1, max_iter + 1):
        d2 = sq[:, None] - 2.0 * points @ centers.T + np.einsum("ij,ij->i", centers, centers)[None, :]
        np.maximum(d2, 0.0, out=d2)
        assign = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(points.shape[0]), assign].sum())
        inertias.append(inertia)
        if prev - inertia <= tol * max(prev, 1e-300) and it > 1:
            break
        prev = inertia
        for j in range(k):
            members = assign == j
            if members.any():
                centers[j] = points[members].mean(axis=0)
    empty = k - np.unique(assign).size
    return assign, inertia, empty, it, inertias


def _restart_rng(seed, restart: int) -> np.random.Generator:
    # seed may be an int or a tuple of ints, e.g. (seed, grid_point)
    entropy = [int(s) for s in np.atleast_1d(seed)] + [int(restart)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def kmeans_restart(points, k: int, seed: int, restart: int,
                   max_iter: int = KMEANS_MAX_ITER, tol: float = KMEANS_TOL) -> ClusterAssignment:
    """One Lloyd run from ``k`` distinct random points of the ``(seed, restart)`` stream."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"k={k} must lie in [1, {n}]")
    rng = _restart_rng(seed, restart)
    init = rng.choice(n, size=k, replace=False)
    assign, inertia, empty, n_iter, _ = _lloyd(points, points[init].copy(), max_iter, tol)
    return ClusterAssignment(labels=assign + 1, inertia=inertia, empty_clusters=empty, n_iter=n_iter)


def kmeans(points, k: int, restarts: int = 20, seed: int = 0) -> ClusterAssignment:
    """Best-inertia assignment over ``restarts`` random initializations."""
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        a = kmeans_restart(points, k, seed, r)
        if best is None or a.inertia < best.inertia:
            best = a
    return best


def spectral_clustering(W, k: int, restarts: int = 20, seed: int = 0) -> List[ClusterAssignment]:
    """Embed once, then one k-means assignment per restart."""
    emb = spectral_embedding(W, k)
    return [kmeans_restart(emb, k, seed, r) for r in range(restarts)]
