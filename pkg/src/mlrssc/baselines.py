"""Closed-form low-rank representation solutions.

Used as analytical references for the ADMM solvers and as cheap
single-view baselines.
"""
from __future__ import annotations

import numpy as np

from .prox import skinny_svd


def lrr_exact(X):
    """Minimum nuclear-norm ``C`` with ``X = XC``: the projector ``V V^T``."""
    V = skinny_svd(X).V
    return V @ V.T


def lrr_noisy(X, lam):
    """Minimizer of ``||C||_* + (lam/2) ||X - XC||_F^2``.

    Keeps the right singular directions with ``sigma > 1/sqrt(lam)`` and
    shrinks each by ``1 - 1/(lam sigma^2)``; zero when none qualify.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    _, S, V = skinny_svd(X)
    keep = S > 1.0 / np.sqrt(lam)
    V1 = V[:, keep]
    w = 1.0 - 1.0 / (lam * S[keep] ** 2)
    return (V1 * w) @ V1.T
