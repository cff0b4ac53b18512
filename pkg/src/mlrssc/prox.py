"""Proximal operators of the L1 and nuclear norms."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import SvdFailure

RANK_CUTOFF = 1e-12


class SkinnySvd(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def soft_threshold(M, tau):
    """Entry-wise shrinkage ``sign(x) * max(|x| - tau, 0)``."""
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    M = np.asarray(M, dtype=float)
    return np.sign(M) * np.maximum(np.abs(M) - tau, 0.0)


def _svd(M):
    try:
        return scipy.linalg.svd(M, full_matrices=False, check_finite=False,
                                lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        pass
    # gesdd occasionally fails on badly scaled input where gesvd still converges
    try:
        return scipy.linalg.svd(M, full_matrices=False, check_finite=False,
                                lapack_driver="gesvd")
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc


def skinny_svd(M) -> SkinnySvd:
    """SVD restricted to singular values above ``1e-12 * max(S)``."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise SvdFailure("matrix has non-finite entries")
    if M.size == 0:
        return SkinnySvd(np.zeros((M.shape[0], 0)), np.zeros(0), np.zeros((M.shape[1], 0)))
    U, S, Vt = _svd(M)
    if S.size == 0 or S[0] == 0:
        r = 0
    else:
        r = int(np.count_nonzero(S > RANK_CUTOFF * S[0]))
    return SkinnySvd(U[:, :r], S[:r], Vt[:r].T)


def svt(M, tau):
    """Singular value thresholding: the prox of ``tau * ||.||_*``."""
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise SvdFailure("matrix has non-finite entries")
    U, S, Vt = _svd(M)
    keep = S > tau
    r = int(np.count_nonzero(keep))
    if r == 0:
        return np.zeros_like(M)
    return (U[:, :r] * (S[:r] - tau)) @ Vt[:r]


def nuclear_norm(M) -> float:
    M = np.asarray(M, dtype=float)
    try:
        return float(np.sum(scipy.linalg.svdvals(M, check_finite=False)))
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(str(exc)) from exc
