import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mlrssc.prox import nuclear_norm, skinny_svd, soft_threshold, svt


def scalar_soft(M, tau):
    out = np.zeros_like(M)
    for i in range(M.shape[0]):
        for j in range(M.shape[1]):
            x = M[i, j]
            mag = abs(x) - tau
            if mag > 0:
                out[i, j] = mag if x > 0 else -mag
    return out


def full_svd_shrink(M, tau):
    U, S, Vt = np.linalg.svd(M, full_matrices=True)
    Sigma = np.zeros(M.shape)
    for i, s in enumerate(S):
        Sigma[i, i] = max(s - tau, 0.0)
    return U @ Sigma @ Vt


def test_soft_threshold_example():
    M = np.array([[0.2, 1.0], [-0.8, 0.1]])
    np.testing.assert_allclose(soft_threshold(M, 0.5), [[0, 0.5], [-0.3, 0]], atol=1e-15)


def test_soft_threshold_zero_tau_is_identity(rng):
    M = rng.standard_normal((4, 7))
    np.testing.assert_array_equal(soft_threshold(M, 0.0), M)


def test_soft_threshold_matches_scalar_loop(rng):
    M = rng.standard_normal((6, 6))
    np.testing.assert_array_equal(soft_threshold(M, 0.4), scalar_soft(M, 0.4))


def test_soft_threshold_rejects_negative_tau():
    with pytest.raises(ValueError):
        soft_threshold(np.eye(2), -1.0)


def test_svt_diagonal():
    np.testing.assert_allclose(svt(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]), atol=1e-12)


def test_svt_zero_tau_reconstructs(rng):
    M = rng.standard_normal((5, 4))
    np.testing.assert_allclose(svt(M, 0.0), M, atol=1e-10)


def test_svt_matches_full_svd_oracle(rng):
    M = rng.standard_normal((5, 4))
    out = svt(M, 0.3)
    assert np.linalg.norm(out - full_svd_shrink(M, 0.3)) < 1e-10


def test_svt_rank(rng):
    M = rng.standard_normal((6, 6))
    s = np.linalg.svd(M, compute_uv=False)
    tau = float(np.median(s))
    assert np.linalg.matrix_rank(svt(M, tau)) == int(np.sum(s > tau))


def test_skinny_svd_zero_matrix():
    res = skinny_svd(np.zeros((3, 4)))
    assert res.S.size == 0
    assert res.U.shape == (3, 0) and res.V.shape == (4, 0)


def test_skinny_svd_rank_one():
    u = np.array([1.0, 2.0, 2.0]) / 3.0
    v = np.array([0.6, 0.8])
    res = skinny_svd(np.outer(u, v))
    assert res.S.shape == (1,)
    assert res.S[0] == pytest.approx(1.0, abs=1e-12)


def test_skinny_svd_reconstruction(rng):
    M = rng.standard_normal((8, 5))
    U, S, V = skinny_svd(M)
    assert np.linalg.norm(U * S @ V.T - M) / np.linalg.norm(M) < 1e-9
    np.testing.assert_allclose(U.T @ U, np.eye(len(S)), atol=1e-10)
    np.testing.assert_allclose(V.T @ V, np.eye(len(S)), atol=1e-10)
    assert np.all(np.diff(S) <= 0) and np.all(S > 0)


def test_nuclear_norm(rng):
    M = rng.standard_normal((4, 6))
    assert nuclear_norm(M) == pytest.approx(np.linalg.svd(M, compute_uv=False).sum())


matrices = arrays(np.float64, (4, 4), elements=st.floats(-5, 5, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(matrices, matrices, st.floats(0, 3))
def test_soft_threshold_nonexpansive(M, M2, tau):
    lhs = np.linalg.norm(soft_threshold(M, tau) - soft_threshold(M2, tau))
    assert lhs <= np.linalg.norm(M - M2) + 1e-12


def _prox_gap(prox, reg, M, tau, rng, trials=100):
    def obj(C):
        return tau * reg(C) + 0.5 * np.sum((M - C) ** 2)

    C = prox(M, tau)
    base = obj(C)
    worst = min(obj(C + 1e-2 * rng.standard_normal(M.shape)) for _ in range(trials))
    return base, worst


def test_svt_prox_optimality(rng):
    M = rng.standard_normal((5, 5))
    base, worst = _prox_gap(svt, nuclear_norm, M, 0.7, rng)
    assert base <= worst + 1e-12


def test_soft_threshold_prox_optimality(rng):
    M = rng.standard_normal((5, 5))
    base, worst = _prox_gap(soft_threshold, lambda C: np.abs(C).sum(), M, 0.7, rng)
    assert base <= worst + 1e-12
