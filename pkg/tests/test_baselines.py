import numpy as np
import pytest

from mlrssc.baselines import lrr_exact, lrr_noisy
from mlrssc.prox import nuclear_norm


def lrr_noisy_objective(X, C, lam):
    # the objective the closed form minimizes: ||C||_* + lam/2 ||X - XC||_F^2
    return nuclear_norm(C) + 0.5 * lam * np.sum((X - X @ C) ** 2)


def test_lrr_exact_orthonormal_rows_is_identity(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    np.testing.assert_allclose(lrr_exact(Q), np.eye(5), atol=1e-10)


def test_lrr_exact_rank_one():
    u = np.array([1.0, -1.0])
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    C = lrr_exact(np.outer(u, v))
    np.testing.assert_allclose(C, np.outer(v, v), atol=1e-12)
    assert np.linalg.matrix_rank(C) == 1


def test_lrr_exact_self_expression(rng):
    X = rng.standard_normal((4, 8))
    C = lrr_exact(X)
    assert np.linalg.norm(X - X @ C) < 1e-8
    np.testing.assert_allclose(C, C.T, atol=1e-12)
    np.testing.assert_allclose(C @ C, C, atol=1e-8)


def test_lrr_noisy_empty_partition(rng):
    X = 1e-3 * rng.standard_normal((3, 6))
    np.testing.assert_array_equal(lrr_noisy(X, 1.0), np.zeros((6, 6)))


def test_lrr_noisy_scalar():
    assert lrr_noisy(np.array([[2.0]]), 1.0)[0, 0] == pytest.approx(0.75)


def test_lrr_noisy_beats_perturbations(rng):
    X = rng.standard_normal((5, 10))
    C = lrr_noisy(X, 10.0)
    base = lrr_noisy_objective(X, C, 10.0)
    for _ in range(1000):
        P = 1e-2 * rng.standard_normal(C.shape)
        assert base <= lrr_noisy_objective(X, C + P, 10.0) + 1e-12


def test_lrr_noisy_tends_to_exact(rng):
    X = rng.standard_normal((6, 6))
    assert np.max(np.abs(lrr_noisy(X, 1e12) - lrr_exact(X))) < 1e-6


def test_lrr_noisy_rejects_nonpositive_lambda():
    with pytest.raises(ValueError):
        lrr_noisy(np.eye(2), 0.0)
