import numpy as np
import pytest

from mlrssc.core import (Fidelity, KernelKind, KernelSpec, MultiViewDataset, SolverConfig,
                         validate_dataset)
from mlrssc.errors import BadLabels, ConfigError, MismatchedColumns, NonFinite


def test_accepts_two_views(rng):
    d = MultiViewDataset(views=(rng.standard_normal((2, 1000)), rng.standard_normal((2, 1000))),
                         labels=np.ones(1000, dtype=int), k=2)
    assert validate_dataset(d) is d
    assert validate_dataset(validate_dataset(d)) is d


def test_mismatched_columns(rng):
    d = MultiViewDataset(views=(rng.standard_normal((3, 10)), rng.standard_normal((3, 9))), k=2)
    with pytest.raises(MismatchedColumns):
        validate_dataset(d)


def test_bad_labels(rng):
    X = rng.standard_normal((3, 10))
    with pytest.raises(BadLabels):
        validate_dataset(MultiViewDataset(views=(X,), labels=np.ones(9, dtype=int), k=2))
    with pytest.raises(BadLabels):
        validate_dataset(MultiViewDataset(views=(X,), labels=np.full(10, 3), k=2))


def test_non_finite(rng):
    X = rng.standard_normal((3, 10))
    X[1, 2] = np.nan
    with pytest.raises(NonFinite):
        validate_dataset(MultiViewDataset(views=(X,), k=2))


def test_dataset_is_immutable(rng):
    d = MultiViewDataset(views=(rng.standard_normal((2, 4)),), k=2)
    with pytest.raises(ValueError):
        d.views[0][0, 0] = 1.0


def test_kernel_with_exact_rejected():
    with pytest.raises(ConfigError):
        SolverConfig(fidelity=Fidelity.EXACT, kernel=KernelSpec(KernelKind.GAUSSIAN))


@pytest.mark.parametrize("kw", [
    dict(beta1=-1.0), dict(lam=-0.1), dict(mu_init=0.0), dict(mu_init=1e7),
    dict(rho=0.9), dict(epsilon=0.0), dict(max_iters=0),
])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        SolverConfig(**kw)


def test_lambda_expansion():
    assert SolverConfig(lam=0.3).lambdas(3) == (0.3, 0.3, 0.3)
    assert SolverConfig(lam=(0.1, 0.2)).lambdas(2) == (0.1, 0.2)
    with pytest.raises(ConfigError):
        SolverConfig(lam=(0.1, 0.2)).lambdas(3)


def test_default_epsilon_per_mode():
    assert SolverConfig().tol == 1e-3
    assert SolverConfig(kernel=KernelSpec()).tol == 1e-5
    assert SolverConfig(epsilon=1e-4, kernel=KernelSpec()).tol == 1e-4


def test_kernel_spec_validation():
    with pytest.raises(ConfigError):
        KernelSpec(sigma_multiplier=0.0)
    assert KernelSpec(sigma_multiplier=2).multipliers(2) == (2.0, 2.0)
