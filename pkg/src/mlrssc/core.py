"""Domain types shared by the solver, clustering and harness layers.

Matrices follow the columns-are-points convention: a view is a
``D x N`` array whose ``N`` columns are the data points.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import BadLabels, ConfigError, MismatchedColumns, NonFinite


class Fidelity(str, enum.Enum):
    EXACT = "exact"
    NOISY = "noisy"


class Mode(str, enum.Enum):
    SINGLE = "single"
    PAIRWISE = "pairwise"
    CENTROID = "centroid"


class KernelKind(str, enum.Enum):
    LINEAR = "linear"
    GAUSSIAN = "gaussian"


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultiViewDataset:
    """Per-view feature matrices plus optional 1-based ground-truth labels."""

    views: Tuple[np.ndarray, ...]
    labels: Optional[np.ndarray] = None
    k: int = 2

    def __post_init__(self):
        views = tuple(_frozen(np.atleast_2d(v)) for v in self.views)
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen(np.ravel(self.labels), dtype=np.int64))

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def n_points(self) -> int:
        return self.views[0].shape[1]

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(v.shape[0] for v in self.views)


def validate_dataset(d: MultiViewDataset) -> MultiViewDataset:
    """Return ``d`` unchanged if every dataset invariant holds, else raise."""
    if len(d.views) == 0:
        raise MismatchedColumns("dataset has no views")
    if not isinstance(d.k, (int, np.integer)) or d.k < 1:
        raise BadLabels(f"cluster count k must be a positive integer, got {d.k!r}")
    n = d.views[0].shape[1]
    for i, v in enumerate(d.views):
        if v.ndim != 2:
            raise MismatchedColumns(f"view {i} is not a matrix (ndim={v.ndim})")
        if v.shape[1] != n:
            raise MismatchedColumns(
                f"view {i} has {v.shape[1]} columns, view 0 has {n}")
        if v.shape[0] < 1:
            raise MismatchedColumns(f"view {i} has no features")
        if not np.all(np.isfinite(v)):
            raise NonFinite(f"view {i} contains non-finite entries")
    if n < 2:
        raise MismatchedColumns(f"need at least 2 data points, got {n}")
    if d.labels is not None:
        if d.labels.shape[0] != n:
            raise BadLabels(f"expected {n} labels, got {d.labels.shape[0]}")
        if d.labels.min() < 1 or d.labels.max() > d.k:
            raise BadLabels(f"labels must lie in [1, {d.k}]")
    return d


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.GAUSSIAN
    # one multiplier shared by all views, or one per view
    sigma_multiplier: Union[float, Tuple[float, ...]] = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        m = self.sigma_multiplier
        if np.ndim(m) > 0:
            m = tuple(float(x) for x in m)
            bad = any(x <= 0 for x in m)
        else:
            m = float(m)
            bad = m <= 0
        if bad:
            raise ConfigError("sigma_multiplier must be > 0")
        object.__setattr__(self, "sigma_multiplier", m)

    def multipliers(self, n_views: int) -> Tuple[float, ...]:
        m = self.sigma_multiplier
        if isinstance(m, tuple):
            if len(m) != n_views:
                raise ConfigError(f"{len(m)} sigma multipliers for {n_views} views")
            return m
        return (m,) * n_views


LINEAR_EPSILON = 1e-3
KERNEL_EPSILON = 1e-5


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the ADMM solvers.

    ``lam`` is either one consensus weight shared by all views or a
    tuple with one weight per view. ``epsilon=None`` selects the
    per-mode default (1e-3 linear, 1e-5 kernel).
    """

    beta1: float = 0.5
    beta2: float = 0.5
    lam: Union[float, Tuple[float, ...]] = 0.5
    mu_init: float = 10.0
    rho: float = 1.5
    mu_max: float = 1e6
    epsilon: Optional[float] = None
    max_iters: int = 100
    fidelity: Fidelity = Fidelity.NOISY
    mode: Mode = Mode.PAIRWISE
    kernel: Optional[KernelSpec] = None

    def __post_init__(self):
        object.__setattr__(self, "fidelity", Fidelity(self.fidelity))
        object.__setattr__(self, "mode", Mode(self.mode))
        if np.ndim(self.lam) > 0:
            object.__setattr__(self, "lam", tuple(float(x) for x in self.lam))
            lams = self.lam
        else:
            object.__setattr__(self, "lam", float(self.lam))
            lams = (self.lam,)
        if self.beta1 < 0 or self.beta2 < 0:
            raise ConfigError("beta1 and beta2 must be nonnegative")
        if any(x < 0 for x in lams):
            raise ConfigError("lambda must be nonnegative")
        if not self.mu_init > 0 or not self.mu_max > 0:
            raise ConfigError("mu_init and mu_max must be positive")
        if self.mu_init > self.mu_max:
            raise ConfigError("mu_init must not exceed mu_max")
        if self.rho < 1:
            raise ConfigError("rho must be >= 1")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ConfigError("max_iters must be a positive integer")
        if self.kernel is not None and self.fidelity is Fidelity.EXACT:
            raise ConfigError("kernel mode is defined only for noisy fidelity")

    @property
    def tol(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return KERNEL_EPSILON if self.kernel is not None else LINEAR_EPSILON

    def lambdas(self, n_views: int) -> Tuple[float, ...]:
        if isinstance(self.lam, tuple):
            if len(self.lam) == 1:
                return self.lam * n_views
            if len(self.lam) != n_views:
                raise ConfigError(f"{len(self.lam)} lambda values for {n_views} views")
            return self.lam
        return (self.lam,) * n_views


@dataclass
class AdmmViewState:
    """Primal iterates and duals of one view. ``L1`` exists only in exact mode."""

    A: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    L4: np.ndarray
    L1: Optional[np.ndarray] = None

    @classmethod
    def zeros(cls, n: int, d: Optional[int] = None) -> "AdmmViewState":
        z = lambda: np.zeros((n, n))  # noqa: E731
        return cls(A=z(), C1=z(), C2=z(), C3=z(), L2=z(), L3=z(), L4=z(),
                   L1=None if d is None else np.zeros((d, n)))


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    iterations: int
    # one row per iteration, residuals per view: (A-C1, A-C2, A-C3, A_k-A_{k-1})
    residual_trace: Tuple[Tuple[Tuple[float, float, float, float], ...], ...] = ()
    # empty when objective tracking was switched off
    objective_trace: Tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual_trace": [[list(r) for r in row] for row in self.residual_trace],
            "objective_trace": list(self.objective_trace),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConvergenceReport":
        return cls(
            converged=bool(d["converged"]),
            iterations=int(d["iterations"]),
            residual_trace=tuple(tuple(tuple(r) for r in row) for row in d["residual_trace"]),
            objective_trace=tuple(d["objective_trace"]),
        )


@dataclass(frozen=True)
class RepresentationResult:
    representations: Tuple[np.ndarray, ...]
    report: ConvergenceReport
    centroid: Optional[np.ndarray] = None
    consensus: Tuple[np.ndarray, ...] = field(default=(), repr=False)
