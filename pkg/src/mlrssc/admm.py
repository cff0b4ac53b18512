"""ADMM solvers for single-view LRSSC and pairwise / centroid multi-view LRSSC.

Every view carries the splitting ``A = C1 = C2 = C3`` (plus ``X = XA`` in
exact mode): ``C1`` takes the nuclear-norm prox, ``C2`` the L1 prox with a
zero diagonal, ``C3`` the consensus coupling. Views are swept Jacobi
style: cross-view quantities are read from a snapshot taken at the start
of the outer iteration.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .core import (AdmmViewState, ConvergenceReport, Fidelity, Mode,
                   RepresentationResult, SolverConfig)
from .errors import AllZeroLambda, ConfigError, NonFinite, SingularSystem
from .kernel import build_grams
from .prox import nuclear_norm, soft_threshold, svt

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PenaltyState:
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    rho: float = 1.5
    mu_max: float = 1e6

    @classmethod
    def from_config(cls, config: SolverConfig) -> "PenaltyState":
        m = config.mu_init
        return cls(m, m, m, m, rho=config.rho, mu_max=config.mu_max)

    @property
    def mus(self) -> Tuple[float, float, float, float]:
        return (self.mu1, self.mu2, self.mu3, self.mu4)


def penalty_step(p: PenaltyState) -> PenaltyState:
    """Geometric increase ``mu_i <- min(rho * mu_i, mu_max)``."""
    mu1, mu2, mu3, mu4 = (min(p.rho * m, p.mu_max) for m in p.mus)
    return replace(p, mu1=mu1, mu2=mu2, mu3=mu3, mu4=mu4)


def _spd_solve(M, rhs):
    try:
        factor = scipy.linalg.cho_factor(M, lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"A-update system is not positive definite: {exc}") from exc
    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def _shifted(G, shift, scale=1.0):
    M = G * scale if scale != 1.0 else G.copy()
    M.flat[:: M.shape[0] + 1] += shift
    return M


def update_a_exact(view: AdmmViewState, X, penalties: PenaltyState, XtX=None):
    """A-step for the noiseless model with the ``X = XA`` constraint."""
    p = penalties
    shift = p.mu2 + p.mu3 + p.mu4
    if not shift > 0:
        raise SingularSystem("penalties mu2 + mu3 + mu4 must be positive")
    if XtX is None:
        XtX = X.T @ X
    rhs = (p.mu1 * XtX + p.mu2 * view.C2 + p.mu3 * view.C1 + p.mu4 * view.C3
           + X.T @ view.L1 - view.L2 - view.L3 - view.L4)
    return _spd_solve(_shifted(XtX, shift, p.mu1), rhs)


def update_a_noisy(view: AdmmViewState, gram, penalties: PenaltyState):
    """A-step for the noisy model; ``gram`` is ``X^T X`` or a kernel matrix."""
    p = penalties
    shift = p.mu2 + p.mu3 + p.mu4
    if not shift > 0:
        raise SingularSystem("penalties mu2 + mu3 + mu4 must be positive")
    rhs = (gram + p.mu2 * view.C2 + p.mu3 * view.C1 + p.mu4 * view.C3
           - view.L2 - view.L3 - view.L4)
    return _spd_solve(_shifted(gram, shift), rhs)


def update_c1(A, L3, beta1, mu3):
    return svt(A + L3 / mu3, beta1 / mu3)


def update_c2(A, L2, beta2, mu2):
    C2 = soft_threshold(A + L2 / mu2, beta2 / mu2)
    np.fill_diagonal(C2, 0.0)
    return C2


def update_c3_pairwise(A, L4, others: Sequence[np.ndarray], lambda_v, mu4):
    """Closed-form minimizer of the pairwise consensus subproblem."""
    n_others = len(others)
    if n_others == 0 or lambda_v == 0:
        return (mu4 * A + L4) / mu4
    total = np.sum(np.stack(others), axis=0) if n_others > 1 else others[0]
    return (2.0 * lambda_v * total + mu4 * A + L4) / (2.0 * lambda_v * n_others + mu4)


def update_c3_centroid(A, L4, centroid, lambda_v, mu4):
    return (2.0 * lambda_v * centroid + mu4 * A + L4) / (2.0 * lambda_v + mu4)


def update_centroid(c3_views: Sequence[np.ndarray], lambdas: Sequence[float]):
    lambdas = np.asarray(lambdas, dtype=float)
    total = lambdas.sum()
    if not total > 0:
        raise AllZeroLambda("centroid needs at least one positive lambda")
    out = np.zeros_like(c3_views[0], dtype=float)
    for lam, C in zip(lambdas, c3_views):
        if lam:
            out += lam * C
    return out / total


def update_duals(view: AdmmViewState, X, penalties: PenaltyState) -> AdmmViewState:
    """Dual ascent on every constraint, in place. ``L1`` is touched only in exact mode."""
    p = penalties
    if view.L1 is not None:
        view.L1 = view.L1 + p.mu1 * (X - X @ view.A)
    view.L2 = view.L2 + p.mu2 * (view.A - view.C2)
    view.L3 = view.L3 + p.mu3 * (view.A - view.C1)
    view.L4 = view.L4 + p.mu4 * (view.A - view.C3)
    return view


def view_residuals(view: AdmmViewState, A_prev) -> Tuple[float, float, float, float]:
    A = view.A
    return (float(np.max(np.abs(A - view.C1))),
            float(np.max(np.abs(A - view.C2))),
            float(np.max(np.abs(A - view.C3))),
            float(np.max(np.abs(A - A_prev))))


def check_convergence(views: Sequence[AdmmViewState], prev_As: Sequence[np.ndarray], epsilon):
    """All four infinity-norm residuals of every view must be ``<= epsilon``."""
    residuals = tuple(view_residuals(v, Ap) for v, Ap in zip(views, prev_As))
    ok = all(r <= epsilon for res in residuals for r in res)
    return ok, residuals


def fidelity_term(C, X=None, gram=None) -> float:
    """``0.5 ||X - XC||_F^2``, or its kernel form when only the Gram matrix is known."""
    if X is not None:
        R = X - X @ C
        return 0.5 * float(np.sum(R * R))
    KC = gram @ C
    return 0.5 * float(np.trace(gram) - 2.0 * np.trace(KC) + np.sum(C * KC))


def evaluate_objective(reps: Sequence[np.ndarray], config: SolverConfig,
                       centroid=None, data=None, grams=None) -> float:
    """Objective value of the representations ``reps``.

    Noisy and kernel modes include the self-expression fidelity term; in
    exact mode the fidelity is a constraint and is left out.
    """
    n_views = len(reps)
    lambdas = config.lambdas(n_views)
    total = 0.0
    for v, C in enumerate(reps):
        if config.fidelity is Fidelity.NOISY:
            if grams is not None:
                total += fidelity_term(C, gram=grams[v])
            else:
                total += fidelity_term(C, X=data[v])
        if config.beta1:
            total += config.beta1 * nuclear_norm(C)
        total += config.beta2 * float(np.abs(C).sum())
    if config.mode is Mode.PAIRWISE and n_views > 1:
        for v in range(n_views):
            for w in range(n_views):
                if v != w and lambdas[v]:
                    D = reps[v] - reps[w]
                    total += lambdas[v] * float(np.sum(D * D))
    elif config.mode is Mode.CENTROID and centroid is not None:
        for v in range(n_views):
            D = reps[v] - centroid
            total += lambdas[v] * float(np.sum(D * D))
    return total


def _as_matrices(views):
    out = []
    for X in views:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ConfigError("each view must be a 2-D matrix")
        out.append(X)
    return out


def solve(views: Optional[Sequence[np.ndarray]], config: SolverConfig,
          grams: Optional[Sequence[np.ndarray]] = None,
          track_objective: bool = True) -> RepresentationResult:
    """Run the ADMM loop selected by ``config.mode``.

    Parameters
    ----------
    views : list of (D_v, N) arrays, or None when ``grams`` is given
    config : SolverConfig
    grams : optional list of (N, N) Gram matrices. Required by kernel mode
        when ``views`` is None; otherwise built from ``views`` and
        ``config.kernel``.
    track_objective : evaluate the objective every iteration. This costs
        one extra SVD per view and iteration; when off the report's
        objective trace is empty.
    """
    data = _as_matrices(views) if views is not None else None
    kernel_mode = config.kernel is not None or (grams is not None and data is None)
    if kernel_mode and config.fidelity is Fidelity.EXACT:
        raise ConfigError("kernel mode is defined only for noisy fidelity")

    if kernel_mode:
        if grams is None:
            if data is None:
                raise ConfigError("kernel mode needs views or Gram matrices")
            grams = [g.K for g in build_grams(data, config.kernel)]
        grams = [np.asarray(getattr(g, "K", g), dtype=float) for g in grams]
        for G in grams:
            if G.ndim != 2 or G.shape[0] != G.shape[1]:
                raise ConfigError("Gram matrices must be square")
            if not np.allclose(G, G.T, rtol=0.0, atol=1e-8):
                raise ConfigError("Gram matrices must be symmetric")
        n_views, n = len(grams), grams[0].shape[0]
        if any(G.shape[0] != n for G in grams):
            raise ConfigError("Gram matrices disagree on N")
        systems = grams
    else:
        if data is None:
            raise ConfigError("linear modes need data matrices")
        n_views, n = len(data), data[0].shape[1]
        if any(X.shape[1] != n for X in data):
            raise ConfigError("views disagree on the number of points")
        systems = [X.T @ X for X in data]
    for M in systems:
        if not np.all(np.isfinite(M)):
            raise NonFinite("non-finite input to the solver")

    if config.mode is Mode.SINGLE and n_views != 1:
        raise ConfigError("single-view mode takes exactly one view")
    lambdas = config.lambdas(n_views)
    exact = config.fidelity is Fidelity.EXACT
    eps = config.tol
    centroid_mode = config.mode is Mode.CENTROID
    # a lone view is its own centroid: C* minimizes out and the coupling vanishes
    coupled = config.mode is not Mode.SINGLE and n_views > 1
    if centroid_mode and coupled and sum(lambdas) <= 0:
        raise AllZeroLambda("centroid mode needs at least one positive lambda")

    states = [AdmmViewState.zeros(n, data[v].shape[0] if exact else None)
              for v in range(n_views)]
    centroid = np.zeros((n, n)) if centroid_mode else None
    penalties = PenaltyState.from_config(config)

    residual_trace: List[tuple] = []
    objective_trace: List[float] = []
    converged = False
    it = 0
    for it in range(1, int(config.max_iters) + 1):
        prev_A = [s.A for s in states]
        snapshot = [s.C3 for s in states]
        for v, s in enumerate(states):
            if exact:
                s.A = update_a_exact(s, data[v], penalties, XtX=systems[v])
            else:
                s.A = update_a_noisy(s, systems[v], penalties)
            s.C1 = update_c1(s.A, s.L3, config.beta1, penalties.mu3)
            s.C2 = update_c2(s.A, s.L2, config.beta2, penalties.mu2)
            if not coupled:
                s.C3 = update_c3_pairwise(s.A, s.L4, [], 0.0, penalties.mu4)
            elif centroid_mode:
                s.C3 = update_c3_centroid(s.A, s.L4, centroid, lambdas[v], penalties.mu4)
            else:
                others = [snapshot[w] for w in range(n_views) if w != v]
                s.C3 = update_c3_pairwise(s.A, s.L4, others, lambdas[v], penalties.mu4)
            update_duals(s, data[v] if exact else None, penalties)
        penalties = penalty_step(penalties)
        if centroid_mode:
            if coupled:
                centroid = update_centroid([s.C3 for s in states], lambdas)
            else:
                centroid = states[0].C3.copy()

        ok, residuals = check_convergence(states, prev_A, eps)
        residual_trace.append(residuals)
        if not all(np.isfinite(r) for res in residuals for r in res):
            raise NonFinite(f"iterates diverged at iteration {it}")
        if track_objective:
            objective_trace.append(evaluate_objective(
                [s.C2 for s in states], config, centroid=centroid,
                data=None if kernel_mode else data,
                grams=systems if kernel_mode else None))
        if ok:
            converged = True
            break

    if not converged:
        log.warning("ADMM stopped at max_iters=%d without meeting epsilon=%g",
                    config.max_iters, eps)
    report = ConvergenceReport(converged=converged, iterations=it,
                               residual_trace=tuple(residual_trace),
                               objective_trace=tuple(objective_trace))
    return RepresentationResult(
        representations=tuple(s.C2 for s in states),
        report=report,
        centroid=centroid,
        consensus=tuple(s.C3 for s in states),
    )
