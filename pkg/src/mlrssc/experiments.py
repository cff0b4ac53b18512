"""Experiment harness: fit, grid search, timing and convergence traces.

Everything here works on in-memory datasets; the CLI only parses flags,
loads files and formats output.
"""
from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .admm import solve
from .core import (ConvergenceReport, Fidelity, KernelKind, KernelSpec, Mode,
                   MultiViewDataset, RepresentationResult, SolverConfig)
from .data import generate_synthetic
from .metrics import METRIC_NAMES, MetricSummary, metric_report
from .spectral import (affinity_from_representation, average_representations,
                       spectral_clustering)

DEFAULT_RESTARTS = 20


# ------------------------------------------------------------------ config I/O

def config_to_dict(config: SolverConfig) -> dict:
    d = asdict(config)
    d["fidelity"] = config.fidelity.value
    d["mode"] = config.mode.value
    d["lam"] = list(config.lam) if isinstance(config.lam, tuple) else config.lam
    if config.kernel is not None:
        m = config.kernel.sigma_multiplier
        d["kernel"] = {"kind": config.kernel.kind.value,
                       "sigma_multiplier": list(m) if isinstance(m, tuple) else m}
    return d


def config_from_dict(d: dict) -> SolverConfig:
    d = dict(d)
    if d.get("kernel") is not None:
        d["kernel"] = KernelSpec(**d["kernel"])
    return SolverConfig(**d)


def method_name(config: SolverConfig) -> str:
    prefix = {Mode.SINGLE: "Single-view", Mode.PAIRWISE: "Pairwise",
              Mode.CENTROID: "Centroid"}[config.mode]
    core = "LRSSC" if config.mode is Mode.SINGLE else "MLRSSC"
    return f"{prefix} {'K' if config.kernel is not None else ''}{core}"


# ------------------------------------------------------------------ records

@dataclass
class RunRecord:
    """Outcome of one solve + spectral clustering run."""

    method: str
    config: dict
    report: ConvergenceReport
    labels: List[int]
    seconds: float
    metrics: Optional[dict] = None
    point: int = 0

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {"method": self.method, "point": self.point, "config": self.config,
             "report": self.report.to_dict(), "metrics": self.metrics,
             "labels": list(self.labels)}
        if include_timing:
            d["seconds"] = self.seconds
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(method=d["method"], config=d["config"],
                   report=ConvergenceReport.from_dict(d["report"]),
                   labels=[int(x) for x in d["labels"]], seconds=float(d.get("seconds", 0.0)),
                   metrics=d.get("metrics"), point=int(d.get("point", 0)))

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls.from_dict(json.loads(line))

    def metric_mean(self, name: str) -> float:
        if self.metrics is None:
            return float("nan")
        return float(self.metrics["mean"][name])


def joint_representation(result: RepresentationResult) -> np.ndarray:
    """Centroid when available, otherwise the element-wise view average."""
    if result.centroid is not None:
        return result.centroid
    return average_representations(result.representations)


def fit(dataset: MultiViewDataset, config: SolverConfig, restarts: int = DEFAULT_RESTARTS,
        seed: int = 0, point: int = 0, track_objective: bool = False,
        k: Optional[int] = None) -> RunRecord:
    """Solve, build the affinity, cluster with ``restarts`` k-means runs and score.

    ``k`` overrides the dataset's cluster count for clustering only, so
    labelled data can still be scored against a different partition size.
    """
    t0 = time.perf_counter()
    result = solve(dataset.views, config, track_objective=track_objective)
    seconds = time.perf_counter() - t0
    W = affinity_from_representation(joint_representation(result))
    runs = spectral_clustering(W, dataset.k if k is None else k, restarts=restarts, seed=(seed, point))
    best = min(runs, key=lambda a: a.inertia)
    metrics = None
    if dataset.labels is not None:
        metrics = metric_report(dataset.labels, runs).to_dict()
    return RunRecord(method=method_name(config), config=config_to_dict(config),
                     report=result.report, labels=best.labels.tolist(), seconds=seconds,
                     metrics=metrics, point=point)


# ------------------------------------------------------------------ grid search

@dataclass(frozen=True)
class GridSpec:
    beta1: Tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    lam: Tuple[float, ...] = (0.3, 0.5, 0.7, 0.9)
    mu: Tuple[float, ...] = (10.0, 1e2, 1e3, 1e4)
    sigma: Tuple[float, ...] = (0.5, 1.0, 5.0, 10.0, 50.0)
    metric: str = "nmi"

    def __post_init__(self):
        for name in ("beta1", "lam", "mu"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"grid for {name} is empty")
        if any(not 0 <= b <= 1 for b in self.beta1):
            raise ValueError("beta1 values must lie in [0, 1] since beta2 = 1 - beta1")
        if self.metric not in METRIC_NAMES:
            raise ValueError(f"unknown selection metric {self.metric!r}")


def main_grid(base: SolverConfig, grid: GridSpec) -> List[SolverConfig]:
    """Cartesian sweep over (beta1, lambda, mu) with ``beta2 = 1 - beta1``."""
    lams = grid.lam if base.mode is not Mode.SINGLE else (base.lam,)
    # rounding keeps 1 - 0.7 from printing as 0.30000000000000004
    return [replace(base, beta1=b1, beta2=round(1.0 - b1, 12), lam=lam, mu_init=mu)
            for b1, lam, mu in itertools.product(grid.beta1, lams, grid.mu)]


def sigma_grid(best: SolverConfig, grid: GridSpec, n_views: int) -> List[SolverConfig]:
    """Per-view Gaussian width multipliers with every other parameter held fixed."""
    return [replace(best, kernel=KernelSpec(KernelKind.GAUSSIAN, combo))
            for combo in itertools.product(grid.sigma, repeat=n_views)]


def _fit_task(args):
    dataset, config, restarts, seed, point, k = args
    return fit(dataset, config, restarts=restarts, seed=seed, point=point, k=k)


def _run_all(dataset, configs, restarts, seed, first_point, workers, k=None):
    tasks = [(dataset, c, restarts, seed, first_point + i, k) for i, c in enumerate(configs)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_fit_task, tasks))
    return [_fit_task(t) for t in tasks]


def _select(records: Sequence[RunRecord], metric: str) -> RunRecord:
    best = records[0]
    for r in records[1:]:
        # strict: ties keep the earlier grid point
        if r.metric_mean(metric) > best.metric_mean(metric):
            best = r
    return best


@dataclass
class GridResult:
    best: RunRecord
    records: List[RunRecord] = field(default_factory=list)

    def table(self, metric: str = "nmi") -> List[dict]:
        rows = []
        for r in self.records:
            c = r.config
            kernel = c.get("kernel") or {}
            rows.append({"point": r.point, "beta1": c["beta1"], "beta2": c["beta2"],
                         "lambda": c["lam"], "mu": c["mu_init"],
                         "sigma_mult": kernel.get("sigma_multiplier"),
                         "iterations": r.report.iterations, "converged": r.report.converged,
                         metric: r.metric_mean(metric)})
        return rows


def grid_search(dataset: MultiViewDataset, base: SolverConfig, grid: GridSpec = GridSpec(),
                restarts: int = DEFAULT_RESTARTS, seed: int = 0, workers: int = 1,
                tune_sigma: bool = True, k: Optional[int] = None) -> GridResult:
    """Exhaustive sweep, selecting the point with the best mean ``grid.metric``.

    Gaussian-kernel runs add a second stage: with the best (beta1, lambda,
    mu) fixed, the width multiplier of every view is swept over
    ``grid.sigma``. The penalty restarts from ``mu_init`` at every point.
    """
    if dataset.labels is None:
        raise ValueError("grid search needs ground-truth labels to select a point")
    configs = main_grid(base, grid)
    records = _run_all(dataset, configs, restarts, seed, 0, workers, k)
    best = _select(records, grid.metric)
    gaussian = base.kernel is not None and base.kernel.kind is KernelKind.GAUSSIAN
    if gaussian and tune_sigma and grid.sigma:
        stage2 = sigma_grid(config_from_dict(best.config), grid, dataset.n_views)
        more = _run_all(dataset, stage2, restarts, seed, len(records), workers, k)
        records += more
        best = _select([best] + more, grid.metric)
    return GridResult(best=best, records=records)


# ------------------------------------------------------------------ timing

@dataclass(frozen=True)
class BenchRow:
    n: int
    mean_seconds: float
    std_seconds: float
    repeats: int
    mean_iterations: float


def bench(sizes: Sequence[int], repeats: int = 10, seed: int = 0,
          config: Optional[SolverConfig] = None) -> List[BenchRow]:
    """Mean solver wall-clock per problem size on subsampled synthetic data."""
    sizes = [int(n) for n in sizes]
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    config = config or SolverConfig()
    pool = generate_synthetic(seed, n_points=max(1000, max(sizes)))
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        times, iters = [], []
        for _ in range(repeats):
            idx = np.sort(rng.choice(pool.n_points, size=n, replace=False))
            views = [X[:, idx] for X in pool.views]
            t0 = time.perf_counter()
            res = solve(views, config, track_objective=False)
            times.append(time.perf_counter() - t0)
            iters.append(res.report.iterations)
        rows.append(BenchRow(n=n, mean_seconds=float(np.mean(times)),
                             std_seconds=float(np.std(times)), repeats=repeats,
                             mean_iterations=float(np.mean(iters))))
    return rows


# ------------------------------------------------------------------ traces

def trace_rows(report: ConvergenceReport) -> List[dict]:
    """Per-iteration residual sums and objective values.

    A view's error at an iteration is the largest of its four residuals.
    ``residual_sum`` adds these over views; ``normalized_sum`` first divides
    each view's error by its value at the first iteration.
    """
    if not report.residual_trace:
        return []
    first = [max(r) for r in report.residual_trace[0]]
    rows = []
    for i, row in enumerate(report.residual_trace):
        errs = [max(r) for r in row]
        norm = sum(e / f if f > 0 else 0.0 for e, f in zip(errs, first))
        out = {"iteration": i + 1, "residual_sum": float(sum(errs)),
               "normalized_sum": float(norm)}
        for v, r in enumerate(row):
            out.update({f"v{v + 1}_a_c1": r[0], f"v{v + 1}_a_c2": r[1],
                        f"v{v + 1}_a_c3": r[2], f"v{v + 1}_a_step": r[3]})
        if report.objective_trace:
            out["objective"] = report.objective_trace[i]
        rows.append(out)
    return rows


def trace(dataset: MultiViewDataset, config: SolverConfig) -> Tuple[ConvergenceReport, List[dict]]:
    result = solve(dataset.views, config, track_objective=True)
    return result.report, trace_rows(result.report)


# ------------------------------------------------------------------ reporting

TABLE_HEADER = ("Method", "F-score", "Precision", "Recall", "NMI", "Adj-RI")


def table_row(record: RunRecord) -> Tuple[str, ...]:
    if record.metrics is None:
        return (record.method,) + ("-",) * 5
    f = MetricSummary(mean=record.metrics["mean"], std=record.metrics["std"],
                      runs=record.metrics["runs"]).formatted()
    return (record.method, f["fscore"], f["precision"], f["recall"], f["nmi"], f["ari"])


def format_table(rows: Sequence[Sequence[str]], header: Sequence[str] = TABLE_HEADER) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    line = lambda cells: " | ".join(c.ljust(w) for c, w in zip(cells, widths))  # noqa: E731
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), sep] + [line(r) for r in rows])
