"""Command-line entry point: ``mlrssc {synth,fit,grid,bench,trace}``.

Structured records go to ``--out`` as one JSON object per line; a readable
table goes to standard output. Exit status is 0 on success, including runs
that hit the iteration cap, and 1 on any error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from typing import List, Optional

from .core import Fidelity, KernelKind, KernelSpec, Mode, MultiViewDataset, SolverConfig
from .data import concat_features, generate_synthetic, load_views, pca_reduce, save_views
from .errors import MLRSSCError
from .experiments import (DEFAULT_RESTARTS, GridSpec, bench, fit, format_table, grid_search,
                          table_row, trace)

log = logging.getLogger("mlrssc")


def _add_data_flags(p):
    g = p.add_argument_group("data")
    g.add_argument("--views", nargs="+", metavar="PATH", help="one feature file per view (rows are points)")
    g.add_argument("--labels", metavar="PATH", help="ground-truth labels, one integer per line")
    g.add_argument("--k", type=int, help="number of clusters (default: distinct labels)")
    g.add_argument("--synthetic", action="store_true", help="use the built-in two-view Gaussian mixture")
    g.add_argument("--pca", type=float, metavar="FRAC", help="PCA-reduce each view to this variance fraction")
    g.add_argument("--concat", action="store_true", help="concatenate all views into one (single-view baseline)")


def _add_solver_flags(p):
    g = p.add_argument_group("solver")
    g.add_argument("--mode", choices=[m.value for m in Mode], default="pairwise")
    g.add_argument("--fidelity", choices=["exact", "noisy", "kernel"], default="noisy")
    g.add_argument("--kernel", choices=[k.value for k in KernelKind], default="gaussian",
                   help="kernel family when --fidelity kernel")
    g.add_argument("--sigma-mult", type=float, nargs="+", default=[1.0],
                   help="Gaussian width multiplier, shared or one per view")
    g.add_argument("--beta1", type=float, default=0.5)
    g.add_argument("--beta2", type=float, help="default: 1 - beta1")
    g.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[0.5])
    g.add_argument("--mu", type=float, default=10.0)
    g.add_argument("--rho", type=float, help="default 1.5 (1.0 for --mode single)")
    g.add_argument("--mu-max", type=float, default=1e6)
    g.add_argument("--epsilon", type=float, help="default 1e-3 linear, 1e-5 kernel")
    g.add_argument("--max-iters", type=int, default=100)


def _add_run_flags(p):
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write line-delimited JSON records here")
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds in --out records")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlrssc", description="Multi-view low-rank sparse subspace clustering")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write the synthetic benchmark to disk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-points", type=int, default=1000)
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("fit", help="solve, cluster and score one configuration")
    _add_data_flags(p)
    _add_solver_flags(p)
    _add_run_flags(p)

    p = sub.add_parser("grid", help="exhaustive hyperparameter sweep")
    _add_data_flags(p)
    _add_solver_flags(p)
    _add_run_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--grid-beta1", type=float, nargs="+")
    p.add_argument("--grid-lambda", type=float, nargs="+")
    p.add_argument("--grid-mu", type=float, nargs="+")
    p.add_argument("--grid-sigma", type=float, nargs="*",
                   help="per-view width multipliers for the Gaussian second stage (empty disables it)")
    p.add_argument("--metric", default="nmi")

    p = sub.add_parser("bench", help="solver wall-clock versus problem size")
    _add_solver_flags(p)
    p.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 800])
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write the table as CSV")

    p = sub.add_parser("trace", help="per-iteration residual and objective traces")
    _add_data_flags(p)
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="write the trace as CSV (default: stdout)")
    return parser


def config_from_args(args) -> SolverConfig:
    kernel = None
    fidelity = Fidelity.NOISY
    if args.fidelity == "kernel":
        mult = args.sigma_mult[0] if len(args.sigma_mult) == 1 else tuple(args.sigma_mult)
        kernel = KernelSpec(KernelKind(args.kernel), mult)
    else:
        fidelity = Fidelity(args.fidelity)
    rho = args.rho
    if rho is None:
        rho = 1.0 if args.mode == Mode.SINGLE.value else 1.5
    lam = args.lam[0] if len(args.lam) == 1 else tuple(args.lam)
    beta2 = 1.0 - args.beta1 if args.beta2 is None else args.beta2
    return SolverConfig(beta1=args.beta1, beta2=beta2, lam=lam, mu_init=args.mu, rho=rho,
                        mu_max=args.mu_max, epsilon=args.epsilon, max_iters=args.max_iters,
                        fidelity=fidelity, mode=Mode(args.mode), kernel=kernel)


def dataset_from_args(args) -> MultiViewDataset:
    if args.synthetic:
        d = generate_synthetic(args.seed)
    elif args.views:
        # with labels, k is taken from them; --k then only sets the cluster count
        d = load_views(args.views, args.labels, k=None if args.labels else args.k)
    else:
        raise MLRSSCError("pass --views PATH... or --synthetic")
    if args.pca is not None:
        d = MultiViewDataset(views=tuple(pca_reduce(X, args.pca) for X in d.views),
                             labels=d.labels, k=d.k)
    if args.concat:
        d = concat_features(d)
    return d


def _write_records(path, records, include_timing):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(r.to_json(include_timing) + "\n")


def _summary(record) -> str:
    rep = record.report
    status = "converged" if rep.converged else "NOT converged"
    return f"{record.method}: {status} after {rep.iterations} iterations"


def cmd_synth(args) -> int:
    d = generate_synthetic(args.seed, n_points=args.n_points)
    paths, labels = save_views(d, args.out)
    for p in list(paths) + [labels]:
        print(p)
    return 0


def cmd_fit(args) -> int:
    d = dataset_from_args(args)
    config = config_from_args(args)
    record = fit(d, config, restarts=args.restarts, seed=args.seed, k=args.k)
    print(_summary(record))
    if record.metrics is not None:
        print(format_table([table_row(record)]))
    if args.out:
        _write_records(args.out, [record], args.timing)
    return 0


def cmd_grid(args) -> int:
    d = dataset_from_args(args)
    base = config_from_args(args)
    defaults = GridSpec()
    grid = GridSpec(
        beta1=tuple(args.grid_beta1 or defaults.beta1),
        lam=tuple(args.grid_lambda or defaults.lam),
        mu=tuple(args.grid_mu or defaults.mu),
        sigma=defaults.sigma if args.grid_sigma is None else tuple(args.grid_sigma),
        metric=args.metric,
    )
    result = grid_search(d, base, grid, restarts=args.restarts, seed=args.seed,
                         workers=args.workers, k=args.k)
    rows = result.table(grid.metric)
    cols = list(rows[0].keys())
    print(format_table([[_fmt(r[c]) for c in cols] for r in rows], header=cols))
    print()
    print(f"best grid point {result.best.point}")
    print(format_table([table_row(result.best)]))
    if args.out:
        _write_records(args.out, [result.best] + result.records, args.timing)
    return 0


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.4g}"
    if isinstance(x, (list, tuple)):
        return ",".join(_fmt(v) for v in x)
    return str(x)


def cmd_bench(args) -> int:
    config = config_from_args(args)
    rows = bench(args.sizes, repeats=args.repeats, seed=args.seed, config=config)
    header = ("N", "mean_seconds", "std_seconds", "repeats", "mean_iterations")
    table = [(r.n, f"{r.mean_seconds:.4f}", f"{r.std_seconds:.4f}", r.repeats, f"{r.mean_iterations:.1f}")
             for r in rows]
    print(format_table(table, header=header))
    print(f"(mean over n = {args.repeats} runs per size)")
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            w.writerows(table)
    return 0


def cmd_trace(args) -> int:
    d = dataset_from_args(args)
    report, rows = trace(d, config_from_args(args))
    if not rows:
        return 0
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


COMMANDS = {"synth": cmd_synth, "fit": cmd_fit, "grid": cmd_grid, "bench": cmd_bench, "trace": cmd_trace}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (MLRSSCError, ValueError, ArithmeticError, OSError) as exc:
        print(f"mlrssc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
