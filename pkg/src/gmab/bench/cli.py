"""``gmab`` command line: run, sweep, aggregate, bench-runtime, fsc-compare.

Any option can also come from a flat ``key=value`` file given with
``--config``; keys are option names with or without the leading dashes
(``p-cr`` and ``p_cr`` both work). Command-line flags win over the file.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from typing import List, Optional

from ..core import ConfigurationError, GmabError, GmabParams, StoppingBudget
from .aggregate import DEFAULT_PERCENTILES, aggregate_file
from .experiment import ExperimentConfig, final_gaps, mean_of, run_experiment
from .fsc import fsc_compare
from .runtime import measure_iteration_runtime, median_near
from .sweep import sweep

DEFAULT_BUDGET = 10_000


def int_list(text: str) -> List[int]:
    return [int(v) for v in text.replace(";", ",").split(",") if v.strip()]


def float_list(text: str) -> List[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def read_config(path: str) -> dict:
    """Parse a ``key=value`` file; ``#`` starts a comment."""
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file with defaults for any option")
    p.add_argument("--problem", default="tp3", choices=["tp1", "tp3", "tp4", "external"])
    p.add_argument("--dims", type=int, help="dimension for tp4 (default 5)")
    p.add_argument("--noise-std", type=float, help="observation noise for tp3/tp4 (default 1)")
    p.add_argument("--external-cmd", help="command line of an external simulator")
    p.add_argument("--direction", choices=["minimize", "maximize"],
                   help="override the problem's optimization direction")
    p.add_argument("--m", type=int, default=20, help="elite set size (even)")
    p.add_argument("--p-cr", type=float, default=1.0, help="crossover probability")
    p.add_argument("--p-mu", type=float, default=0.25, help="per-component mutation probability")
    p.add_argument("--budget-reps", type=int, help=f"replication budget (default {DEFAULT_BUDGET} if no other limit)")
    p.add_argument("--budget-iters", type=int, help="iteration budget")
    p.add_argument("--budget-seconds", type=float, help="wall-clock budget")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed + i")
    p.add_argument("--fsc", default="1", choices=["1", "2", "3"], help="final selection criterion")
    p.add_argument("--checkpoints", type=int_list, help="comma-separated replication counts")
    p.add_argument("--truth", default="auto", choices=["auto", "analytic", "mc", "none"],
                   help="how true values are obtained")
    p.add_argument("--truth-reps", type=int, default=10_000, help="replications for Monte-Carlo truth")
    p.add_argument("--backend", default="auto", choices=["auto", "native", "python"])
    p.add_argument("--workers", type=int, default=1, help="parallel processes for independent runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmab", description="Genetic multi-armed bandit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="independent runs -> trace.csv and summary.csv")
    _add_problem_args(p)
    p.add_argument("--out", default="gmab_out", help="output directory")

    p = sub.add_parser("sweep", help="full-factorial sweep over p_cr, p_mu and m")
    _add_problem_args(p)
    p.add_argument("--grid-p-cr", type=float_list, help="comma list (default: --p-cr)")
    p.add_argument("--grid-p-mu", type=float_list, help="comma list (default: --p-mu)")
    p.add_argument("--grid-m", type=int_list, help="comma list (default: --m)")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("aggregate", help="percentile bands per checkpoint of a trace CSV")
    p.add_argument("trace", help="trace CSV written by 'run'")
    p.add_argument("--column", default="gap", choices=["gap", "true_value", "sample_mean"])
    p.add_argument("--percentiles", type=float_list, default=list(DEFAULT_PERCENTILES))
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("bench-runtime", help="per-iteration overhead with a constant-time objective")
    _add_problem_args(p)
    p.add_argument("--max-visited", type=int, help="stop once this many solutions are in memory")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("fsc-compare", help="the three final-selection criteria on identical runs")
    _add_problem_args(p)
    p.add_argument("--out", help="per-run CSV (default: none)")
    parser.subcommands = sub.choices
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config(args.config)
        sub = parser.subcommands[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known - {"config"})
        if unknown:
            parser.error(f"unknown keys in {args.config}: {', '.join(unknown)}")
        values.pop("config", None)
        sub.set_defaults(**values)  # string defaults go through each option's type
        args = parser.parse_args(argv)
    return args


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    reps, iters, secs = args.budget_reps, args.budget_iters, args.budget_seconds
    if reps is None and iters is None and secs is None:
        reps = DEFAULT_BUDGET
    params = GmabParams(
        m=args.m, p_cr=args.p_cr, p_mu=args.p_mu, seed=args.seed,
        budget=StoppingBudget(max_replications=reps, max_iterations=iters, max_wall_seconds=secs),
    )
    kwargs = {"direction": args.direction} if args.direction else {}
    return ExperimentConfig(
        problem=args.problem, problem_kwargs=kwargs, dims=args.dims, noise_std=args.noise_std,
        external_cmd=args.external_cmd, params=params, runs=args.runs, checkpoints=args.checkpoints,
        fsc="fsc" + args.fsc, base_seed=args.seed, truth=args.truth, truth_reps=args.truth_reps,
        backend=args.backend, workers=args.workers,
    )


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as f:
            yield f


def _fmt(v) -> str:
    return "n/a" if v is None else f"{v:.6g}"


def cmd_run(args) -> int:
    records = run_experiment(config_from_args(args), args.out)
    failed = sum(1 for r in records if r.error)
    print(f"{len(records)} runs, {failed} failed, mean final gap {_fmt(mean_of(final_gaps(records)))}; "
          f"wrote {args.out}/trace.csv and {args.out}/summary.csv")
    return 1 if failed else 0


def cmd_sweep(args) -> int:
    cfg = config_from_args(args)
    with _output(args.out) as out:
        rows = sweep(cfg, args.grid_p_cr or [cfg.params.p_cr], args.grid_p_mu or [cfg.params.p_mu],
                     args.grid_m or [cfg.params.m], out)
    return 1 if any(r["error"] for r in rows) else 0


def cmd_aggregate(args) -> int:
    with _output(args.out) as out:
        aggregate_file(args.trace, out, args.column, args.percentiles)
    return 0


def cmd_bench_runtime(args) -> int:
    cfg = config_from_args(args)
    iterations = args.budget_iters
    if iterations is None and args.max_visited is None:
        iterations = 100
    problem = cfg.build_problem()
    try:
        with _output(args.out) as out:
            rows = measure_iteration_runtime(problem, cfg.params, iterations, args.max_visited, cfg.backend, out)
    finally:
        close = getattr(problem, "close", None)
        if close is not None:
            close()
    if rows and args.out:
        last = rows[-1][1]
        print(f"{len(rows)} iterations, |V| = {last}, median seconds/iteration near |V|={last}: "
              f"{median_near(rows, last):.3g}")
    return 0


def cmd_fsc_compare(args) -> int:
    cfg = config_from_args(args)
    if args.out:
        with open(args.out, "w", newline="") as f:
            means = fsc_compare(cfg, f)
    else:
        means = fsc_compare(cfg)
    for name, value in means.items():
        print(f"{name}: mean gap {_fmt(value)}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "aggregate": cmd_aggregate,
    "bench-runtime": cmd_bench_runtime,
    "fsc-compare": cmd_fsc_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (GmabError, ValueError, OSError) as exc:
        print(f"gmab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
