"""Multi-run experiments written as trace and summary CSV files.

Trace CSV, one row per (run, checkpoint):
    run_id,replications,x_coords,sample_mean,true_value,gap
Summary CSV, one row per run:
    run_id,final_x,final_mean,final_n,true_value,gap,iterations,replications,wall_seconds

Coordinates are joined with ``;``. Floats are written with ``repr`` so they
round-trip exactly; a missing value is an empty field. ``gap`` is
``true_value - optimum`` measured in the direction of improvement, so it is
non-negative whenever the optimum is exact.
"""
from __future__ import annotations

import csv
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from ..core import Direction, GmabParams, Solution
from ..problems import ground_truth, make_problem
from ..solver import RunAborted, RunResult, run

log = logging.getLogger(__name__)

TRACE_HEADER = ["run_id", "replications", "x_coords", "sample_mean", "true_value", "gap"]
SUMMARY_HEADER = ["run_id", "final_x", "final_mean", "final_n", "true_value", "gap",
                  "iterations", "replications", "wall_seconds"]
TRUTH_MODES = ("auto", "analytic", "mc", "none")
# seed of the ground-truth stream; any fixed value keeps reruns identical
TRUTH_SEED = 20_240_101


def default_checkpoints(budget: int, start: int = 50) -> List[int]:
    """1-2-5 geometric grid from ``start`` up to ``budget``, ending at ``budget``."""
    grid = []
    scale = 1
    while True:
        for mult in (1, 2, 5):
            c = mult * scale
            if start <= c < budget:
                grid.append(c)
        if scale > budget:
            break
        scale *= 10
    grid.append(budget)
    return grid


@dataclass
class ExperimentConfig:
    problem: str = "tp3"
    problem_kwargs: Dict[str, object] = field(default_factory=dict)
    dims: Optional[int] = None
    noise_std: Optional[float] = None
    external_cmd: Optional[str] = None
    params: GmabParams = field(default_factory=GmabParams)
    runs: int = 1
    checkpoints: Optional[List[int]] = None
    fsc: str = "fsc1"
    base_seed: int = 0
    truth: str = "auto"
    truth_reps: int = 10_000
    backend: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.truth not in TRUTH_MODES:
            raise ValueError(f"truth must be one of {TRUTH_MODES}")
        if self.truth_reps < 1:
            raise ValueError("truth_reps must be >= 1")
        if self.checkpoints is not None:
            cps = list(self.checkpoints)
            if any(b <= a for a, b in zip(cps, cps[1:])) or (cps and cps[0] < 1):
                raise ValueError("checkpoint grid must be positive and strictly increasing")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def build_problem(self):
        return make_problem(self.problem, dims=self.dims, noise_std=self.noise_std,
                            external_cmd=self.external_cmd, **self.problem_kwargs)

    def grid(self) -> List[int]:
        if self.checkpoints is not None:
            return list(self.checkpoints)
        budget = self.params.budget.max_replications
        return default_checkpoints(budget) if budget is not None else []


@dataclass
class RunRecord:
    """Everything written for one run."""

    run_id: int
    trace_rows: List[List[str]]
    summary_row: List[str]
    result: Optional[RunResult]
    error: Optional[str] = None


def fmt_float(v: Optional[float]) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def fmt_x(x: Optional[Sequence[int]]) -> str:
    return "" if x is None else ";".join(str(int(v)) for v in x)


class TruthOracle:
    """Memoized true objective values and gaps for one problem."""

    def __init__(self, problem, mode: str = "auto", reps: int = 10_000, seed: int = TRUTH_SEED):
        self.problem = problem
        self.mode = mode
        self.reps = reps
        self.seed = seed
        self.sign = Direction(getattr(problem, "direction", Direction.MINIMIZE)).sign
        self.optimum = getattr(problem, "optimum", None)
        self._cache: Dict[Solution, Optional[float]] = {}

    def __call__(self, x: Solution) -> Optional[float]:
        if self.mode == "none" or x is None:
            return None
        x = tuple(x)
        if x not in self._cache:
            self._cache[x] = ground_truth(self.problem, x, self.reps, self.seed, self.mode)
        return self._cache[x]

    def gap(self, value: Optional[float]) -> Optional[float]:
        if value is None or self.optimum is None:
            return None
        return self.sign * (value - self.optimum)


def run_single(cfg: ExperimentConfig, run_id: int) -> RunRecord:
    """Execute run ``run_id`` (seed ``base_seed + run_id``) and format its rows."""
    problem = cfg.build_problem()
    try:
        oracle = TruthOracle(problem, cfg.truth, cfg.truth_reps)
        params = replace(cfg.params, seed=cfg.base_seed + run_id, direction=problem.direction)
        error = None
        try:
            result = run(problem, params, checkpoints=cfg.grid(), fsc=cfg.fsc, backend=cfg.backend, truth=oracle)
        except RunAborted as exc:
            result, error = exc.partial, str(exc)
        trace_rows = [
            [str(run_id), str(cp.replications), fmt_x(cp.incumbent), fmt_float(cp.incumbent_mean),
             fmt_float(cp.true_value), fmt_float(oracle.gap(cp.true_value))]
            for cp in result.trace
        ]
        summary = [
            str(run_id), fmt_x(result.best), fmt_float(result.best_mean), str(result.best_n),
            fmt_float(result.true_value), fmt_float(oracle.gap(result.true_value)),
            str(result.iterations), str(result.replications), f"{result.wall_seconds:.6f}",
        ]
        return RunRecord(run_id, trace_rows, summary, result, error)
    finally:
        close = getattr(problem, "close", None)
        if close is not None:
            close()


def _safe_run(args) -> RunRecord:
    cfg, run_id = args
    try:
        return run_single(cfg, run_id)
    except Exception as exc:  # reported per run, the experiment carries on
        empty = [str(run_id)] + [""] * (len(SUMMARY_HEADER) - 1)
        return RunRecord(run_id, [], empty, None, f"{type(exc).__name__}: {exc}")


def iter_runs(cfg: ExperimentConfig):
    """Yield run records in run order; with ``workers > 1`` runs execute in subprocesses."""
    jobs = [(cfg, i) for i in range(cfg.runs)]
    if cfg.workers == 1 or cfg.runs == 1:
        for job in jobs:
            yield _safe_run(job)
        return
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        yield from pool.map(_safe_run, jobs)


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None,
                   trace_name: str = "trace.csv", summary_name: str = "summary.csv") -> List[RunRecord]:
    """Run all configured runs, streaming rows to ``out_dir`` (if given) as each run finishes."""
    records = []
    trace_f = summary_f = None
    try:
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            trace_f = open(os.path.join(out_dir, trace_name), "w", newline="")
            summary_f = open(os.path.join(out_dir, summary_name), "w", newline="")
            trace_w, summary_w = csv.writer(trace_f), csv.writer(summary_f)
            trace_w.writerow(TRACE_HEADER)
            summary_w.writerow(SUMMARY_HEADER)
        for rec in iter_runs(cfg):
            records.append(rec)
            if rec.error:
                log.error("run %d failed: %s", rec.run_id, rec.error)
                print(f"run {rec.run_id} failed: {rec.error}", file=sys.stderr)
            if trace_f is not None:
                trace_w.writerows(rec.trace_rows)
                summary_w.writerow(rec.summary_row)
                trace_f.flush()
                summary_f.flush()
    finally:
        for f in (trace_f, summary_f):
            if f is not None:
                f.close()
    return records


def final_gaps(records: Sequence[RunRecord]) -> List[Optional[float]]:
    return [float(r.summary_row[5]) if r.summary_row[5] else None for r in records]


def mean_of(values: Sequence[Optional[float]]) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None

