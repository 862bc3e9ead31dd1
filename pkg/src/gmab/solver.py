"""GMAB main loop: initialization, iterations until the budget is met, final selection."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .core import EvaluationError, GmabParams, Solution
from .engine import make_engine
from .rng import StreamSet
from .selection import get_selector


@dataclass(frozen=True)
class Checkpoint:
    """Incumbent recorded once cumulative replications first reach ``replications``.

    ``actual_replications`` is the total at that iteration boundary (it can
    exceed the grid value by less than ``2m``).
    """

    replications: int
    actual_replications: int
    iterations: int
    incumbent: Solution
    incumbent_mean: float
    incumbent_n: int
    true_value: Optional[float] = None


@dataclass
class RunTrace:
    checkpoints: List[Checkpoint] = field(default_factory=list)

    def append(self, cp: Checkpoint) -> None:
        if self.checkpoints and cp.replications <= self.checkpoints[-1].replications:
            raise ValueError("checkpoint replications must be strictly increasing")
        self.checkpoints.append(cp)

    def __iter__(self):
        return iter(self.checkpoints)

    def __len__(self):
        return len(self.checkpoints)


@dataclass
class RunResult:
    best: Solution
    best_mean: float  # in the problem's own direction
    best_n: int
    trace: RunTrace
    iterations: int
    replications: int
    wall_seconds: float
    visited: int = 0
    backend: str = ""
    true_value: Optional[float] = None


class RunAborted(EvaluationError):
    """An evaluation failed mid-run; ``partial`` holds the trace gathered so far."""

    def __init__(self, cause: EvaluationError, partial: RunResult):
        super().__init__(f"run aborted: {cause}", payload=cause.payload)
        self.cause = cause
        self.partial = partial


def _analytic_truth(problem) -> Callable[[Solution], Optional[float]]:
    fn = getattr(problem, "true_value", None)
    return fn if fn is not None else (lambda x: None)


def incumbent(engine, criterion="fsc1"):
    """(solution, mean in the engine's minimization frame, n) chosen by ``criterion``."""
    n = engine.counts()
    r = engine.sums()
    # an aborted iteration can leave offspring without observations
    observed = np.flatnonzero(n > 0)
    p = int(observed[get_selector(criterion)(n[observed], r[observed], engine.total_replications)])
    return engine.solution(p), float(r[p] / n[p]), int(n[p])


def initialize(problem, params: GmabParams, streams: Optional[StreamSet] = None, backend=None,
               memory: str = "tree", log: bool = False):
    """Fresh engine with the initial ``m`` solutions sampled and simulated once each."""
    streams = streams or StreamSet.from_seed(params.seed)
    engine = make_engine(problem, params, streams, backend=backend, memory=memory, log=log)
    engine.initialize()
    return engine


def iterate(engine) -> None:
    engine.iterate()


def run(
    problem,
    params: GmabParams,
    checkpoints: Optional[Sequence[int]] = None,
    fsc: str = "fsc1",
    backend: Optional[str] = None,
    noise_seed: Optional[int] = None,
    memory: str = "tree",
    log: bool = False,
    truth: Optional[Callable[[Solution], Optional[float]]] = None,
    on_checkpoint: Optional[Callable[[Checkpoint], None]] = None,
    engine_out: Optional[list] = None,
) -> RunResult:
    """Run GMAB on ``problem`` until ``params.budget`` is met.

    Stopping is checked only between iterations, so a replication budget ``B``
    ends with between ``B`` and ``B + 2m - 1`` replications. Checkpoint ``c``
    is recorded at the first iteration boundary where the total reaches ``c``;
    its incumbent comes from the same criterion as the final answer and never
    feeds back into the search. ``truth`` maps a solution to its true value
    (defaults to the problem's analytic ``true_value`` if it has one).
    """
    budget = params.budget
    sign = params.direction.sign
    truth = truth or _analytic_truth(problem)
    grid = sorted(set(int(c) for c in checkpoints or ()))
    if grid and grid[0] < 1:
        raise ValueError("checkpoints must be positive")
    get_selector(fsc)  # fail fast on a bad name

    start = time.monotonic()
    deadline = None if budget.max_wall_seconds is None else start + budget.max_wall_seconds
    streams = StreamSet.from_seed(params.seed, noise_seed)
    engine = make_engine(problem, params, streams, backend=backend, memory=memory, log=log)
    if engine_out is not None:
        engine_out.append(engine)
    trace = RunTrace()
    pending = iter(grid)
    next_cp = next(pending, None)

    def record_checkpoints():
        nonlocal next_cp
        while next_cp is not None and engine.total_replications >= next_cp:
            x, mean, n = incumbent(engine, fsc)
            cp = Checkpoint(next_cp, engine.total_replications, engine.iterations, x, sign * mean, n, truth(x))
            trace.append(cp)
            if on_checkpoint is not None:
                on_checkpoint(cp)
            next_cp = next(pending, None)

    def result() -> RunResult:
        if engine.total_replications == 0:
            best, mean, n = None, math.nan, 0
        else:
            best, mean, n = incumbent(engine, fsc)
            mean *= sign
        return RunResult(
            best=best, best_mean=mean, best_n=n, trace=trace, iterations=engine.iterations,
            replications=engine.total_replications, wall_seconds=time.monotonic() - start,
            visited=engine.size, backend=engine.backend,
            true_value=truth(best) if best is not None else None,
        )

    try:
        engine.initialize()
        record_checkpoints()
        while True:
            if budget.max_replications is not None and engine.total_replications >= budget.max_replications:
                break
            if budget.max_iterations is not None and engine.iterations >= budget.max_iterations:
                break
            if deadline is not None and time.monotonic() >= deadline:
                break
            if next_cp is None:
                # nothing to record in between: let the engine loop on its own
                engine.advance(budget.max_replications, budget.max_iterations, deadline)
                continue
            engine.iterate()
            record_checkpoints()
    except EvaluationError as exc:
        raise RunAborted(exc, result()) from exc
    return result()


__all__ = ["Checkpoint", "RunAborted", "RunResult", "RunTrace", "incumbent", "initialize", "iterate", "run"]
