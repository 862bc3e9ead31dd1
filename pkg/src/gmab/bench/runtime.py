"""Per-iteration algorithm overhead as a function of memory size.

The objective is swapped for constant-time Normal noise on the same search
space, so the timings measure memory management and genetic operators only.
"""
from __future__ import annotations

import csv
import time
from typing import List, Optional, TextIO, Tuple

from ..core import GmabParams
from ..engine import make_engine
from ..problems import NoiseStub
from ..rng import StreamSet

RUNTIME_HEADER = ["iteration", "visited", "seconds"]


def measure_iteration_runtime(problem, params: GmabParams, iterations: Optional[int] = None,
                              max_visited: Optional[int] = None, backend: Optional[str] = None,
                              out: Optional[TextIO] = None) -> List[Tuple[int, int, float]]:
    """Time each iteration; rows are ``(k, |V_k| after the iteration, seconds)``.

    Stops after ``iterations`` iterations or once ``max_visited`` solutions
    are in memory, whichever comes first (at least one must be given).
    """
    if iterations is None and max_visited is None:
        raise ValueError("give iterations and/or max_visited")
    stub = NoiseStub(problem.space)
    engine = make_engine(stub, params, StreamSet.from_seed(params.seed), backend=backend)
    engine.initialize()
    clock = time.perf_counter
    rows = []
    while True:
        if iterations is not None and len(rows) >= iterations:
            break
        if max_visited is not None and engine.size >= max_visited:
            break
        t0 = clock()
        engine.iterate()
        rows.append((engine.iterations, engine.size, clock() - t0))
    if out is not None:
        writer = csv.writer(out)
        writer.writerow(RUNTIME_HEADER)
        writer.writerows((k, v, f"{s:.9f}") for k, v, s in rows)
    return rows


def median_near(rows, visited: int, window: int = 200) -> float:
    """Median iteration time over the ``window`` iterations closest to a memory size."""
    if not rows:
        raise ValueError("no timings")
    ranked = sorted(rows, key=lambda r: abs(r[1] - visited))[:window]
    times = sorted(r[2] for r in ranked)
    return times[len(times) // 2]
