"""Compare the compiled and pure-Python engines on identical runs.

    python benchmarks/bench_backends.py [--budget 20000] [--repeat 3]

For each problem both engines run the same seeds; the script checks that the
final memories agree exactly and prints the best wall time of each engine.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gmab import GmabParams, StoppingBudget, run
from gmab.engine import NATIVE_AVAILABLE
from gmab.problems import InventoryProblem, MultimodalProblem, NoiseStub, SumOfHumpsProblem
from gmab.core import SearchSpace


def timed_run(problem, params, backend):
    engines = []
    t0 = time.perf_counter()
    run(problem, params, backend=backend, engine_out=engines)
    return time.perf_counter() - t0, engines[0]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not NATIVE_AVAILABLE:
        raise SystemExit("compiled engine not built; run `pip install -e . --no-build-isolation`")

    problems = [
        ("tp1", InventoryProblem(), 20),
        ("tp3", MultimodalProblem(), 20),
        ("tp4_d05", SumOfHumpsProblem(dims=5), 50),
        ("tp4_d20", SumOfHumpsProblem(dims=20), 100),
        ("stub_d10", NoiseStub(SearchSpace.box(-100, 100, 10)), 20),
    ]
    print(f"{'problem':<10} {'python s':>10} {'native s':>10} {'speedup':>8}  identical")
    for name, problem, m in problems:
        params = GmabParams(m=m, seed=args.seed, budget=StoppingBudget(max_replications=args.budget))
        best = {}
        engines = {}
        for backend in ("python", "native"):
            times = []
            for _ in range(args.repeat):
                dt, engines[backend] = timed_run(problem, params, backend)
                times.append(dt)
            best[backend] = min(times)
        a, b = engines["python"], engines["native"]
        same = (np.array_equal(a.counts(), b.counts()) and np.array_equal(a.sums(), b.sums())
                and np.array_equal(a.coords(), b.coords()))
        print(f"{name:<10} {best['python']:>10.4f} {best['native']:>10.4f} "
              f"{best['python'] / best['native']:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
