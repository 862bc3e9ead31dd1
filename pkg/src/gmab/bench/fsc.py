"""Compare the three final-selection criteria on identical runs.

The search never looks at the final-selection rule, so each run is executed
once and all criteria are applied to the same final memory.
"""
from __future__ import annotations

import csv
from dataclasses import replace
from typing import Dict, List, Optional, TextIO

from ..solver import run
from ..selection import SELECTORS
from .experiment import ExperimentConfig, TruthOracle, fmt_float, fmt_x, mean_of

FSC_HEADER = ["run_id", "criterion", "x", "sample_mean", "n", "true_value", "gap"]


def fsc_compare(cfg: ExperimentConfig, out: Optional[TextIO] = None) -> Dict[str, Optional[float]]:
    """Mean gap per criterion over ``cfg.runs`` runs; optionally write per-run rows."""
    writer = None
    if out is not None:
        writer = csv.writer(out)
        writer.writerow(FSC_HEADER)
    gaps: Dict[str, List[Optional[float]]] = {name: [] for name in SELECTORS}
    for i in range(cfg.runs):
        problem = cfg.build_problem()
        try:
            oracle = TruthOracle(problem, cfg.truth, cfg.truth_reps)
            params = replace(cfg.params, seed=cfg.base_seed + i, direction=problem.direction)
            engines = []
            run(problem, params, backend=cfg.backend, engine_out=engines)
            engine = engines[0]
            n, r = engine.counts(), engine.sums()
            for name, selector in SELECTORS.items():
                p = selector(n, r, engine.total_replications)
                x = engine.solution(p)
                truth = oracle(x)
                gap = oracle.gap(truth)
                gaps[name].append(gap)
                if writer is not None:
                    writer.writerow([i, name, fmt_x(x), fmt_float(params.direction.sign * r[p] / n[p]), int(n[p]),
                                     fmt_float(truth), fmt_float(gap)])
        finally:
            close = getattr(problem, "close", None)
            if close is not None:
                close()
    return {name: mean_of(values) for name, values in gaps.items()}
