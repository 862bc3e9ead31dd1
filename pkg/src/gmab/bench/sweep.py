"""Full-factorial parameter sweeps: one experiment per (p_cr, p_mu, m) cell."""
from __future__ import annotations

import csv
import itertools
from dataclasses import replace
from typing import List, Optional, Sequence, TextIO

from .experiment import ExperimentConfig, final_gaps, mean_of, run_experiment

SWEEP_HEADER = ["p_cr", "p_mu", "m", "runs", "mean_gap", "mean_true_value", "mean_final_mean", "failed_runs", "error"]


def _mean_col(records, idx) -> Optional[float]:
    return mean_of([float(r.summary_row[idx]) if r.summary_row[idx] else None for r in records])


def sweep(base: ExperimentConfig, p_cr: Sequence[float], p_mu: Sequence[float], m: Sequence[int],
          out: Optional[TextIO] = None) -> List[dict]:
    """Run ``base`` once per grid cell; a failing cell is recorded and the sweep moves on."""
    if not (p_cr and p_mu and m):
        raise ValueError("sweep grid must be non-empty in every dimension")
    writer = None
    if out is not None:
        writer = csv.writer(out)
        writer.writerow(SWEEP_HEADER)
    rows = []
    for pc, pm, mm in itertools.product(p_cr, p_mu, m):
        row = {"p_cr": pc, "p_mu": pm, "m": mm, "runs": base.runs, "mean_gap": None,
               "mean_true_value": None, "mean_final_mean": None, "failed_runs": 0, "error": ""}
        try:
            cfg = replace(base, params=replace(base.params, p_cr=pc, p_mu=pm, m=mm))
            records = run_experiment(cfg)
            failed = [r for r in records if r.error]
            row.update(
                mean_gap=mean_of(final_gaps(records)),
                mean_true_value=_mean_col(records, 4),
                mean_final_mean=_mean_col(records, 2),
                failed_runs=len(failed),
                error=failed[0].error if failed else "",
            )
        except Exception as exc:
            row.update(failed_runs=base.runs, error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
        if writer is not None:
            writer.writerow(["" if row[k] is None else (repr(row[k]) if isinstance(row[k], float) else row[k])
                             for k in SWEEP_HEADER])
            out.flush()
    return rows
