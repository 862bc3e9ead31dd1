"""Per-checkpoint order statistics across runs of a trace CSV.

Percentiles use the nearest-rank definition: the ``p``-th percentile of
``n`` sorted values is the value at rank ``max(1, ceil(p / 100 * n))``.
No interpolation, so results are exact and reproducible.
"""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from typing import Dict, List, Sequence, TextIO

DEFAULT_PERCENTILES = (0, 5, 25, 50, 75, 95, 100)


class RaggedTraceError(ValueError):
    """Runs in a trace file do not share the same checkpoint grid."""


def nearest_rank(sorted_values: Sequence[float], p: float) -> float:
    if not sorted_values:
        raise ValueError("no values")
    if not 0 <= p <= 100:
        raise ValueError("percentile must lie in [0, 100]")
    rank = max(1, math.ceil(p / 100.0 * len(sorted_values)))
    return sorted_values[rank - 1]


def _read_trace(rows, column: str) -> Dict[int, Dict[int, float]]:
    by_cp: Dict[int, Dict[int, float]] = defaultdict(dict)
    for row in rows:
        text = row.get(column, "")
        if text == "":
            raise ValueError(f"empty {column!r} for run {row['run_id']} at {row['replications']}")
        by_cp[int(row["replications"])][int(row["run_id"])] = float(text)
    return by_cp


def aggregate_rows(rows, column: str = "gap", percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> List[dict]:
    """One band row per checkpoint: ``replications, runs, mean, p<q>...``."""
    by_cp = _read_trace(rows, column)
    if not by_cp:
        raise ValueError("trace holds no rows")
    run_sets = {cp: frozenset(v) for cp, v in by_cp.items()}
    if len(set(run_sets.values())) != 1:
        raise RaggedTraceError("runs were recorded at different checkpoints")
    out = []
    for cp in sorted(by_cp):
        values = sorted(by_cp[cp].values())
        band = {"replications": cp, "runs": len(values), "mean": math.fsum(values) / len(values)}
        for p in percentiles:
            band[f"p{p:g}"] = nearest_rank(values, p)
        out.append(band)
    return out


def aggregate_file(trace_path: str, out: TextIO, column: str = "gap",
                   percentiles: Sequence[float] = DEFAULT_PERCENTILES) -> List[dict]:
    with open(trace_path, newline="") as f:
        bands = aggregate_rows(csv.DictReader(f), column, percentiles)
    fields = ["replications", "runs", "mean"] + [f"p{p:g}" for p in percentiles]
    writer = csv.writer(out)
    writer.writerow(fields)
    for band in bands:
        writer.writerow([band["replications"], band["runs"]] + [repr(float(band[k])) for k in fields[2:]])
    return bands
