"""Final selection over the full memory.

All functions work on the engine's minimization frame: ``n`` replication
counts and ``r`` observation sums, indexed by position code.
"""
from __future__ import annotations

import math
from typing import List, Sequence, Tuple

import numpy as np


def confidence_radius(total_n: int, n_x: int) -> float:
    """Hoeffding radius with ``delta = total_n**-4``: ``sqrt(2 ln(total_n) / n_x)``."""
    if not total_n >= n_x >= 1:
        raise ValueError("need total_n >= n_x >= 1")
    return math.sqrt(2.0 * math.log(total_n) / n_x)


def normalize_means(entries: Sequence[Tuple[int, float]]) -> List[Tuple[int, float]]:
    """Scale means linearly onto [0, 1]; all zeros when they coincide."""
    if len(entries) < 2:
        raise ValueError("need at least two entries")
    means = [mean for _, mean in entries]
    best, worst = min(means), max(means)
    if worst == best:
        return [(p, 0.0) for p, _ in entries]
    return [(p, (mean - best) / (worst - best)) for p, mean in entries]


def _means(n: np.ndarray, r: np.ndarray) -> np.ndarray:
    if n.size == 0:
        raise ValueError("memory is empty")
    if np.any(n < 1):
        raise ValueError("every record needs at least one observation")
    return r / n


def most_replicated(n: np.ndarray, r: np.ndarray) -> int:
    """Largest ``n``; ties to the better mean, then the lower position."""
    means = _means(n, r)
    cand = np.flatnonzero(n == n.max())
    return int(cand[np.argmin(means[cand])])  # argmin returns the first, i.e. lowest position


def fsc1(n: np.ndarray, r: np.ndarray, total: int | None = None) -> int:
    """Pessimistic UCB among solutions whose mean is no worse than the most replicated one's."""
    n = np.asarray(n, dtype=np.int64)
    r = np.asarray(r, dtype=np.float64)
    means = _means(n, r)
    if total is None:
        total = int(n.sum())
    z = most_replicated(n, r)
    members = np.flatnonzero(means <= means[z])
    if members.size == 1:
        return int(members[0])
    jm = means[members]
    best, worst = jm.min(), jm.max()
    scaled = np.zeros_like(jm) if worst == best else (jm - best) / (worst - best)
    radius = np.sqrt(2.0 * math.log(total) / n[members])
    return int(members[np.argmin(scaled + radius)])


def fsc2(n: np.ndarray, r: np.ndarray, total: int | None = None) -> int:
    """Best sample mean; ties to larger ``n``, then lower position."""
    n = np.asarray(n, dtype=np.int64)
    means = _means(n, np.asarray(r, dtype=np.float64))
    cand = np.flatnonzero(means == means.min())
    return int(cand[np.argmax(n[cand])])


def fsc3(n: np.ndarray, r: np.ndarray, total: int | None = None) -> int:
    """Most replications; ties to the better mean, then lower position."""
    return most_replicated(np.asarray(n, dtype=np.int64), np.asarray(r, dtype=np.float64))


SELECTORS = {"fsc1": fsc1, "fsc2": fsc2, "fsc3": fsc3}


def get_selector(name):
    key = str(name).lower()
    if key in ("1", "2", "3"):
        key = "fsc" + key
    try:
        return SELECTORS[key]
    except KeyError:
        raise ValueError(f"unknown final selection criterion {name!r}") from None


def select(memory, criterion="fsc1", total: int | None = None) -> int:
    """Apply a criterion to anything exposing ``counts()`` and ``sums()``."""
    return get_selector(criterion)(memory.counts(), memory.sums(), total)
