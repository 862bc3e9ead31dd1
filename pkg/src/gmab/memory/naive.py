"""Linear-scan reference memory.

Same contract as MemoryStore, implemented with flat lists only. It is the
oracle the tree-backed store is checked against.
"""
from __future__ import annotations

from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..core import SearchSpace, Solution, validate, ConfigurationError
from .store import SolutionRecord, select_with_ties


class NaiveMemory:
    def __init__(self, space: SearchSpace):
        self.space = space
        self.solutions: List[Solution] = []
        self.n: List[int] = []
        self.r: List[float] = []
        self.active: List[bool] = []  # True while the entry competes for elite selection
        self.cache: List[int] = []

    def __len__(self):
        return len(self.solutions)

    def lookup_or_insert(self, x: Sequence[int]) -> Tuple[int, bool]:
        x = tuple(x)
        if not validate(self.space, x):
            raise ConfigurationError(f"{x} is outside the search space")
        for p, s in enumerate(self.solutions):
            if s == x:
                return p, False
        self.solutions.append(x)
        self.n.append(0)
        self.r.append(0.0)
        self.active.append(False)
        return len(self.solutions) - 1, True

    def position(self, x):
        x = tuple(x)
        for p, s in enumerate(self.solutions):
            if s == x:
                return p
        return None

    def extract_best_m(self, m: int, rng) -> List[int]:
        keys = sorted((self.r[p] / self.n[p], p) for p in range(len(self.solutions)) if self.active[p])
        if len(keys) < m:
            raise ValueError(f"only {len(keys)} solutions available, need {m}")
        if self.cache:
            raise ValueError("cache must be cleared before selecting elites")
        boundary = keys[m - 1][0]
        extra = [k for k in keys[m:] if k[0] == boundary]
        positions = [p for _, p in select_with_ties(keys[:m], m, rng, extra)]
        for p in positions:
            self.active[p] = False
        self.cache.extend(positions)
        return positions

    def record_observation(self, p: int, value: float) -> float:
        self.n[p] += 1
        self.r[p] += value
        self.active[p] = True
        return self.r[p] / self.n[p]

    def clear_cache(self) -> None:
        self.cache.clear()

    def record(self, p: int) -> SolutionRecord:
        return SolutionRecord(self.solutions[p], self.n[p], self.r[p])

    def all_records(self) -> Iterator[Tuple[int, SolutionRecord]]:
        for p in range(len(self.solutions)):
            yield p, self.record(p)

    def counts(self) -> np.ndarray:
        return np.asarray(self.n, dtype=np.int64)

    def sums(self) -> np.ndarray:
        return np.asarray(self.r, dtype=np.float64)

    def coords(self) -> np.ndarray:
        return np.asarray(self.solutions, dtype=np.int64).reshape(len(self.solutions), self.space.dims)

    def sat_positions(self) -> List[int]:
        return [p for _, p in sorted((self.r[p] / self.n[p], p) for p in range(len(self)) if self.active[p])]

    def audit(self) -> None:
        assert len(set(self.solutions)) == len(self.solutions)
