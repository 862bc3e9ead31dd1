"""Full memory of visited solutions: record store, lookup tree and sample-average tree."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..core import ConfigurationError, SearchSpace, Solution, validate
from .avl import AVLTree
from .rbtree import RedBlackTree


def digit_counts(space: SearchSpace) -> Tuple[int, ...]:
    """Decimal digits needed per dimension, i.e. ceil(log10(width))."""
    return tuple(len(str(w - 1)) if w > 1 else 0 for w in space.widths)


def encode(space: SearchSpace, x: Sequence[int]) -> int:
    """Positional-numeral solution code.

    Each dimension's offset ``x[d] - lower[d]`` occupies its own block of
    decimal digits, most significant first. With equal widths this is
    ``sum(10**(digits*(D-1-d)) * offset_d)``. Codes are ordered like the
    offset vectors compared lexicographically.
    """
    if not validate(space, x):
        raise ConfigurationError(f"{tuple(x)} is outside the search space")
    code = 0
    for v, lo, digits in zip(x, space.lower, digit_counts(space)):
        code = code * 10**digits + (v - lo)
    return code


@dataclass(frozen=True)
class SolutionRecord:
    solution: Solution
    n: int
    r: float

    @property
    def mean(self) -> float:
        if self.n < 1:
            raise ValueError("mean undefined before the first observation")
        return self.r / self.n


def select_with_ties(ordered, m: int, rng, extra_tied) -> list:
    """Pick the best ``m`` of ``ordered + extra_tied``.

    ``ordered`` holds the first ``m`` ``(mean, position)`` keys in ascending
    order and ``extra_tied`` the keys after them that share the ``m``-th mean.
    Keys strictly better than that mean are always kept; the remaining slots
    go to a uniformly random subset of the tied keys. ``rng`` is used only
    when such a choice exists.
    """
    if not extra_tied:
        return list(ordered)
    boundary = ordered[-1][0]
    strict = [k for k in ordered if k[0] < boundary]
    pool = [k for k in ordered if k[0] == boundary] + list(extra_tied)
    slots = m - len(strict)
    for i in range(slots):
        j = i + rng.integers(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return strict + sorted(pool[:slots])


class MemoryStore:
    """Visited solutions with replication counts and observation sums.

    The lookup tree maps solution codes to position codes (record indices);
    the sample-average tree orders positions by ``(sample mean, position)``.
    Positions of the current iteration's elites and offspring live in
    ``cache`` until ``clear_cache``.
    """

    def __init__(self, space: SearchSpace):
        self.space = space
        self.solutions: List[Solution] = []
        self.n: List[int] = []
        self.r: List[float] = []
        self.lut = AVLTree()
        self.sat = RedBlackTree()
        self._sat_node: List[object] = []
        self.cache: List[int] = []

    def __len__(self):
        return len(self.solutions)

    def lookup_or_insert(self, x: Sequence[int]) -> Tuple[int, bool]:
        x = tuple(x)
        code = encode(self.space, x)
        p = self.lut.get(code)
        if p is not None:
            return p, False
        p = len(self.solutions)
        self.solutions.append(x)
        self.n.append(0)
        self.r.append(0.0)
        self._sat_node.append(None)
        self.lut.insert(code, p)
        return p, True

    def position(self, x: Sequence[int]):
        """Position code of ``x`` or None if it was never visited."""
        return self.lut.get(encode(self.space, x))

    def extract_best_m(self, m: int, rng) -> List[int]:
        """Remove the ``m`` best entries from the sample-average tree into the cache."""
        if len(self.sat) < m:
            raise ValueError(f"only {len(self.sat)} solutions available, need {m}")
        if self.cache:
            raise ValueError("cache must be cleared before selecting elites")
        sat = self.sat
        chosen = []
        node = sat.first()
        while len(chosen) < m:
            chosen.append(node)
            node = sat.successor(node)
        boundary = chosen[-1].key[0]
        extra = []
        while node is not None and node.key[0] == boundary:
            extra.append(node.key)
            node = sat.successor(node)
        keys = select_with_ties([c.key for c in chosen], m, rng, extra)
        positions = [p for _, p in keys]
        for p in positions:
            sat.delete(self._sat_node[p])
            self._sat_node[p] = None
        self.cache.extend(positions)
        return positions

    def record_observation(self, p: int, value: float) -> float:
        self.n[p] += 1
        self.r[p] += value
        mean = self.r[p] / self.n[p]
        stale = self._sat_node[p]
        if stale is not None:
            self.sat.delete(stale)
        self._sat_node[p] = self.sat.insert((mean, p), p)
        return mean

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
        return [node.value for node in self.sat.nodes()]

    def dump(self) -> List[str]:
        """Debug lines ``position,code,n,r,mean`` in position order."""
        lines = []
        for p, rec in self.all_records():
            mean = rec.r / rec.n if rec.n else float("nan")
            lines.append(f"{p},{encode(self.space, rec.solution)},{rec.n},{rec.r!r},{mean!r}")
        return lines

    def audit(self) -> None:
        self.lut.audit()
        self.sat.audit()
        assert len(self.lut) == len(self.solutions)
        for node in self.sat.nodes():
            mean, p = node.key
            assert node.value == p
            assert self._sat_node[p] is node
            assert mean == self.r[p] / self.n[p], "SAT key out of date"
        in_sat = sum(node is not None for node in self._sat_node)
        assert in_sat == len(self.sat)
