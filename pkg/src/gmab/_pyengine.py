"""Pure-Python GMAB engine.

This is the fallback when the compiled extension is unavailable and the
reference the compiled engine is tested against.
"""
from __future__ import annotations

import time
from typing import List, Optional, Tuple

import numpy as np

from .core import GmabParams, evaluate
from .genetic import MutationConfig, genetic_modification
from .memory import MemoryStore, NaiveMemory
from .rng import StreamSet


class PythonEngine:
    backend = "python"

    def __init__(self, problem, params: GmabParams, streams: StreamSet, memory: str = "tree", log: bool = False):
        self.problem = problem
        self.space = problem.space
        params.check_space(self.space)
        self.m = params.m
        self.p_cr = params.p_cr
        self.sign = params.direction.sign
        self.mcfg = MutationConfig.for_space(self.space, params.p_mu)
        self.streams = streams
        if memory == "tree":
            self.memory = MemoryStore(self.space)
        elif memory == "naive":
            self.memory = NaiveMemory(self.space)
        else:
            raise ValueError(f"unknown memory kind {memory!r}")
        self.k = 0
        self.total_replications = 0
        self.log: Optional[List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = [] if log else None

    @property
    def iterations(self) -> int:
        """Completed iterations after initialization."""
        return max(self.k - 1, 0)

    @property
    def size(self) -> int:
        return len(self.memory)

    def _observe(self, p: int) -> None:
        x = self.memory.solutions[p]
        value = evaluate(self.problem, x, self.streams.noise, self.sign)
        self.memory.record_observation(p, value)
        self.total_replications += 1

    def initialize(self) -> None:
        if self.k:
            raise RuntimeError("engine already initialized")
        init = self.streams.init
        lows, widths = self.space.lower, self.space.widths
        created = []
        while len(created) < self.m:
            x = tuple(lo + init.integers(w) for lo, w in zip(lows, widths))
            p, is_new = self.memory.lookup_or_insert(x)
            if is_new:
                created.append(p)
        for p in created:
            self._observe(p)
        self.k = 1

    def iterate(self) -> None:
        if not self.k:
            raise RuntimeError("initialize() must run first")
        mem = self.memory
        s = self.streams
        elites = mem.extract_best_m(self.m, s.tie)
        offspring = genetic_modification(
            [mem.solutions[p] for p in elites], self.space, self.p_cr, self.mcfg,
            s.pairing, s.crossover, s.mutation,
        )
        for x in offspring:
            p, _ = mem.lookup_or_insert(x)
            mem.cache.append(p)
        visit = sorted(set(mem.cache))
        for p in visit:
            self._observe(p)
        mem.clear_cache()
        if self.log is not None:
            self.log.append((tuple(elites), tuple(visit)))
        self.k += 1

    def advance(self, max_replications=None, max_iterations=None, deadline=None) -> None:
        """Iterate until any given limit is reached (a started iteration always completes)."""
        while True:
            if max_replications is not None and self.total_replications >= max_replications:
                return
            if max_iterations is not None and self.iterations >= max_iterations:
                return
            if deadline is not None and time.monotonic() >= deadline:
                return
            self.iterate()

    def counts(self) -> np.ndarray:
        return self.memory.counts()

    def sums(self) -> np.ndarray:
        return self.memory.sums()

    def coords(self) -> np.ndarray:
        return self.memory.coords()

    def solution(self, p: int):
        return self.memory.solutions[p]

    def sat_positions(self) -> List[int]:
        return self.memory.sat_positions()

    def audit(self) -> None:
        self.memory.audit()
