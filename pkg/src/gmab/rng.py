"""Reproducible random streams.

Every stream wraps a numpy ``Philox`` bit generator (counter based) keyed by
``SeedSequence(seed, spawn_key=(stream_id,))``. Variates are derived from the
raw 64-bit output with the small set of transforms below; the compiled engine
re-implements exactly the same arithmetic on the same bit generator, which is
what makes both engines produce bit-identical runs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import MutableSequence, Optional

import numpy as np

TWO_PI = 6.283185307179586
_TWO64 = 1 << 64
_INV_2_53 = 1.0 / 9007199254740992.0

# sub-stream ids; part of the reproducibility contract, do not renumber
INIT, PAIRING, CROSSOVER, MUTATION, TIE, NOISE = range(6)


class RandomStream:
    def __init__(self, seed: int, stream_id: int):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.bit_generator = np.random.Philox(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))
        self._raw = self.bit_generator.random_raw

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"

    def raw(self) -> int:
        return self._raw()

    def random(self) -> float:
        """Uniform double on [0, 1) with 53 random bits."""
        return (self._raw() >> 11) * _INV_2_53

    def integers(self, n: int) -> int:
        """Uniform integer on [0, n), unbiased by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = _TWO64 % n
        while True:
            r = self._raw()
            if r >= threshold:
                return r % n

    def normal(self) -> float:
        """Standard normal variate (Box-Muller, cosine branch only)."""
        u1 = 1.0 - self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)

    def poisson(self, lam: float) -> int:
        """Poisson variate by sequential inversion of the CDF."""
        u = self.random()
        k = 0
        p = math.exp(-lam)
        cdf = p
        while u > cdf:
            k += 1
            p = p * lam / k
            if p <= 0.0:
                break
            cdf = cdf + p
        return k

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integers(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass
class StreamSet:
    """The independent streams one run consumes."""

    init: RandomStream
    pairing: RandomStream
    crossover: RandomStream
    mutation: RandomStream
    tie: RandomStream
    noise: RandomStream

    @classmethod
    def from_seed(cls, seed: int, noise_seed: Optional[int] = None) -> "StreamSet":
        """Derive all streams from ``seed``; ``noise_seed`` re-keys only the simulation noise."""
        noise_seed = seed if noise_seed is None else noise_seed
        return cls(
            init=RandomStream(seed, INIT),
            pairing=RandomStream(seed, PAIRING),
            crossover=RandomStream(seed, CROSSOVER),
            mutation=RandomStream(seed, MUTATION),
            tie=RandomStream(seed, TIE),
            noise=RandomStream(noise_seed, NOISE),
        )
