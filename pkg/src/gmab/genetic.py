"""Genetic modification of the elite set: random pairing, single-point
crossover and bounded Gaussian mutation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .core import ConfigurationError, SearchSpace, Solution
from .rng import RandomStream

MAX_RESAMPLES = 100


def round_half_away(v: float) -> int:
    """Round to nearest integer, halves away from zero (C ``round``)."""
    a = abs(v)
    f = math.floor(a)
    if a - f >= 0.5:
        f += 1
    return int(f) if v >= 0 else -int(f)


@dataclass(frozen=True)
class MutationConfig:
    sigma: Tuple[float, ...]
    p_mu: float
    max_resamples: int = MAX_RESAMPLES

    @classmethod
    def for_space(cls, space: SearchSpace, p_mu: float, max_resamples: int = MAX_RESAMPLES) -> "MutationConfig":
        # one tenth of each dimension's range
        sigma = tuple(0.1 * (hi - lo) for lo, hi in zip(space.lower, space.upper))
        return cls(sigma=sigma, p_mu=p_mu, max_resamples=max_resamples)


def single_point_crossover(x1: Sequence[int], x2: Sequence[int], g: int) -> Tuple[Solution, Solution]:
    """Swap the tails after the first ``g`` components (``1 <= g <= D-1``)."""
    D = len(x1)
    if len(x2) != D:
        raise ConfigurationError("parents differ in dimension")
    if not 1 <= g <= D - 1:
        raise ConfigurationError(f"cut position g={g} outside 1..{D - 1}")
    return tuple(x1[:g]) + tuple(x2[g:]), tuple(x2[:g]) + tuple(x1[g:])


def mutate_component(value: int, lo: int, hi: int, sigma: float, rng: RandomStream,
                     max_resamples: int = MAX_RESAMPLES) -> int:
    """Gaussian step from ``value``, redrawing the noise until the rounded result is in bounds.

    After ``max_resamples`` failed draws the component is drawn uniformly from
    ``[lo, hi]`` instead.
    """
    for _ in range(max_resamples):
        candidate = round_half_away(value + sigma * rng.normal())
        if lo <= candidate <= hi:
            return candidate
    return lo + rng.integers(hi - lo + 1)


def gaussian_mutate(x: Sequence[int], space: SearchSpace, mcfg: MutationConfig, rng: RandomStream) -> Solution:
    out = list(x)
    for d, (lo, hi) in enumerate(zip(space.lower, space.upper)):
        if rng.random() < mcfg.p_mu:
            out[d] = mutate_component(out[d], lo, hi, mcfg.sigma[d], rng, mcfg.max_resamples)
    return tuple(out)


def genetic_modification(
    elites: Sequence[Solution],
    space: SearchSpace,
    p_cr: float,
    mcfg: MutationConfig,
    pairing: RandomStream,
    crossover: RandomStream,
    mutation: RandomStream,
) -> List[Solution]:
    """Offspring of the elite set, duplicates removed (first occurrence kept).

    Elites are shuffled and paired with their neighbour; each pair is crossed
    over with probability ``p_cr`` at a cut drawn uniformly from ``1..D-1``
    (no cut exists for ``D == 1``). Every offspring is then mutated.
    """
    m = len(elites)
    if m < 2 or m % 2:
        raise ConfigurationError(f"elite set size must be even and >= 2, got {m}")
    if len(set(elites)) != m:
        raise ConfigurationError("elite solutions must be distinct")
    D = space.dims
    parents = list(elites)
    pairing.shuffle(parents)

    children: List[Solution] = []
    for i in range(0, m, 2):
        a, b = parents[i], parents[i + 1]
        if crossover.random() < p_cr and D >= 2:
            g = 1 + crossover.integers(D - 1)
            a, b = single_point_crossover(a, b, g)
        children.append(a)
        children.append(b)

    seen = set()
    offspring = []
    for child in children:
        child = gaussian_mutate(child, space, mcfg, mutation)
        if child not in seen:
            seen.add(child)
            offspring.append(child)
    return offspring
