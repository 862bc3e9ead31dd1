"""Built-in test problems.

Each problem carries a ``native`` spec ``(kind, params)`` that the compiled
engine evaluates without calling back into Python. The Python ``simulate``
methods below are the reference arithmetic; the C versions mirror them
operation for operation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from ..core import ConfigurationError, Direction, SearchSpace, Solution

# native kinds, shared with _engine.pyx
NATIVE_PYTHON, NATIVE_INVENTORY, NATIVE_MULTIMODAL, NATIVE_TP4, NATIVE_QUADRATIC, NATIVE_NOISE = range(6)
MAX_LEAD_TIME = 64

PI = 3.141592653589793


@dataclass
class InventoryProblem:
    """(s, S) periodic-review inventory system with Poisson demand (TP1).

    ``x = (s, S - s)``. At each review, if the inventory position is below
    ``s`` an order up to ``S`` is placed (fixed plus per-unit cost). Demand is
    fully backlogged; holding and shortage costs are charged on the end-of-
    period level. One observation is the average cost per period.
    """

    horizon: int = 30
    demand_mean: float = 25.0
    fixed_cost: float = 32.0
    unit_cost: float = 3.0
    holding_cost: float = 1.0
    shortage_cost: float = 5.0
    lead_time: int = 0
    initial_inventory: Optional[int] = None  # None starts at S
    lower: int = 1
    upper: int = 100
    name: str = "tp1"
    direction: Direction = Direction.MINIMIZE
    # Monte-Carlo reference optimum (10^6 replications per solution)
    optimum: Optional[float] = 106.167
    optimum_solution: Optional[Solution] = (17, 36)

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        costs = (self.demand_mean, self.fixed_cost, self.unit_cost, self.holding_cost, self.shortage_cost)
        if min(costs) < 0:
            raise ConfigurationError("demand mean and cost parameters must be non-negative")
        if not 0 <= self.lead_time <= MAX_LEAD_TIME:
            raise ConfigurationError(f"lead_time must lie in [0, {MAX_LEAD_TIME}]")
        if self.initial_inventory is not None and self.initial_inventory < 0:
            raise ConfigurationError("initial_inventory must be non-negative")

    @property
    def space(self) -> SearchSpace:
        return SearchSpace.box(self.lower, self.upper, 2)

    @property
    def native(self) -> Tuple[int, Tuple[float, ...]]:
        init = -1.0 if self.initial_inventory is None else float(self.initial_inventory)
        return NATIVE_INVENTORY, (float(self.horizon), self.demand_mean, self.fixed_cost, self.unit_cost,
                                  self.holding_cost, self.shortage_cost, float(self.lead_time), init)

    def simulate(self, x: Sequence[int], rng) -> float:
        s = x[0]
        big_s = x[0] + x[1]
        on_hand = big_s if self.initial_inventory is None else self.initial_inventory
        lead = self.lead_time
        pipeline = [0] * lead  # pipeline[i] arrives i+1 reviews from now
        cost = 0.0
        for _ in range(self.horizon):
            if lead:
                on_hand += pipeline.pop(0)
                pipeline.append(0)
            position = on_hand + sum(pipeline)
            if position < s:
                q = big_s - position
                cost += self.fixed_cost + self.unit_cost * q
                if lead:
                    pipeline[lead - 1] += q
                else:
                    on_hand += q
            on_hand -= rng.poisson(self.demand_mean)
            if on_hand >= 0:
                cost += self.holding_cost * on_hand
            else:
                cost += self.shortage_cost * (-on_hand)
        return cost / self.horizon

    def true_value(self, x) -> Optional[float]:
        return None


def _multimodal_term(v: int) -> float:
    t = v / 100.0
    s = math.sin(0.05 * PI * t)
    s2 = s * s
    u = (t - 90.0) / 50.0
    return (s2 * s2 * s2) / math.pow(2.0, 2.0 * (u * u))


@dataclass
class MultimodalProblem:
    """Two-dimensional function with 25 local optima on ``[0, 10000]^2`` (TP3).

    Global minimum -20 at (9000, 9000); observations add Normal(0, noise_std).
    """

    noise_std: float = 1.0
    name: str = "tp3"
    direction: Direction = Direction.MINIMIZE

    @property
    def space(self) -> SearchSpace:
        return SearchSpace.box(0, 10_000, 2)

    @property
    def native(self):
        return NATIVE_MULTIMODAL, (self.noise_std,)

    @property
    def optimum_solution(self) -> Solution:
        return (9000, 9000)

    @property
    def optimum(self) -> float:
        return self.true_value(self.optimum_solution)

    def true_value(self, x: Sequence[int]) -> float:
        return -10.0 * (_multimodal_term(x[0]) + _multimodal_term(x[1]))

    def simulate(self, x: Sequence[int], rng) -> float:
        g = self.true_value(x)
        if self.noise_std > 0.0:
            g = g + self.noise_std * rng.normal()
        return g


@dataclass
class SumOfHumpsProblem:
    """``D``-dimensional sum of two Gaussian humps per coordinate (TP4).

    ``2**D`` local optima at ``x_d in {xi1, xi2}``; the global one is
    ``x_d = xi2`` for all d.
    """

    dims: int = 5
    noise_std: float = 1.0
    beta1: float = 300.0
    beta2: float = 500.0
    gamma1: float = 0.001
    gamma2: float = 0.005
    xi1: float = -38.0
    xi2: float = 56.0
    lower: int = -100
    upper: int = 100
    direction: Direction = Direction.MINIMIZE
    name: str = field(default="")

    def __post_init__(self):
        if self.dims < 1:
            raise ConfigurationError("dims must be >= 1")
        if not self.name:
            self.name = f"tp4_d{self.dims:02d}"

    @property
    def space(self) -> SearchSpace:
        return SearchSpace.box(self.lower, self.upper, self.dims)

    @property
    def native(self):
        return NATIVE_TP4, (self.beta1, self.beta2, self.gamma1, self.gamma2, self.xi1, self.xi2, self.noise_std)

    def coordinate_value(self, v: int) -> float:
        a = v - self.xi1
        b = v - self.xi2
        return self.beta1 * math.exp(-self.gamma1 * (a * a)) + self.beta2 * math.exp(-self.gamma2 * (b * b))

    def true_value(self, x: Sequence[int]) -> float:
        total = 0.0
        for v in x:
            total -= self.coordinate_value(v)
        return total

    @property
    def optimum_solution(self) -> Solution:
        best = max(range(self.lower, self.upper + 1), key=self.coordinate_value)
        return (best,) * self.dims

    @property
    def optimum(self) -> float:
        return self.true_value(self.optimum_solution)

    def simulate(self, x: Sequence[int], rng) -> float:
        g = self.true_value(x)
        if self.noise_std > 0.0:
            g = g + self.noise_std * rng.normal()
        return g


@dataclass
class QuadraticProblem:
    """``curvature * ||x - center||^2`` plus Normal noise on an integer box."""

    lower: Tuple[int, ...] = (-10, -10)
    upper: Tuple[int, ...] = (10, 10)
    center: Tuple[int, ...] = (3, -2)
    curvature: float = 1.0
    noise_std: float = 1.0
    name: str = "quadratic"
    direction: Direction = Direction.MINIMIZE

    def __post_init__(self):
        if not len(self.lower) == len(self.upper) == len(self.center):
            raise ConfigurationError("lower, upper and center must have equal length")

    @property
    def space(self) -> SearchSpace:
        return SearchSpace(tuple(self.lower), tuple(self.upper))

    @property
    def native(self):
        return NATIVE_QUADRATIC, (self.curvature, self.noise_std) + tuple(float(c) for c in self.center)

    def true_value(self, x: Sequence[int]) -> float:
        total = 0.0
        for v, c in zip(x, self.center):
            dv = v - c
            total += dv * dv
        return self.curvature * total

    @property
    def optimum_solution(self) -> Solution:
        return tuple(min(max(c, lo), hi) for c, lo, hi in zip(self.center, self.lower, self.upper))

    @property
    def optimum(self) -> float:
        return self.true_value(self.optimum_solution)

    def simulate(self, x: Sequence[int], rng) -> float:
        g = self.true_value(x)
        if self.noise_std > 0.0:
            g = g + self.noise_std * rng.normal()
        return g


@dataclass
class NoiseStub:
    """Constant-time objective: pure Normal noise, used to time the algorithm itself."""

    space: SearchSpace
    noise_std: float = 1.0
    name: str = "stub"
    direction: Direction = Direction.MINIMIZE

    @property
    def native(self):
        return NATIVE_NOISE, (self.noise_std,)

    def true_value(self, x) -> float:
        return 0.0

    def simulate(self, x, rng) -> float:
        return self.noise_std * rng.normal()
