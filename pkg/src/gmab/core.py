"""Domain types shared by the solver, the memory scheme and the test problems."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence, Tuple

Solution = Tuple[int, ...]


class GmabError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(GmabError, ValueError):
    """Invalid search space, parameters or budget."""


class EvaluationError(GmabError):
    """A simulation call failed or returned something that is not a finite number.

    ``payload`` carries the offending reply (or exception) for diagnostics.
    """

    def __init__(self, message: str, payload: object = None):
        super().__init__(message)
        self.payload = payload


class Direction(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    @property
    def sign(self) -> float:
        """Factor applied to raw observations so the engine always minimizes."""
        return 1.0 if self is Direction.MINIMIZE else -1.0


@dataclass(frozen=True)
class SearchSpace:
    """Integer box ``{x : lower[d] <= x[d] <= upper[d]}``."""

    lower: Tuple[int, ...]
    upper: Tuple[int, ...]

    def __post_init__(self):
        lower = tuple(int(v) for v in self.lower)
        upper = tuple(int(v) for v in self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if not lower or len(lower) != len(upper):
            raise ConfigurationError("lower and upper bounds must be non-empty and of equal length")
        for d, (lo, hi) in enumerate(zip(lower, upper)):
            if lo > hi:
                raise ConfigurationError(f"lower[{d}]={lo} exceeds upper[{d}]={hi}")
        if self.cardinality < 2:
            raise ConfigurationError("search space must contain at least two solutions")

    @classmethod
    def box(cls, lower: int, upper: int, dims: int) -> "SearchSpace":
        return cls((lower,) * dims, (upper,) * dims)

    @property
    def dims(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> Tuple[int, ...]:
        """Number of admissible values per dimension."""
        return tuple(hi - lo + 1 for lo, hi in zip(self.lower, self.upper))

    @property
    def cardinality(self) -> int:
        return math.prod(self.widths)

    def contains(self, x: Sequence[int]) -> bool:
        return validate(self, x)


def validate(space: SearchSpace, x: Sequence[int]) -> bool:
    """True iff ``x`` lies inside ``space`` componentwise.

    Raises ConfigurationError when ``x`` has the wrong number of components.
    """
    if len(x) != space.dims:
        raise ConfigurationError(f"solution has {len(x)} components, space has {space.dims}")
    return all(lo <= v <= hi for v, lo, hi in zip(x, space.lower, space.upper))


@dataclass(frozen=True)
class StoppingBudget:
    """Fixed budget: the run stops as soon as any of the set limits is reached.

    An iteration that starts before a limit is hit always runs to completion,
    so the replication count may overshoot ``max_replications`` by up to
    ``2*m - 1``.
    """

    max_replications: Optional[int] = None
    max_iterations: Optional[int] = None
    max_wall_seconds: Optional[float] = None

    def __post_init__(self):
        if self.max_replications is None and self.max_iterations is None and self.max_wall_seconds is None:
            raise ConfigurationError("at least one stopping limit must be set")
        if self.max_replications is not None and self.max_replications < 1:
            raise ConfigurationError("max_replications must be positive")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be non-negative")
        if self.max_wall_seconds is not None and not self.max_wall_seconds > 0:
            raise ConfigurationError("max_wall_seconds must be positive")


@dataclass(frozen=True)
class GmabParams:
    """Algorithm parameters. Defaults are a setting that works well across problems."""

    m: int = 20
    p_cr: float = 1.0
    p_mu: float = 0.25
    direction: Direction = Direction.MINIMIZE
    seed: int = 0
    budget: StoppingBudget = field(default_factory=lambda: StoppingBudget(max_replications=10_000))

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.m < 2 or self.m % 2:
            raise ConfigurationError(f"m must be an even integer >= 2, got {self.m}")
        if not 0.0 <= self.p_cr <= 1.0:
            raise ConfigurationError(f"p_cr must lie in [0, 1], got {self.p_cr}")
        if not 0.0 < self.p_mu <= 1.0:
            raise ConfigurationError(f"p_mu must lie in (0, 1], got {self.p_mu}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    def check_space(self, space: SearchSpace) -> None:
        if self.m >= space.cardinality:
            raise ConfigurationError(f"m={self.m} must be smaller than |space|={space.cardinality}")


class Problem(Protocol):
    """A stochastic objective ``G(x)`` over an integer box.

    ``simulate`` must return one independent realization per call, drawing
    all of its randomness from ``rng``. Sample means of repeated calls are
    expected to be strongly consistent estimators of ``g(x) = E[G(x)]``;
    global convergence relies on that and it is not checked.
    """

    name: str
    space: SearchSpace
    direction: Direction

    def simulate(self, x: Solution, rng) -> float: ...


def evaluate(problem: Problem, x: Solution, rng, sign: float | None = None) -> float:
    """One observation of ``problem`` at ``x`` in the engine's minimization frame.

    Maximization problems are negated here, so callers always minimize.
    """
    if sign is None:
        sign = Direction(getattr(problem, "direction", Direction.MINIMIZE)).sign
    try:
        raw = problem.simulate(x, rng)
    except EvaluationError:
        raise
    except Exception as exc:  # simulator bugs surface as evaluation errors
        raise EvaluationError(f"simulation of {x} failed: {exc!r}", payload=exc) from exc
    try:
        value = float(raw)
    except (TypeError, ValueError) as exc:
        raise EvaluationError(f"non-numeric observation {raw!r} at {x}", payload=raw) from exc
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite observation {value!r} at {x}", payload=raw)
    return sign * value
