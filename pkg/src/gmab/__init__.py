"""Genetic multi-armed bandit search for discrete simulation optimization."""
from .core import (
    ConfigurationError,
    Direction,
    EvaluationError,
    GmabError,
    GmabParams,
    Problem,
    SearchSpace,
    StoppingBudget,
)
from .engine import DEFAULT_BACKEND, NATIVE_AVAILABLE, make_engine
from .rng import RandomStream, StreamSet
from .selection import fsc1, fsc2, fsc3, get_selector
from .solver import Checkpoint, RunAborted, RunResult, RunTrace, run

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "ConfigurationError",
    "DEFAULT_BACKEND",
    "Direction",
    "EvaluationError",
    "GmabError",
    "GmabParams",
    "NATIVE_AVAILABLE",
    "Problem",
    "RandomStream",
    "RunAborted",
    "RunResult",
    "RunTrace",
    "SearchSpace",
    "StoppingBudget",
    "StreamSet",
    "fsc1",
    "fsc2",
    "fsc3",
    "get_selector",
    "make_engine",
    "run",
]
