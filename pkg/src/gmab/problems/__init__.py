"""Test problems and the external-simulator adapter."""
from __future__ import annotations

from typing import Optional, Sequence

from ..core import ConfigurationError
from ..rng import RandomStream
from .builtin import (
    InventoryProblem,
    MultimodalProblem,
    NoiseStub,
    QuadraticProblem,
    SumOfHumpsProblem,
)
from .external import ExternalSimulator

# stream id for ground-truth estimation; disjoint from the run streams 0..5
ORACLE_STREAM = 101


def make_problem(problem_id: str, dims: Optional[int] = None, noise_std: Optional[float] = None,
                 external_cmd: Optional[str] = None, **kwargs):
    """Build a problem from its CLI identifier (tp1, tp3, tp4, external)."""
    pid = problem_id.lower()
    if pid == "tp1":
        return InventoryProblem(**kwargs)
    if pid == "tp3":
        return MultimodalProblem(noise_std=1.0 if noise_std is None else noise_std, **kwargs)
    if pid == "tp4":
        return SumOfHumpsProblem(dims=dims or 5, noise_std=1.0 if noise_std is None else noise_std, **kwargs)
    if pid == "external":
        if not external_cmd:
            raise ConfigurationError("problem 'external' needs an external command")
        return ExternalSimulator(external_cmd, **kwargs)
    raise ConfigurationError(f"unknown problem {problem_id!r}")


def estimate_mean(problem, x: Sequence[int], reps: int, seed: int = 0) -> float:
    """Monte-Carlo estimate of ``g(x)`` from ``reps`` fresh replications.

    Uses a dedicated stream keyed by ``seed``; built-in problems are simulated
    in compiled code when the native engine is available.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    stream = RandomStream(seed, ORACLE_STREAM)
    from ..engine import native_simulate_mean

    native = getattr(problem, "native", None)
    if native is not None and native_simulate_mean is not None:
        kind, params = native
        return native_simulate_mean(kind, params, tuple(x), reps, stream)
    total = 0.0
    for _ in range(reps):
        total += float(problem.simulate(tuple(x), stream))
    return total / reps


def ground_truth(problem, x: Sequence[int], reps: int = 10_000, seed: int = 0, mode: str = "auto") -> Optional[float]:
    """True objective value at ``x``: analytic where known, else a fresh MC estimate.

    ``mode`` is ``auto``, ``analytic`` or ``mc``.
    """
    if mode not in ("auto", "analytic", "mc"):
        raise ValueError(f"unknown ground-truth mode {mode!r}")
    if mode != "mc":
        value = problem.true_value(tuple(x)) if hasattr(problem, "true_value") else None
        if value is not None or mode == "analytic":
            return value
    return estimate_mean(problem, x, reps, seed)


__all__ = [
    "ExternalSimulator",
    "InventoryProblem",
    "MultimodalProblem",
    "NoiseStub",
    "QuadraticProblem",
    "SumOfHumpsProblem",
    "estimate_mean",
    "ground_truth",
    "make_problem",
]
