import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmab import GmabParams, RunAborted, SearchSpace, StoppingBudget, run
from gmab.core import ConfigurationError, Direction
from gmab.problems import MultimodalProblem, QuadraticProblem, SumOfHumpsProblem
from gmab.rng import StreamSet
from gmab.selection import fsc1
from gmab.solver import incumbent, initialize


def params(**kw):
    budget = kw.pop("budget", StoppingBudget(max_replications=2000))
    return GmabParams(budget=budget, **kw)


def test_initialize_tiny_space(backend):
    problem = QuadraticProblem(lower=(0, 0), upper=(1, 1), center=(0, 0))
    engine = initialize(problem, params(m=2), backend=backend)
    assert engine.size == 2 and engine.total_replications == 2
    assert engine.counts().tolist() == [1, 1]
    assert len(set(map(tuple, engine.coords()))) == 2


def test_initialize_defaults_on_tp3(backend):
    engine = initialize(MultimodalProblem(), params(), backend=backend)
    assert engine.size == 20
    assert engine.counts().tolist() == [1] * 20
    assert engine.iterations == 0


def test_initial_sample_independent_of_noise_seed(backend):
    problem = MultimodalProblem()
    a = initialize(problem, params(seed=4), StreamSet.from_seed(4), backend=backend)
    b = initialize(problem, params(seed=4), StreamSet.from_seed(4, noise_seed=99), backend=backend)
    assert np.array_equal(a.coords(), b.coords())
    assert not np.array_equal(a.sums(), b.sums())


def test_m_not_below_cardinality():
    with pytest.raises(ConfigurationError):
        run(QuadraticProblem(lower=(0,), upper=(3,), center=(1,)), params(m=4))


def test_iteration_bookkeeping(backend):
    problem = SumOfHumpsProblem(dims=3)
    engine = initialize(problem, params(m=10, seed=2), backend=backend, log=True)
    expected_total = 10
    for _ in range(60):
        before = engine.counts()
        old_coords = engine.coords()
        engine.iterate()
        elites, visit = engine.log[-1]
        after = engine.counts()
        # monotone memory: old records untouched in place
        assert np.array_equal(engine.coords()[: len(old_coords)], old_coords)
        before = np.concatenate([before, np.zeros(len(after) - len(before), dtype=np.int64)])
        diff = after - before
        assert set(np.flatnonzero(diff)) == set(visit)
        assert np.all(diff[list(visit)] == 1)
        assert set(elites) <= set(visit)
        assert 10 <= len(visit) <= 20
        assert list(visit) == sorted(visit)
        expected_total += len(visit)
        assert engine.total_replications == expected_total == after.sum()
        assert len(engine.sat_positions()) == engine.size
    engine.audit()


def test_zero_iterations_returns_best_initial(backend):
    problem = MultimodalProblem()
    engines = []
    res = run(problem, params(seed=3, budget=StoppingBudget(max_iterations=0)), backend=backend, engine_out=engines)
    e = engines[0]
    assert res.iterations == 0 and res.replications == 20
    p = fsc1(e.counts(), e.sums())
    assert res.best == e.solution(p)
    assert res.best_mean == e.sums()[p]


@settings(max_examples=25)
@given(st.integers(1, 5000), st.sampled_from([2, 4, 20, 50]), st.integers(0, 1000))
def test_budget_overshoot_bound(budget, m, seed):
    res = run(SumOfHumpsProblem(dims=2), params(m=m, seed=seed, budget=StoppingBudget(max_replications=budget)))
    lower = max(budget, m)
    assert lower <= res.replications <= max(budget + 2 * m - 1, m)


def test_iteration_budget(backend):
    res = run(MultimodalProblem(), params(budget=StoppingBudget(max_iterations=7)), backend=backend)
    assert res.iterations == 7


def test_wall_clock_budget():
    res = run(MultimodalProblem(), params(budget=StoppingBudget(max_wall_seconds=0.05)))
    assert res.wall_seconds >= 0.05
    assert res.iterations > 0


def test_deterministic(backend):
    p = params(seed=11)
    a = run(SumOfHumpsProblem(dims=4), p, checkpoints=[100, 1000], backend=backend)
    b = run(SumOfHumpsProblem(dims=4), p, checkpoints=[100, 1000], backend=backend)
    assert a.best == b.best and a.best_mean == b.best_mean and a.trace.checkpoints == b.trace.checkpoints


@dataclass
class Negated:
    """Maximization view of a minimization problem: observations negated."""

    inner: object
    direction: Direction = Direction.MAXIMIZE

    @property
    def space(self):
        return self.inner.space

    def simulate(self, x, rng):
        return -self.inner.simulate(x, rng)

    def true_value(self, x):
        return -self.inner.true_value(x)


def test_negation_round_trip(backend):
    base = SumOfHumpsProblem(dims=3)
    grid = [50, 200, 800, 2000]
    a = run(base, params(seed=5), checkpoints=grid, backend=backend)
    b = run(Negated(base), params(seed=5, direction=Direction.MAXIMIZE), checkpoints=grid, backend=backend)
    assert [c.incumbent for c in a.trace] == [c.incumbent for c in b.trace]
    assert [c.incumbent_mean for c in a.trace] == [-c.incumbent_mean for c in b.trace]
    assert a.best == b.best and a.best_mean == -b.best_mean


def test_checkpoints_match_shorter_runs(backend):
    problem = MultimodalProblem()
    grid = [30, 100, 450, 1000]
    full = run(problem, params(seed=8, budget=StoppingBudget(max_replications=1000)), checkpoints=grid, backend=backend)
    assert [c.replications for c in full.trace] == grid
    for cp in full.trace:
        assert cp.replications <= cp.actual_replications < cp.replications + 40
        short = run(problem, params(seed=8, budget=StoppingBudget(max_replications=cp.replications)), backend=backend)
        assert short.best == cp.incumbent and short.best_mean == cp.incumbent_mean
        assert short.replications == cp.actual_replications
        assert cp.true_value == problem.true_value(cp.incumbent)


def test_checkpoint_callback_and_validation():
    seen = []
    run(MultimodalProblem(), params(), checkpoints=[100, 50], on_checkpoint=seen.append)
    assert [c.replications for c in seen] == [50, 100]
    with pytest.raises(ValueError):
        run(MultimodalProblem(), params(), checkpoints=[0, 5])
    with pytest.raises(ValueError):
        run(MultimodalProblem(), params(), fsc="fsc9")


def test_unreached_checkpoints_are_absent():
    res = run(MultimodalProblem(), params(budget=StoppingBudget(max_replications=100)), checkpoints=[50, 10**6])
    assert [c.replications for c in res.trace] == [50]


class Flaky:
    space = SearchSpace.box(0, 50, 2)
    direction = Direction.MINIMIZE

    def __init__(self, fail_after):
        self.calls = 0
        self.fail_after = fail_after

    def simulate(self, x, rng):
        self.calls += 1
        if self.calls > self.fail_after:
            raise RuntimeError("simulator crashed")
        return float(sum(x)) + rng.normal()


def test_evaluation_error_keeps_partial_trace(backend):
    with pytest.raises(RunAborted) as info:
        run(Flaky(300), params(m=4), checkpoints=[10, 100, 200, 5000], backend=backend)
    partial = info.value.partial
    assert [c.replications for c in partial.trace] == [10, 100, 200]
    assert partial.replications == 300
    assert isinstance(info.value.cause.payload, RuntimeError)


def test_result_fields(backend):
    problem = MultimodalProblem()
    res = run(problem, params(seed=1), backend=backend)
    assert res.backend == backend
    assert res.replications >= 2000 and res.visited >= 20
    assert res.true_value == problem.true_value(res.best)
    assert math.isfinite(res.wall_seconds)


def test_incumbent_helper():
    engine = initialize(MultimodalProblem(), params(seed=2))
    x, mean, n = incumbent(engine, "fsc2")
    assert n == 1 and mean == engine.sums().min()
