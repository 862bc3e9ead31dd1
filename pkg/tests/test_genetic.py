import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from gmab.core import ConfigurationError, SearchSpace
from gmab.genetic import (
    MAX_RESAMPLES,
    MutationConfig,
    gaussian_mutate,
    genetic_modification,
    mutate_component,
    round_half_away,
    single_point_crossover,
)
from gmab.rng import RandomStream

from conftest import ScriptedStream


@pytest.mark.parametrize("v,expected", [(0.5, 1), (-0.5, -1), (1.49, 1), (2.5, 3), (-2.5, -3), (-0.49, 0), (59.4, 59)])
def test_round_half_away(v, expected):
    assert round_half_away(v) == expected


@pytest.mark.parametrize("x1,x2,g,expected", [
    ((17, 36), (50, 60), 1, ((17, 60), (50, 36))),
    ((5, 5, 5), (5, 5, 5), 2, ((5, 5, 5), (5, 5, 5))),
    ((1, 2, 3, 4), (9, 8, 7, 6), 3, ((1, 2, 3, 6), (9, 8, 7, 4))),
    ((1, 2, 3), (7, 8, 9), 1, ((1, 8, 9), (7, 2, 3))),
])
def test_single_point_crossover(x1, x2, g, expected):
    assert single_point_crossover(x1, x2, g) == expected


@pytest.mark.parametrize("g", [0, 2, -1])
def test_crossover_cut_out_of_range(g):
    with pytest.raises(ConfigurationError):
        single_point_crossover((1, 2), (3, 4), g)


@given(st.integers(2, 8), st.data())
def test_crossover_preserves_component_multiset(D, data):
    x1 = tuple(data.draw(st.integers(-9, 9)) for _ in range(D))
    x2 = tuple(data.draw(st.integers(-9, 9)) for _ in range(D))
    g = data.draw(st.integers(1, D - 1))
    y1, y2 = single_point_crossover(x1, x2, g)
    for d in range(D):
        assert Counter((x1[d], x2[d])) == Counter((y1[d], y2[d]))


def test_sigma_is_tenth_of_range():
    cfg = MutationConfig.for_space(SearchSpace((1, -100), (100, 100)), 0.25)
    assert cfg.sigma == pytest.approx((9.9, 20.0))
    assert cfg.max_resamples == MAX_RESAMPLES == 100


def test_mutation_step_rounds():
    assert mutate_component(56, -100, 100, 1.0, ScriptedStream(normals=[3.4])) == 59


def test_mutation_resamples_out_of_bounds():
    rng = ScriptedStream(normals=[7.2, -2.1])
    assert mutate_component(100, 1, 100, 1.0, rng) == 98
    assert rng.normals == []


def test_mutation_falls_back_to_uniform():
    rng = ScriptedStream(normals=[50.0] * MAX_RESAMPLES, integers=[6])
    assert mutate_component(100, 1, 100, 1.0, rng) == 7


def test_mutation_skipped_components_unchanged():
    space = SearchSpace.box(-100, 100, 3)
    cfg = MutationConfig.for_space(space, 0.25)
    rng = ScriptedStream(uniforms=[0.9, 0.5, 0.25])  # all >= p_mu
    assert gaussian_mutate((1, 2, 3), space, cfg, rng) == (1, 2, 3)


def _streams(seed):
    return RandomStream(seed, 1), RandomStream(seed, 2), RandomStream(seed, 3)


def test_identity_without_crossover_or_mutation():
    space = SearchSpace.box(0, 9, 2)
    cfg = MutationConfig.for_space(space, 0.25)
    elites = [(1, 2), (3, 4)]
    out = genetic_modification(elites, space, 0.0, cfg, ScriptedStream(),
                               ScriptedStream(uniforms=[0.5]), ScriptedStream(uniforms=[0.99] * 4))
    assert out == elites


def test_crossover_example_from_pair():
    space = SearchSpace.box(0, 9, 3)
    cfg = MutationConfig.for_space(space, 0.25)
    out = genetic_modification([(1, 2, 3), (7, 8, 9)], space, 1.0, cfg, ScriptedStream(),
                               ScriptedStream(uniforms=[0.0], integers=[0]), ScriptedStream(uniforms=[0.99] * 6))
    assert set(out) == {(1, 8, 9), (7, 2, 3)}


def test_one_dimensional_crossover_is_noop():
    space = SearchSpace.box(0, 9, 1)
    cfg = MutationConfig.for_space(space, 0.25)
    elites = [(1,), (2,), (3,), (4,)]
    out = genetic_modification(elites, space, 1.0, cfg, ScriptedStream(),
                               ScriptedStream(uniforms=[0.0, 0.0]), ScriptedStream(uniforms=[0.99] * 4))
    assert out == elites


def test_duplicates_collapse_keeping_first():
    space = SearchSpace.box(0, 9, 2)
    cfg = MutationConfig.for_space(space, 0.25)
    # crossover of (1,5) and (2,5) at g=1 swaps equal tails: children equal the parents
    # mutation then forces both first components to 3
    mut = ScriptedStream(uniforms=[0.0, 0.99, 0.0, 0.99], normals=[2.0 / 0.9, 1.0 / 0.9])
    out = genetic_modification([(1, 5), (2, 5)], space, 1.0, cfg, ScriptedStream(),
                               ScriptedStream(uniforms=[0.0], integers=[0]), mut)
    assert out == [(3, 5)]


@pytest.mark.parametrize("elites", [[(1, 1)], [(1, 1), (2, 2), (3, 3)], [(1, 1), (1, 1)]])
def test_genetic_modification_rejects_bad_elites(elites):
    space = SearchSpace.box(0, 9, 2)
    with pytest.raises(ConfigurationError):
        genetic_modification(elites, space, 1.0, MutationConfig.for_space(space, 0.25), *_streams(0))


@st.composite
def spaces_and_elites(draw):
    D = draw(st.integers(1, 5))
    lower = [draw(st.integers(-1000, 1000)) for _ in range(D)]
    upper = [lo + draw(st.integers(1, 300)) for lo in lower]
    space = SearchSpace(tuple(lower), tuple(upper))
    m = 2 * draw(st.integers(1, 4))
    elites = draw(st.lists(st.tuples(*[st.integers(lo, hi) for lo, hi in zip(lower, upper)]),
                           min_size=m, max_size=m, unique=True))
    return space, elites


@given(spaces_and_elites(), st.floats(0, 1), st.floats(0.01, 1), st.integers(0, 2**32))
def test_offspring_stay_in_space(case, p_cr, p_mu, seed):
    space, elites = case
    cfg = MutationConfig.for_space(space, p_mu)
    out = genetic_modification(elites, space, p_cr, cfg, *_streams(seed))
    assert 1 <= len(out) <= len(elites)
    assert len(set(out)) == len(out)
    assert all(space.contains(x) for x in out)


@given(spaces_and_elites(), st.integers(0, 2**32))
def test_genetic_modification_deterministic(case, seed):
    space, elites = case
    cfg = MutationConfig.for_space(space, 0.5)
    assert genetic_modification(elites, space, 0.7, cfg, *_streams(seed)) == \
        genetic_modification(elites, space, 0.7, cfg, *_streams(seed))


def mutation_distribution(x, lo, hi, sigma, max_resamples=MAX_RESAMPLES):
    """Exact single-call law of mutate_component (independent of the implementation)."""
    def cdf(z):
        return 0.5 * math.erfc(-z / math.sqrt(2.0))

    # round(x + sigma*n) == y  <=>  y - 0.5 <= x + sigma*n < y + 0.5 (ties have measure zero)
    q = {y: cdf((y + 0.5 - x) / sigma) - cdf((y - 0.5 - x) / sigma) for y in range(lo, hi + 1)}
    accept = sum(q.values())
    miss = (1.0 - accept) ** max_resamples
    width = hi - lo + 1
    return {y: q[y] / accept * (1.0 - miss) + miss / width for y in q}


def test_every_target_has_positive_probability():
    for lo, hi in [(0, 1), (0, 2), (0, 19), (-7, 5)]:
        sigma = 0.1 * (hi - lo)
        for x in range(lo, hi + 1):
            law = mutation_distribution(x, lo, hi, sigma)
            assert all(p > 0.0 for p in law.values())
            assert sum(law.values()) == pytest.approx(1.0)


@pytest.mark.slow
def test_mutation_frequencies_match_exact_law():
    space = SearchSpace.box(0, 19, 1)
    cfg = MutationConfig.for_space(space, 1.0)
    rng = RandomStream(42, 3)
    draws = 10**6
    hits = Counter(gaussian_mutate((10,), space, cfg, rng)[0] for _ in range(draws))
    law = mutation_distribution(10, 0, 19, cfg.sigma[0])
    for y, p in law.items():
        expected = p * draws
        if expected >= 25:
            assert abs(hits[y] - expected) < 5 * math.sqrt(expected), y
    assert set(hits) <= set(range(20))


def test_repeated_mutation_reaches_every_cell():
    space = SearchSpace.box(0, 19, 1)
    cfg = MutationConfig.for_space(space, 1.0)
    rng = RandomStream(7, 3)
    x = (0,)
    seen = set()
    for _ in range(20_000):
        x = gaussian_mutate(x, space, cfg, rng)
        seen.add(x[0])
    assert seen == set(range(20))
