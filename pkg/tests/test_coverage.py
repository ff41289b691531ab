import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrpgtco import coverage as cov
from mrpgtco.network import BASE_STATION


def test_coverage_value_boundary():
    assert cov.coverage_value((0, 0), (3, 4), 5) == 1
    assert cov.coverage_value((0, 0), (3, 4.0001), 5) == 0
    assert cov.coverage_value((1, 1), (1, 1), 0.1) == 1


def test_joint_coverage_cases():
    assert cov.joint_coverage([(0, 0), (1, 0)], (0.5, 0), 1) == 1
    assert cov.joint_coverage([], (0, 0), 10) == 0


def test_coverage_rate_cases():
    nodes = [(0, 0), (1, 0), (2, 0), (10, 0)]
    assert cov.coverage_rate([(1, 0)], nodes, 1) == 0.75
    assert cov.coverage_rate([(0, 0), (10, 0)], nodes, 2) == 1
    assert cov.coverage_rate([(50, 50)], nodes, 1) == 0
    with pytest.raises(ValueError):
        cov.coverage_rate([(0, 0)], [], 1)


points = st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=1, max_size=30)


@given(points, points, st.floats(1, 60))
def test_joint_coverage_is_logical_or(heads, nodes, radius):
    for n in nodes:
        brute = any(math.hypot(h[0] - n[0], h[1] - n[1]) <= radius for h in heads)
        assert cov.joint_coverage(heads, n, radius) == int(brute)


@given(points, points, st.tuples(st.floats(0, 100), st.floats(0, 100)), st.floats(1, 60))
def test_adding_a_head_never_lowers_coverage(heads, nodes, extra, radius):
    assert cov.coverage_rate(heads + [extra], nodes, radius) >= cov.coverage_rate(heads, nodes, radius)


def test_objective_reference_value():
    positions = np.array([[x, 0.0] for x in range(100)])
    energy = np.full(100, 0.5)
    alive = np.ones(100, bool)
    params = cov.CoverageParams(1000, energy_scale="nodes")
    assert cov.objective(range(10), positions, energy, alive, params, 0.5) == pytest.approx(0.55)
    assert cov.objective(range(10), positions, energy, alive, cov.CoverageParams(1000), 0.5) == 1.0
    only_cov = cov.CoverageParams(1000, 1.0, 0.0)
    assert cov.objective([0], positions, energy, alive, only_cov, 0.5) == 1.0
    drained = cov.CoverageParams(1000, 0.0, 1.0)
    assert cov.objective([0, 1], positions, np.zeros(100), alive, drained, 0.5) == 0.0


def test_objective_head_scale():
    positions = np.array([[x, 0.0] for x in range(100)])
    energy = np.full(100, 0.25)
    alive = np.ones(100, bool)
    params = cov.CoverageParams(1000, 0.5, 0.5, "heads")
    # mean head energy relative to the initial energy
    assert cov.objective(range(10), positions, energy, alive, params, 0.5) == pytest.approx(0.75)
    assert cov.objective(range(5), positions, energy, alive, params, 0.5, k=10) == pytest.approx(0.625)
    with pytest.raises(ValueError):
        cov.CoverageParams(10, energy_scale="most")
    with pytest.raises(ValueError):
        cov.objective([], positions, energy, alive, params, 0.5)


def test_default_radius():
    assert cov.default_radius(200, 10) == pytest.approx(200 / math.sqrt(10 * math.pi))


def test_map_to_candidates_prefers_nearest_then_next():
    cand = np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]])
    assert cov.map_to_candidates([(1, 0), (2, 0)], cand) == [0, 1]
    assert cov.map_to_candidates([(19, 0), (1, 0)], cand) == [2, 0]
    assert cov.map_to_candidates([(0, 0)] * 4, cand) == [0, 1, 2]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.sampled_from(["nodes", "heads"]))
def test_swarm_kernel_matches_reference(seed, k, scale):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k, 30))
    positions = rng.uniform(0, 100, (n, 2))
    energy = rng.uniform(0.01, 0.5, n)
    alive = rng.random(n) < 0.9
    alive[0] = True
    candidates = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    params = cov.CoverageParams(float(rng.uniform(5, 50)), 0.4, 0.6, scale)
    evaluator = cov.SwarmEvaluator(candidates, positions, energy, alive, params, 0.5, k)
    virt = rng.uniform(0, 100, (8, k, 2))
    fitness, mapped = evaluator(virt)
    cand_xy = positions[candidates]
    for p in range(virt.shape[0]):
        ref = cov.map_to_candidates(virt[p], cand_xy)
        assert [m for m in mapped[p] if m >= 0] == ref
        heads = [candidates[i] for i in ref]
        expected = cov.objective(heads, positions, energy, alive, params, 0.5, k)
        assert fitness[p] == pytest.approx(expected, rel=1e-12)


def _instance(seed, n=15, n_cand=12):
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0, 200, (n, 2))
    energy = rng.uniform(0.1, 0.5, n)
    candidates = sorted(rng.choice(n, n_cand, replace=False).tolist())
    return rng, positions, energy, np.ones(n, bool), candidates


def test_pso_degenerate_cases():
    rng, positions, energy, alive, candidates = _instance(0)
    params = cov.CoverageParams(cov.default_radius(200, 4))
    res = cov.pso_select(candidates[:4], positions, energy, alive, 4, params, 200, 0.5, rng)
    assert res.heads == candidates[:4]
    res = cov.pso_select(candidates[:1], positions, energy, alive, 3, params, 200, 0.5, rng)
    assert res.heads == candidates[:1]
    assert cov.pso_select([], positions, energy, alive, 3, params, 200, 0.5, rng).heads == []


@pytest.mark.parametrize("seed", range(5))
def test_pso_result_is_valid_and_monotone(seed):
    rng, positions, energy, alive, candidates = _instance(seed)
    params = cov.CoverageParams(cov.default_radius(200, 4))
    res = cov.pso_select(candidates, positions, energy, alive, 4, params, 200, 0.5, rng)
    assert len(res.heads) == 4 and set(res.heads) <= set(candidates)
    assert all(b >= a for a, b in zip(res.history, res.history[1:]))
    assert res.fitness == pytest.approx(cov.objective(res.heads, positions, energy, alive, params, 0.5, 4))
    best = max(cov.objective(s, positions, energy, alive, params, 0.5, 4)
               for s in itertools.combinations(candidates, 4))
    assert res.fitness <= best + 1e-12


def test_pso_scale_invariance_of_weights():
    _, positions, energy, alive, candidates = _instance(3)
    a = cov.pso_select(candidates, positions, energy, alive, 4, cov.CoverageParams(40, 0.3, 0.7),
                       200, 0.5, np.random.default_rng(9))
    b = cov.pso_select(candidates, positions, energy, alive, 4, cov.CoverageParams(40, 0.6, 1.4),
                       200, 0.5, np.random.default_rng(9))
    assert a.heads == b.heads


def test_form_clusters_nearest_with_ties():
    positions = np.array([[0.0, 0.0], [10.0, 0.0], [5.0, 0.0], [1.0, 0.0], [9.0, 0.0]])
    alive = np.ones(5, bool)
    c = cov.form_clusters([1, 0], positions, alive)
    assert c.heads == [0, 1]
    assert c.head_of == {0: 0, 1: 1, 2: 0, 3: 0, 4: 1}
    assert c.member_counts == {0: 2, 1: 1}
    single = cov.form_clusters([4], positions, alive)
    assert set(single.head_of.values()) == {4}
    empty = cov.form_clusters([], positions, np.array([True, False, True, True, True]))
    assert empty.head_of == {0: BASE_STATION, 2: BASE_STATION, 3: BASE_STATION, 4: BASE_STATION}


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_form_clusters_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 25
    positions = rng.uniform(0, 100, (n, 2))
    alive = rng.random(n) < 0.8
    live = np.flatnonzero(alive)
    if live.size == 0:
        return
    heads = sorted(rng.choice(live, size=min(4, live.size), replace=False).tolist())
    c = cov.form_clusters(heads, positions, alive)
    assert set(c.head_of) == set(live.tolist())
    for i in live:
        if i in heads:
            assert c.head_of[i] == i
            continue
        d = [math.hypot(*(positions[i] - positions[h])) for h in heads]
        assert c.head_of[i] == heads[int(np.argmin(d))]
