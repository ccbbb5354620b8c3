import itertools

import numpy as np
import pytest

from conftest import _perms, brute_assignment, brute_max_min
from uavshare import ScenarioConfig, generate
from uavshare.algorithms import (Method, algo1_sum_capacity, algo2_max_min, allocate,
                                 baseline1_no_sharing, baseline2_greedy_max_power,
                                 baseline3_hcu_only, baseline4_random_pairing,
                                 baseline5_greedy_sequential, prepare, run_method)
from uavshare.assignment import AssignmentProblem, solve_assignment
from uavshare.capacity import CapacityMatrix, PowerGrid
from uavshare.energy import EnergyModel


def make(values):
    values = np.asarray(values, dtype=float)
    z = np.zeros(values.shape)
    return (CapacityMatrix(values, values.copy(), z.astype(int), 0.0),
            PowerGrid(z + 0.01, z + 0.1, z.astype(int)))


def brute_general(values, free, objective):
    """Best sum or min over maximum-cardinality pairings, unpaired HCUs at free capacity."""
    values = np.asarray(values, dtype=float)
    I, J = values.shape
    if I > J:
        best = None
        for rows in itertools.permutations(range(I), J):
            caps = free.copy()
            for j, i in enumerate(rows):
                if np.isfinite(values[i, j]):
                    caps[i] = values[i, j]
            k = sum(np.isfinite(values[i, j]) for j, i in enumerate(rows))
            key = (k, objective(caps))
            best = key if best is None or key > best else best
        return best[1]
    best = None
    for cols in _perms(J, I):
        caps = free.copy()
        k = 0
        for i, j in enumerate(cols):
            if np.isfinite(values[i, j]):
                caps[i] = values[i, j]
                k += 1
        key = (k, objective(caps))
        best = key if best is None or key > best else best
    return best[1]


def test_all_sentinel_is_no_sharing():
    free = np.array([5.0, 6.0, 7.0])
    m, p = make(np.full((3, 2), -np.inf))
    r = algo1_sum_capacity(m, p, free)
    assert r.pairs == [] and r.sum_capacity == 18.0 and r.min_capacity == 5.0
    assert r.lcu_denied == [0, 1]
    b = baseline1_no_sharing(free, 0.04, n_lcu=2)
    assert (b.sum_capacity, b.min_capacity) == (r.sum_capacity, r.min_capacity)
    r2 = algo2_max_min(m, p, free)
    assert r2.pairs == [] and r2.min_capacity == 5.0


def test_one_by_one():
    assert algo1_sum_capacity(*make([[2.0]]), [9.0]).pairs == [(0, 0)]
    assert algo1_sum_capacity(*make([[-np.inf]]), [9.0]).pairs == []
    assert algo2_max_min(*make([[2.0]]), [9.0]).pairs == [(0, 0)]


def test_algo1_random_6x6_against_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(100):
        vals = rng.uniform(0.5, 3.0, (6, 6))
        free = rng.uniform(5, 15, 6)
        r = algo1_sum_capacity(*make(vals), free)
        assert r.complete
        assert sum(vals[i, j] for i, j in r.pairs) == pytest.approx(
            brute_assignment(vals, maximize=True)[1], abs=1e-12)


def test_algo1_with_sentinels_and_rectangles():
    rng = np.random.default_rng(1)
    for _ in range(150):
        I, J = rng.integers(1, 7, 2)
        vals = rng.uniform(0.5, 3.0, (I, J))
        vals[rng.random((I, J)) < 0.3] = -np.inf
        free = rng.uniform(2, 6, I)
        r = algo1_sum_capacity(*make(vals), free)
        assert r.sum_capacity == pytest.approx(brute_general(vals, free, np.sum), abs=1e-12)
        assert all(np.isfinite(vals[i, j]) for i, j in r.pairs)
        assert r.sum_capacity == pytest.approx(r.hcu_capacity.sum())
        assert r.min_capacity == r.hcu_capacity.min()


def test_algo2_examples():
    r = algo2_max_min(*make([[3.0, 1.0], [2.0, 4.0]]), np.full(2, 1e9))
    assert r.pairs == [(0, 0), (1, 1)] and r.min_capacity == 3.0
    r = algo2_max_min(*make(np.full((4, 4), 2.5)), np.full(4, 1e9))
    assert r.complete and r.min_capacity == 2.5


def test_algo2_random_6x6_against_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(100):
        vals = rng.uniform(0.5, 10.0, (6, 6))
        r = algo2_max_min(*make(vals), np.full(6, 1e9))
        assert r.complete
        got = min(vals[i, j] for i, j in r.pairs)
        assert got == brute_max_min(vals) == r.threshold


def test_algo2_general_against_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(150):
        I, J = rng.integers(1, 7, 2)
        vals = np.round(rng.uniform(0.5, 8.0, (I, J)), 1)
        vals[rng.random((I, J)) < 0.3] = -np.inf
        free = np.round(rng.uniform(1.0, 9.0, I), 1)
        ref = brute_general(vals, free, np.min)
        for refine in (False, True):
            r = algo2_max_min(*make(vals), free, refine=refine)
            assert r.min_capacity == ref


def test_algo2_refine_keeps_min_and_raises_sum():
    rng = np.random.default_rng(4)
    for _ in range(60):
        vals = np.round(rng.uniform(0.5, 4.0, (6, 6)), 0)
        free = np.full(6, 10.0)
        plain = algo2_max_min(*make(vals), free)
        ref = algo2_max_min(*make(vals), free, refine=True)
        assert ref.min_capacity == plain.min_capacity
        assert ref.sum_capacity >= plain.sum_capacity - 1e-12


def test_baseline1_identical_gains():
    r = baseline1_no_sharing(np.full(4, 2.5), 0.04, n_lcu=3)
    assert r.sum_capacity == 10.0 and r.unpaired_lcu == [0, 1, 2]
    assert baseline3_hcu_only(np.full(4, 2.5), 0.04).method is Method.BASELINE3


def test_baseline2_dominant_entries_and_hungarian_bound():
    cmax = np.array([[9.0, 1.0, 1.0], [1.0, 8.0, 1.0], [1.0, 1.0, 7.0]])
    r = baseline2_greedy_max_power(cmax, np.zeros(3), 0.04, 0.16)
    assert r.pairs == [(0, 0), (1, 1), (2, 2)]
    rng = np.random.default_rng(5)
    for _ in range(100):
        cmax = rng.uniform(0, 5, (5, 5))
        hm = solve_assignment(AssignmentProblem(cmax, "maximize")).objective_value
        for fn in (baseline2_greedy_max_power, baseline5_greedy_sequential):
            res = fn(cmax, np.zeros(5), 0.04, 0.16)
            assert sum(cmax[i, j] for i, j in res.pairs) <= hm + 1e-12


def test_baseline4_properties():
    cmax = np.array([[1.5]])
    a = baseline4_random_pairing(cmax, [3.0], 0.04, 0.16, seed=3)
    b = baseline2_greedy_max_power(cmax, [3.0], 0.04, 0.16)
    assert (a.pairs, a.sum_capacity) == (b.pairs, b.sum_capacity)
    cmax = np.random.default_rng(6).uniform(0, 5, (6, 8))
    r1 = baseline4_random_pairing(cmax, np.zeros(6), 0.04, 0.16, seed=11)
    r2 = baseline4_random_pairing(cmax, np.zeros(6), 0.04, 0.16, seed=11)
    assert r1.pairs == r2.pairs and len(r1.pairs) == 6
    assert baseline4_random_pairing(cmax.T, np.zeros(8), 0.04, 0.16, seed=1).complete


def test_baseline5_symmetric_and_crafted():
    sym = np.array([[3.0, 2.0, 1.0], [2.0, 1.5, 0.5], [1.0, 0.5, 0.2]])
    assert (baseline5_greedy_sequential(sym, np.zeros(3), 0.04, 0.16).pairs
            == baseline2_greedy_max_power(sym, np.zeros(3), 0.04, 0.16).pairs)
    crafted = np.array([[1.0, 5.0, 2.0], [4.0, 3.0, 1.0], [2.0, 1.0, 6.0]])
    b5 = baseline5_greedy_sequential(crafted, np.zeros(3), 0.04, 0.16)
    assert b5.pairs == [(0, 1), (1, 0), (2, 2)]
    b4 = baseline4_random_pairing(crafted, np.zeros(3), 0.04, 0.16, seed=0)
    assert b4.pairs != b5.pairs
    # HCU order matters for the sequential rule but not for the global one
    order = np.array([[5.0, 4.0], [6.0, 1.0]])
    assert baseline5_greedy_sequential(order, np.zeros(2), 1, 1).pairs == [(0, 0), (1, 1)]
    assert baseline2_greedy_max_power(order, np.zeros(2), 1, 1).pairs == [(0, 1), (1, 0)]


@pytest.fixture(scope="module")
def scenarios():
    out = []
    for seed in range(8):
        for ratio in (0.2, 1.0):
            cfg = ScenarioConfig(n_hcu=10, n_lcu_pairs=int(10 * ratio), seed=seed)
            out.append(prepare(generate(cfg)))
    return out


def test_scenario_dominance_and_reliability(scenarios):
    for problem in scenarios:
        a1 = run_method(problem, "algo1")
        a2 = run_method(problem, "algo2")
        assert a1.sum_capacity >= a2.sum_capacity - 1e-9
        assert a2.min_capacity >= a1.min_capacity - 1e-12
        for r in (a1, a2):
            assert np.all(r.lcu_outage <= problem.qos.outage_max + 1e-9)
            assert np.all(r.reliable)
            assert r.feasible_sum == pytest.approx(r.sum_capacity)
            assert all(r.hcu_capacity[i] >= problem.qos.cap_min_hcu for i, _ in r.pairs)


def test_baseline_results_are_annotated(scenarios):
    problem = scenarios[-1]
    for m in ("baseline2", "baseline4", "baseline5"):
        r = run_method(problem, m, seed=4)
        assert r.lcu_outage.shape == (len(r.pairs),)
        assert all(a.p_hcu == problem.limits.p_max_hcu for a in r.powers)
        dropped = sum(r.hcu_capacity[i] for (i, _), ok in zip(r.pairs, r.reliable) if not ok)
        assert r.feasible_sum == pytest.approx(r.sum_capacity - dropped)


def test_baseline4_mean_below_algo1(scenarios):
    diffs = [run_method(p, "algo1").sum_capacity - run_method(p, "baseline4", seed=s).sum_capacity
             for s, p in enumerate(scenarios)]
    assert np.mean(diffs) >= 0


def test_energy_flags_follow_budget():
    cfg = ScenarioConfig(n_hcu=6, n_lcu_pairs=6, seed=2,
                         energy=EnergyModel(p_prop=1.0, slot_duration=1.0, horizon=10,
                                            e_max=10 * (1 + 0.1)))
    inst = generate(cfg)
    r = allocate(inst, "algo1")
    p_hcu = np.full(6, cfg.limits.p_max_hcu)
    p_lcu = np.zeros(6)
    for (i, j), a in zip(r.pairs, r.powers):
        p_hcu[i], p_lcu[j] = a.p_hcu, a.p_lcu
    expect = np.concatenate([p_hcu, p_lcu]) <= 0.1
    assert np.array_equal(r.energy_feasible, expect)
    assert allocate(generate(cfg.replace(energy=EnergyModel())), "algo1").energy_feasible.all()


def test_determinism():
    inst = generate(ScenarioConfig(n_hcu=8, n_lcu_pairs=6, seed=9))
    for m in Method:
        a, b = allocate(inst, m), allocate(generate(inst.config), m)
        assert a.to_dict() == b.to_dict()


def test_empty_scenarios():
    for I, J in ((0, 0), (3, 0), (0, 3)):
        problem = prepare(generate(ScenarioConfig(n_hcu=I, n_lcu_pairs=J)))
        for m in Method:
            r = run_method(problem, m)
            assert r.pairs == []
            assert r.sum_capacity == pytest.approx(problem.free_caps.sum())
