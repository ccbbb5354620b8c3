"""Small-instance oracle checks behind the ``validate`` and ``mc-check`` commands.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
comparison, so a report can always be printed in full.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .algorithms import algo2_max_min
from .assignment import AssignmentProblem, solve_assignment
from .capacity import CapacityMatrix, PowerGrid, ergodic_capacity_shared, pair_capacity, w_cdf
from .channel import PairGains, db_to_linear
from .montecarlo import SamplingConfig, empirical_capacity, empirical_outage, ks_distance_w
from .power import (PowerLimits, QosRequirements, hcu_power_bound_f, lcu_power_min,
                    optimal_pair_powers, outage_probability)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def brute_force_assignment(cost, objective="minimize"):
    """Exhaustive optimum over all maximum-cardinality allowed assignments.

    Returns ``(n_pairs, best_value)``.
    """
    cost = np.asarray(cost, dtype=float)
    R, C = cost.shape
    sign = 1.0 if objective == "minimize" else -1.0
    best = (-1, np.inf)
    transpose = R > C
    a = cost.T if transpose else cost
    r, c = a.shape
    for cols in itertools.permutations(range(c), r):
        vals = [a[i, j] for i, j in enumerate(cols) if np.isfinite(a[i, j])]
        key = (len(vals), sign * sum(vals))
        if key[0] > best[0] or (key[0] == best[0] and key[1] < best[1]):
            best = key
    return best[0], sign * best[1]


def brute_force_max_min(values):
    """Largest achievable minimum over complete assignments of a square grid."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    return max(min(values[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def _capacity_matrix(values):
    values = np.asarray(values, dtype=float)
    z = np.zeros(values.shape)
    return (CapacityMatrix(values, values.copy(), z.astype(int), 0.0),
            PowerGrid(z + 1.0, z + 1.0, z.astype(int)))


def check_assignment(n_cases=100, max_size=7, seed=0):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_cases):
        r, c = rng.integers(1, max_size + 1, 2)
        cost = rng.integers(0, 20, (r, c)).astype(float)
        cost[rng.random((r, c)) < 0.25] = np.inf
        objective = "maximize" if rng.random() < 0.5 else "minimize"
        if objective == "maximize":
            cost[np.isinf(cost)] = -np.inf
        res = solve_assignment(AssignmentProblem(cost, objective))
        k, best = brute_force_assignment(cost, objective)
        if len(res.pairs) != k or abs(res.objective_value - best) > 1e-9:
            bad += 1
    return CheckResult("assignment vs brute force", bad == 0, f"{bad}/{n_cases} mismatches")


def check_max_min(n_cases=100, size=6, seed=1):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n_cases):
        vals = rng.uniform(0.5, 10.0, (size, size))
        m, p = _capacity_matrix(vals)
        res = algo2_max_min(m, p, np.full(size, 1e9))
        got = min(vals[i, j] for i, j in res.pairs)
        if len(res.pairs) != size or got != brute_force_max_min(vals):
            bad += 1
    ex = algo2_max_min(*_capacity_matrix([[3.0, 1.0], [2.0, 4.0]]), np.full(2, 1e9))
    ok = bad == 0 and ex.pairs == [(0, 0), (1, 1)]
    return CheckResult("max-min pairing vs brute force", ok, f"{bad}/{n_cases} mismatches")


def random_pair_gains(rng):
    """Scalar PairGains with magnitudes typical of the default scenarios."""
    return PairGains(
        a_jj=10 ** rng.uniform(-8.5, -6.0), a_ij=10 ** rng.uniform(-10.5, -8.0),
        a_iR=10 ** rng.uniform(-10.0, -8.0), a_iH=10 ** rng.uniform(-12.0, -11.0),
        a_jR=10 ** rng.uniform(-10.0, -8.0), a_jH=10 ** rng.uniform(-12.0, -11.0),
    )


def grid_search_powers(gains, limits, qos, mode="mc-combined", n=500, spacing="linear"):
    """Best pair capacity over an n x n power grid subject to the outage target.

    ``spacing="linear"`` spans [0, P_max] uniformly. ``"mixed"`` merges
    n/2 uniform points with n/2 points spaced logarithmically over
    [1e-7 P_max, P_max], which also resolves optima far below the caps.
    """
    def axis(p_max):
        if spacing == "linear":
            return np.linspace(0.0, p_max, n)
        if spacing == "mixed":
            half = n // 2
            pts = np.concatenate([np.linspace(p_max / (n - half), p_max, n - half),
                                  np.geomspace(1e-7 * p_max, p_max, half + 1)[:-1]])
            return np.sort(pts)
        raise ValueError(f"unknown spacing {spacing!r}")

    ph = axis(limits.p_max_hcu)
    pl = axis(limits.p_max_lcu)
    PH, PL = np.meshgrid(ph, pl, indexing="ij")
    ok = outage_probability(PH, PL, gains, qos, limits.noise) <= qos.outage_max
    if not ok.any():
        return np.nan
    ok_on = ok & (PH > 0)  # a silent HCU has zero capacity
    if not ok_on.any():
        return 0.0
    cap = pair_capacity(PH[ok_on], PL[ok_on], gains, limits.noise, mode)
    return float(np.max(cap))


def check_power_allocation(n_cases=20, grid=500, seed=2):
    rng = np.random.default_rng(seed)
    limits, qos = PowerLimits(), QosRequirements()
    worst = 0.0
    bad = 0
    used = 0
    while used < n_cases:
        g = random_pair_gains(rng)
        alloc = optimal_pair_powers(g, limits, qos)
        if not alloc.feasible:
            continue
        used += 1
        c_opt = pair_capacity(alloc.p_hcu, alloc.p_lcu, g, limits.noise)
        c_grid = grid_search_powers(g, limits, qos, n=grid, spacing="mixed")
        rel = abs(c_grid - c_opt) / c_opt
        worst = max(worst, rel)
        at_cap = (np.isclose(alloc.p_hcu, limits.p_max_hcu, rtol=1e-12)
                  or np.isclose(alloc.p_lcu, limits.p_max_lcu, rtol=1e-12))
        p_min = lcu_power_min(g, qos, limits.noise)
        f0 = hcu_power_bound_f(p_min, g, qos, limits.noise)
        scale = g.a_jj * p_min / (qos.sinr_min_lcu * g.a_ij)
        if rel > 0.005 or not at_cap or abs(f0) > 1e-9 * scale:
            bad += 1
    return CheckResult("power allocation vs grid search", bad == 0,
                       f"{bad}/{n_cases} failures, worst relative gap {worst:.2e}")


def run_validation(seed=0):
    """The full small-instance oracle suite used by ``validate``."""
    return [
        check_assignment(seed=seed),
        check_max_min(seed=seed + 1),
        check_power_allocation(seed=seed + 2),
    ]


def run_mc_check(n_samples=200_000, seed=0):
    """Closed forms against sampling at a handful of fixed points."""
    cfg = SamplingConfig(n_samples=n_samples, seed=seed)
    out = []
    qos = QosRequirements(sinr_min_lcu=db_to_linear(5.0), outage_max=1e-2)
    noise = db_to_linear(-114.0, "dbm")
    rng = np.random.default_rng(seed)
    for k in range(5):
        g = random_pair_gains(rng)
        p_h, p_l = rng.uniform(0.005, 0.04), rng.uniform(0.02, 0.16)
        closed = outage_probability(p_h, p_l, g, qos, noise)
        emp, se = empirical_outage(p_h, p_l, g, qos, noise, cfg, link_id=k)
        ok = abs(closed - emp) <= cfg.confidence_z * max(se, 1e-12)
        out.append(CheckResult(f"outage #{k}", ok, f"closed {closed:.5g} mc {emp:.5g} se {se:.2g}"))
    for k, (rho, eta) in enumerate([(1.0, 0.0), (10.0, 1.0), (5.0, 5.0), (100.0, 3.0), (0.3, 2.0)]):
        closed = ergodic_capacity_shared(rho, eta)
        emp, se = empirical_capacity(rho, eta, cfg, link_id=100 + k)
        ok = abs(closed - emp) <= max(0.01 * closed, cfg.confidence_z * se)
        out.append(CheckResult(f"capacity rho={rho} eta={eta}", ok,
                               f"closed {closed:.5g} mc {emp:.5g} se {se:.2g}"))
    for k, (rho, eta) in enumerate([(1.0, 0.5), (20.0, 4.0)]):
        d = ks_distance_w(rho, eta, cfg, lambda w: w_cdf(w, rho, eta), link_id=200 + k)
        bound = 1.63 / np.sqrt(n_samples)  # 1% KS critical value
        out.append(CheckResult(f"cdf rho={rho} eta={eta}", d < bound,
                               f"KS {d:.2e} (1% critical {bound:.2e})"))
    return out
