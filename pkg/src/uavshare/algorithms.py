"""Sum-capacity and max-min pairing algorithms plus the comparison baselines.

Every method returns an :class:`AllocationResult`. HCUs left without an LCU
keep their band to themselves and are counted at their interference-free
capacity in both the sum and the minimum.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .assignment import AssignmentProblem, min_total_binary_cost, solve_assignment
from .capacity import (ConnectivityMode, build_capacity_matrix, interference_free_capacity,
                       pair_capacity)
from .mathkernels import Tolerance
from .power import BoundaryCase, PowerAllocation, outage_probability


class Method(str, enum.Enum):
    ALGO1 = "algo1"
    ALGO2 = "algo2"
    BASELINE1 = "baseline1"
    BASELINE2 = "baseline2"
    BASELINE3 = "baseline3"
    BASELINE4 = "baseline4"
    BASELINE5 = "baseline5"


SHARING_METHODS = (Method.ALGO1, Method.ALGO2, Method.BASELINE2, Method.BASELINE4,
                   Method.BASELINE5)


@dataclass
class AllocationResult:
    """Outcome of one pairing method on one scenario.

    Attributes:
        pairs: ``(hcu, lcu)`` index pairs, sorted by HCU.
        powers: One :class:`PowerAllocation` per pair.
        hcu_capacity: Per-HCU capacity (bits/s/Hz); unpaired HCUs hold
            their interference-free value.
        lcu_denied: LCUs with no feasible partner at all.
        unpaired_hcu / unpaired_lcu: Indices left without a partner.
        lcu_outage: Closed-form LCU outage per pair (NaN until annotated).
        reliable: Per pair, whether the outage target and the HCU capacity
            floor both hold at the allocated powers.
        feasible_sum: Sum capacity with unreliable pairs contributing zero.
        energy_feasible: Per UAV (HCUs, then LCU transmitters) energy flag.
    """

    method: Method
    pairs: list
    powers: list
    hcu_capacity: np.ndarray
    sum_capacity: float
    min_capacity: float
    lcu_denied: list
    unpaired_hcu: list
    unpaired_lcu: list
    complete: bool
    lcu_outage: np.ndarray = field(default=None)
    reliable: np.ndarray = field(default=None)
    feasible_sum: float = float("nan")
    energy_feasible: np.ndarray = field(default=None)
    threshold: float = float("nan")

    def to_dict(self):
        """Plain-Python view suitable for JSON output."""
        return {
            "method": self.method.value,
            "sum_capacity": self.sum_capacity,
            "min_capacity": self.min_capacity,
            "feasible_sum": self.feasible_sum,
            "complete": self.complete,
            "pairs": [
                {"hcu": i, "lcu": j, "p_hcu": a.p_hcu, "p_lcu": a.p_lcu,
                 "case": a.boundary_case.name.lower(),
                 "capacity": float(self.hcu_capacity[i]),
                 "lcu_outage": None if self.lcu_outage is None else float(self.lcu_outage[k])}
                for k, ((i, j), a) in enumerate(zip(self.pairs, self.powers))
            ],
            "hcu_capacity": self.hcu_capacity.tolist(),
            "unpaired_hcu": self.unpaired_hcu,
            "unpaired_lcu": self.unpaired_lcu,
            "lcu_denied": self.lcu_denied,
            "energy_feasible": None if self.energy_feasible is None
            else self.energy_feasible.tolist(),
        }


def _result(method, pairs, pair_caps, powers, free_caps, n_lcu, denied=(), threshold=np.nan):
    free_caps = np.asarray(free_caps, dtype=float)
    order = np.argsort([i for i, _ in pairs], kind="stable")
    pairs = [tuple(int(x) for x in pairs[k]) for k in order]
    powers = [powers[k] for k in order]
    caps = free_caps.copy()
    for (i, _), c in zip(pairs, np.asarray(pair_caps, dtype=float)[order]):
        caps[i] = c
    hcus = {i for i, _ in pairs}
    lcus = {j for _, j in pairs}
    n_hcu = free_caps.size
    return AllocationResult(
        method=Method(method),
        pairs=pairs,
        powers=powers,
        hcu_capacity=caps,
        sum_capacity=float(caps.sum()),
        min_capacity=float(caps.min()) if caps.size else float("nan"),
        lcu_denied=sorted(int(j) for j in denied),
        unpaired_hcu=[i for i in range(n_hcu) if i not in hcus],
        unpaired_lcu=[j for j in range(n_lcu) if j not in lcus],
        complete=len(pairs) == min(n_hcu, n_lcu),
        threshold=float(threshold),
    )


def _denied(matrix):
    return np.flatnonzero(~matrix.feasible.any(axis=0)) if matrix.i_count else \
        np.arange(matrix.j_count)


def _shared(pairs, matrix, powers):
    caps = [matrix.values[i, j] for i, j in pairs]
    allocs = [PowerAllocation(float(powers.p_hcu[i, j]), float(powers.p_lcu[i, j]),
                              BoundaryCase(int(powers.case[i, j]))) for i, j in pairs]
    return caps, allocs


def algo1_sum_capacity(matrix, powers, unpaired_capacities):
    """Pairing that maximises the sum of HCU capacities (Hungarian method).

    The largest possible number of feasible pairs is formed; among those
    pairings the total capacity, unpaired HCUs included, is maximised. With
    at least as many LCUs as HCUs and a complete feasible pairing this is
    exactly the maximum of the summed shared capacities.
    """
    free = np.asarray(unpaired_capacities, dtype=float)
    denied = _denied(matrix)
    pairs = []
    if matrix.i_count and matrix.j_count and matrix.feasible.any():
        profit = matrix.values - free[:, None]
        pairs = solve_assignment(AssignmentProblem(profit, "maximize")).pairs
    caps, allocs = _shared(pairs, matrix, powers)
    return _result(Method.ALGO1, pairs, caps, allocs, free, matrix.j_count, denied)


def _bottleneck_grid(matrix, free, n_pairs):
    """Capacities over LCU columns plus ``I - n_pairs`` 'stay unpaired' columns."""
    extra = matrix.i_count - n_pairs
    return np.hstack([matrix.values, np.repeat(free[:, None], extra, axis=1)])


def algo2_max_min(matrix, powers, unpaired_capacities, refine=False):
    """Pairing that maximises the smallest HCU capacity.

    Candidate thresholds are the distinct finite capacities in descending
    order. A threshold is feasible when an assignment exists that uses only
    cells at or above it; the highest feasible one is found by bisection
    over the index, each test being one binary-cost Hungarian run.

    When no complete feasible pairing exists, the number of pairs is fixed
    at the largest achievable and each HCU may also stay unpaired at its
    interference-free capacity, so the minimum is taken over all HCUs.

    Args:
        refine: Re-run the Hungarian method for the largest sum capacity
            among pairings meeting the final threshold instead of keeping
            the pairing returned by the last feasibility test.
    """
    free = np.asarray(unpaired_capacities, dtype=float)
    denied = _denied(matrix)
    I, J = matrix.i_count, matrix.j_count
    if I == 0 or J == 0 or not matrix.feasible.any():
        return _result(Method.ALGO2, [], [], [], free, J, denied,
                       threshold=free.min() if free.size else np.nan)

    sentinel = (~matrix.feasible).astype(float)
    delta, _ = min_total_binary_cost(sentinel, canonical=False)
    n_pairs = min(I, J) - delta
    grid = _bottleneck_grid(matrix, free, n_pairs)
    g = np.unique(grid[np.isfinite(grid)])[::-1]

    memo = {}

    def binary(k):
        return np.where(np.isfinite(grid) & (grid >= g[k]), 0.0, 1.0)

    def feasible(k):
        if k not in memo:
            memo[k] = min_total_binary_cost(binary(k), canonical=False)[0] == 0
        return memo[k]

    # the lowest candidate is always feasible
    lo, hi = 0, g.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    threshold = g[hi]
    if refine:
        grid_ok = np.where(grid >= threshold, grid, -np.inf)
        chosen = solve_assignment(AssignmentProblem(grid_ok, "maximize")).pairs
    else:
        # the last feasible test, repeated with the canonical tie-break
        chosen = min_total_binary_cost(binary(hi))[1]
    pairs = [(i, j) for i, j in chosen if j < J and grid[i, j] >= threshold]
    caps, allocs = _shared(pairs, matrix, powers)
    return _result(Method.ALGO2, pairs, caps, allocs, free, J, denied, threshold=threshold)


def baseline1_no_sharing(unpaired_capacities, p_max_hcu, n_lcu=0, method=Method.BASELINE1):
    """Every HCU alone on its band at full power; no LCU is served."""
    free = np.asarray(unpaired_capacities, dtype=float)
    return _result(method, [], [], [], free, n_lcu)


def baseline3_hcu_only(unpaired_capacities, p_max_hcu, n_lcu=0):
    """Only HCUs active at full power: the same computation as baseline 1."""
    return baseline1_no_sharing(unpaired_capacities, p_max_hcu, n_lcu, Method.BASELINE3)


def _max_power_result(method, pairs, cmax, free, p_max_hcu, p_max_lcu):
    caps = [cmax[i, j] for i, j in pairs]
    allocs = [PowerAllocation(float(p_max_hcu), float(p_max_lcu), BoundaryCase.FIXED)
              for _ in pairs]
    return _result(method, pairs, caps, allocs, free, cmax.shape[1])


def baseline2_greedy_max_power(cmax, unpaired_capacities, p_max_hcu, p_max_lcu):
    """Global greedy pairing on capacity at maximum powers, highest first.

    Ties go to the smaller (HCU, LCU) index pair. No reliability check.
    """
    cmax = np.asarray(cmax, dtype=float)
    I, J = cmax.shape
    order = np.lexsort((np.tile(np.arange(J), I), np.repeat(np.arange(I), J), -cmax.ravel()))
    used_i = np.zeros(I, dtype=bool)
    used_j = np.zeros(J, dtype=bool)
    pairs = []
    for k in order:
        i, j = divmod(int(k), J)
        if not used_i[i] and not used_j[j]:
            used_i[i] = used_j[j] = True
            pairs.append((i, j))
            if len(pairs) == min(I, J):
                break
    return _max_power_result(Method.BASELINE2, pairs, cmax, unpaired_capacities,
                             p_max_hcu, p_max_lcu)


def baseline4_random_pairing(cmax, unpaired_capacities, p_max_hcu, p_max_lcu, seed=0):
    """Uniformly random complete pairing at maximum powers (seeded)."""
    cmax = np.asarray(cmax, dtype=float)
    I, J = cmax.shape
    rng = np.random.default_rng(seed)
    if I <= J:
        cols = rng.permutation(J)[:I]
        pairs = [(i, int(cols[i])) for i in range(I)]
    else:
        rows = rng.permutation(I)[:J]
        pairs = [(int(rows[j]), j) for j in range(J)]
    return _max_power_result(Method.BASELINE4, pairs, cmax, unpaired_capacities,
                             p_max_hcu, p_max_lcu)


def baseline5_greedy_sequential(cmax, unpaired_capacities, p_max_hcu, p_max_lcu):
    """HCUs in index order each grab the best remaining LCU at maximum powers."""
    cmax = np.asarray(cmax, dtype=float)
    I, J = cmax.shape
    free_j = np.ones(J, dtype=bool)
    pairs = []
    for i in range(min(I, J)):
        j = int(np.argmax(np.where(free_j, cmax[i], -np.inf)))
        free_j[j] = False
        pairs.append((i, j))
    return _max_power_result(Method.BASELINE5, pairs, cmax, unpaired_capacities,
                             p_max_hcu, p_max_lcu)


# ---- scenario-level driver -----------------------------------------------

@dataclass
class SharingProblem:
    """Everything the methods need for one scenario and connectivity mode."""

    gains: object
    limits: object
    qos: object
    mode: ConnectivityMode
    energy: object
    matrix: object
    powers: object
    free_caps: np.ndarray
    cmax: np.ndarray
    n_lcu: int


def prepare(instance, mode=None, tol=Tolerance()):
    """Build the capacity matrix, max-power capacities and free capacities."""
    cfg = instance.config
    mode = ConnectivityMode(mode if mode is not None else cfg.mode)
    gains = instance.pair_gains()
    limits, qos = cfg.limits, cfg.qos
    I, J = instance.n_hcu, instance.n_lcu
    if I and J:
        matrix, powers = build_capacity_matrix(gains, limits, qos, mode, tol)
        cmax = np.broadcast_to(
            pair_capacity(limits.p_max_hcu, limits.p_max_lcu, gains, limits.noise, mode),
            (I, J)).copy()
    else:
        from .capacity import CapacityMatrix, PowerGrid
        empty = np.zeros((I, J))
        matrix = CapacityMatrix(empty - np.inf, empty + np.nan, empty.astype(int), qos.cap_min_hcu)
        powers = PowerGrid(empty, empty, empty.astype(int))
        cmax = empty
    free = np.atleast_1d(interference_free_capacity(
        limits.p_max_hcu, instance.a_iR, instance.a_iH, limits.noise, mode)).astype(float)
    return SharingProblem(gains=gains, limits=limits, qos=qos, mode=mode, energy=cfg.energy,
                          matrix=matrix, powers=powers, free_caps=free, cmax=cmax, n_lcu=J)


@dataclass(frozen=True)
class _LcuGains:
    a_jj: np.ndarray
    a_ij: np.ndarray


def annotate(result, problem):
    """Fill closed-form outage, reliability and energy flags in place."""
    qos, noise = problem.qos, problem.limits.noise
    ii = np.array([i for i, _ in result.pairs], dtype=int)
    jj = np.array([j for _, j in result.pairs], dtype=int)
    p_h = np.array([a.p_hcu for a in result.powers])
    p_l = np.array([a.p_lcu for a in result.powers])
    shape = (result.hcu_capacity.size, problem.n_lcu)
    gains = problem.gains
    sub = _LcuGains(a_jj=np.broadcast_to(gains.a_jj, shape)[ii, jj],
                    a_ij=np.broadcast_to(gains.a_ij, shape)[ii, jj])
    outage = np.atleast_1d(outage_probability(p_h, p_l, sub, qos, noise)) if ii.size \
        else np.empty(0)
    reliable = (outage <= qos.outage_max * (1 + 1e-6)) & \
        (result.hcu_capacity[ii] >= qos.cap_min_hcu)
    result.lcu_outage = outage
    result.reliable = reliable
    caps = result.hcu_capacity.copy()
    for (i, _), ok in zip(result.pairs, reliable):
        if not ok:
            caps[i] = 0.0
    result.feasible_sum = float(caps.sum())

    model = problem.energy
    p_hcu = np.full(result.hcu_capacity.size, problem.limits.p_max_hcu)
    p_lcu = np.zeros(problem.n_lcu)
    for (i, j), a in zip(result.pairs, result.powers):
        p_hcu[i] = a.p_hcu
        p_lcu[j] = a.p_lcu
    # constant power over the horizon: same sum as total_energy, vectorised
    used = model.slot_duration * model.horizon * (model.p_prop + np.concatenate([p_hcu, p_lcu]))
    result.energy_feasible = used <= model.e_max
    return result


def run_method(problem, method, seed=0, refine=False):
    """Run one method on a prepared problem and annotate the result."""
    method = Method(method)
    lim = problem.limits
    if method is Method.ALGO1:
        res = algo1_sum_capacity(problem.matrix, problem.powers, problem.free_caps)
    elif method is Method.ALGO2:
        res = algo2_max_min(problem.matrix, problem.powers, problem.free_caps, refine)
    elif method is Method.BASELINE1:
        res = baseline1_no_sharing(problem.free_caps, lim.p_max_hcu, problem.n_lcu)
    elif method is Method.BASELINE3:
        res = baseline3_hcu_only(problem.free_caps, lim.p_max_hcu, problem.n_lcu)
    elif method is Method.BASELINE2:
        res = baseline2_greedy_max_power(problem.cmax, problem.free_caps,
                                         lim.p_max_hcu, lim.p_max_lcu)
    elif method is Method.BASELINE4:
        res = baseline4_random_pairing(problem.cmax, problem.free_caps,
                                       lim.p_max_hcu, lim.p_max_lcu, seed)
    else:
        res = baseline5_greedy_sequential(problem.cmax, problem.free_caps,
                                          lim.p_max_hcu, lim.p_max_lcu)
    return annotate(res, problem)


def allocate(instance, method, mode=None, seed=None, refine=False):
    """Convenience wrapper: prepare the scenario and run a single method."""
    problem = prepare(instance, mode)
    return run_method(problem, method, instance.config.seed if seed is None else seed, refine)
