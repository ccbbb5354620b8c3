"""Outage-constrained power allocation for one HCU-LCU sharing pair.

Under unit-mean exponential fading on both the LCU direct link and the
HCU->LCU interference link, the LCU outage probability has a closed form.
Bounding it by ``P_o`` gives the largest tolerable HCU power as a monotone
function of the LCU power, and the capacity-optimal operating point sits
where that curve meets one of the two power caps.

All functions broadcast over numpy arrays held in :class:`PairGains`.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .channel import db_to_linear
from .mathkernels import Tolerance, bisect_increasing


@dataclass(frozen=True)
class PowerLimits:
    p_max_hcu: float = db_to_linear(16.0, "dbm")
    p_max_lcu: float = db_to_linear(22.0, "dbm")
    noise: float = db_to_linear(-114.0, "dbm")

    def __post_init__(self):
        if min(self.p_max_hcu, self.p_max_lcu, self.noise) <= 0:
            raise ValueError("power limits and noise must be strictly positive")


@dataclass(frozen=True)
class QosRequirements:
    sinr_min_lcu: float = db_to_linear(5.0)
    outage_max: float = 1e-3
    cap_min_hcu: float = 0.5

    def __post_init__(self):
        if not self.sinr_min_lcu > 0:
            raise ValueError("LCU SINR threshold must be positive")
        if not 0 < self.outage_max < 1:
            raise ValueError("outage target must lie in (0, 1)")
        if self.cap_min_hcu < 0:
            raise ValueError("HCU capacity floor must be non-negative")


class BoundaryCase(enum.IntEnum):
    SCENARIO1 = 0  # LCU at its cap, HCU limited by the reliability curve
    SCENARIO2 = 1  # HCU at its cap, LCU lowered onto the reliability curve
    INFEASIBLE = 2  # LCU misses the target even without interference
    FIXED = 3  # both powers pinned at their caps, reliability not enforced


@dataclass(frozen=True)
class PowerAllocation:
    p_hcu: float
    p_lcu: float
    boundary_case: BoundaryCase

    @property
    def feasible(self):
        return self.boundary_case != BoundaryCase.INFEASIBLE


def outage_probability(p_h, p_l, gains, qos, noise):
    """Closed-form LCU outage Pr{SINR <= gamma_0} under Rayleigh fading.

    ``p_l == 0`` means no useful signal, i.e. outage 1.
    """
    p_h = np.asarray(p_h, dtype=float)
    p_l = np.asarray(p_l, dtype=float)
    g0 = qos.sinr_min_lcu
    sig = p_l * gains.a_jj
    with np.errstate(divide="ignore", invalid="ignore"):
        survive = sig * np.exp(-g0 * noise / sig) / (sig + g0 * p_h * gains.a_ij)
    out = np.where(sig > 0, 1.0 - survive, 1.0)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def hcu_power_bound_f(p_l, gains, qos, noise):
    """Largest HCU power that keeps the LCU outage at or below ``P_o``.

    Negative below :func:`lcu_power_min` (no HCU power is tolerable there).
    """
    p_l = np.asarray(p_l, dtype=float)
    if np.any(p_l <= 0):
        raise ValueError("LCU power must be positive")
    g0 = qos.sinr_min_lcu
    margin = np.exp(-g0 * noise / (p_l * gains.a_jj)) / (1.0 - qos.outage_max) - 1.0
    out = gains.a_jj * p_l / (g0 * gains.a_ij) * margin
    return out if np.ndim(out) else float(out)


def lcu_power_min(gains, qos, noise):
    """Zero crossing of the bound: the LCU power meeting ``P_o`` with no interference."""
    out = -qos.sinr_min_lcu * noise / (np.asarray(gains.a_jj) * np.log1p(-qos.outage_max))
    return out if np.ndim(out) else float(out)


def hcu_power_bound_inverse(y, gains, qos, noise, p_l_max, tol=Tolerance()):
    """LCU power at which the bound reaches ``y`` (``f^-1(y)``), by bisection.

    The search runs over the offset above the zero crossing with a relative
    width criterion, which keeps ``f(f^-1(y))`` within a small relative error
    of ``y`` even when the root sits just above the zero crossing. Where the
    bound never reaches ``y`` below ``p_l_max`` the cap ``p_l_max`` is
    returned. Entries with ``p_l_min >= p_l_max`` come back as NaN.
    """
    y, p_cap = np.broadcast_arrays(np.asarray(y, dtype=float),
                                   np.asarray(p_l_max, dtype=float))
    p_min = lcu_power_min(gains, qos, noise)
    shape = np.broadcast_shapes(y.shape, np.shape(p_min), np.shape(gains.a_ij))
    y = np.broadcast_to(y, shape)
    p_cap = np.broadcast_to(p_cap, shape)
    p_min = np.broadcast_to(np.asarray(p_min, dtype=float), shape)
    # gains broadcast to the full grid so the solver can mask entries
    full = {n: np.broadcast_to(np.asarray(getattr(gains, n), dtype=float), shape)
            for n in ("a_jj", "a_ij")}

    out = np.full(shape, np.nan)
    valid = p_min < p_cap
    f_cap = np.full(shape, -np.inf)
    if valid.any():
        sub = _SubGains(full["a_jj"][valid], full["a_ij"][valid])
        f_cap[valid] = hcu_power_bound_f(p_cap[valid], sub, qos, noise)
    capped = valid & (f_cap < y)
    out[capped] = p_cap[capped]
    solve = valid & ~capped & (y > 0)
    out[valid & ~capped & (y <= 0)] = p_min[valid & ~capped & (y <= 0)]
    if solve.any():
        sub = _SubGains(full["a_jj"][solve], full["a_ij"][solve])
        base = p_min[solve]

        def f_offset(d):
            return hcu_power_bound_f(base + d, sub, qos, noise)

        lo = base * 1e-12
        hi = p_cap[solve] - base
        d = bisect_increasing(f_offset, y[solve], lo, hi, tol, relative=True)
        out[solve] = base + d
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class _SubGains:
    a_jj: np.ndarray
    a_ij: np.ndarray


def optimal_powers(gains, limits, qos, tol=Tolerance()):
    """Vectorised boundary-optimal powers.

    Returns:
        ``(p_hcu, p_lcu, case)`` arrays of the broadcast shape of ``gains``;
        ``case`` holds :class:`BoundaryCase` codes. Infeasible entries carry
        zero powers.
    """
    noise = limits.noise
    p_min = np.asarray(lcu_power_min(gains, qos, noise), dtype=float)
    shape = np.broadcast_shapes(p_min.shape, np.shape(gains.a_ij))
    p_min = np.broadcast_to(p_min, shape)
    feasible = p_min < limits.p_max_lcu

    f_at_cap = np.asarray(hcu_power_bound_f(limits.p_max_lcu, gains, qos, noise), dtype=float)
    f_at_cap = np.broadcast_to(f_at_cap, shape)
    feasible = feasible & (f_at_cap > 0)
    scen2 = feasible & (f_at_cap >= limits.p_max_hcu)
    scen1 = feasible & ~scen2

    p_h = np.zeros(shape)
    p_l = np.zeros(shape)
    p_h[scen1] = f_at_cap[scen1]
    p_l[scen1] = limits.p_max_lcu
    if scen2.any():
        p_h[scen2] = limits.p_max_hcu
        inv = hcu_power_bound_inverse(limits.p_max_hcu, gains, qos, noise,
                                      limits.p_max_lcu, tol)
        p_l[scen2] = np.broadcast_to(inv, shape)[scen2]

    case = np.full(shape, BoundaryCase.INFEASIBLE, dtype=int)
    case[scen1] = BoundaryCase.SCENARIO1
    case[scen2] = BoundaryCase.SCENARIO2
    return p_h, p_l, case


def optimal_pair_powers(gains, limits, qos, tol=Tolerance()):
    """Capacity-optimal powers for a single sharing pair.

    ``P_h* = min(P_m^h, f(P_m^l))`` and ``P_l* = min(P_m^l, f^-1(P_m^h))``.
    A pair whose LCU cannot meet the reliability target even alone is
    returned with ``boundary_case == INFEASIBLE`` instead of raising.
    """
    p_h, p_l, case = optimal_powers(gains, limits, qos, tol)
    return PowerAllocation(float(p_h), float(p_l), BoundaryCase(int(case)))
