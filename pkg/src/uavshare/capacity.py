"""Ergodic HCU capacity under spectrum sharing and the C*_{i,j} matrix.

With unit-exponential fading U on the HCU link and V on the LCU
interference link, the HCU capacity is E[log2(1 + rho U / (1 + eta V))],
which integrates to a difference of scaled exponential integrals.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .mathkernels import Tolerance, scaled_e1
from .power import BoundaryCase, optimal_powers

LN2 = np.log(2.0)
NEAR_EQUAL_RTOL = 1e-6


class ConnectivityMode(str, enum.Enum):
    MC_COMBINED = "mc-combined"
    MC_PER_LINK_SUM = "mc-sum"
    SC_RBS_ONLY = "sc"


class SentinelReason(enum.IntEnum):
    FEASIBLE = 0
    BELOW_FLOOR = 1
    RELIABILITY = 2


@dataclass(frozen=True)
class CapacityParams:
    rho: float
    eta: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not self.eta >= 0:
            raise ValueError("eta must be non-negative")


def _dh(s):
    # derivative of s -> e^{1/s} E1(1/s)
    return (s - scaled_e1(1.0 / s)) / (s * s)


def ergodic_capacity_shared(rho, eta=0.0):
    """Closed-form E[log2(1 + rho U / (1 + eta V))] in bits/s/Hz.

    Handles ``eta == 0`` (no interferer) and ``rho ~= eta`` (removable
    singularity, evaluated through the exact derivative at the midpoint).
    ``rho`` may also be a :class:`CapacityParams`. Broadcasts over arrays.
    """
    if isinstance(rho, CapacityParams):
        rho, eta = rho.rho, rho.eta
    rho, eta = np.broadcast_arrays(np.asarray(rho, dtype=float),
                                   np.asarray(eta, dtype=float))
    if np.any(~(rho > 0)):
        raise ValueError("rho must be positive")
    if np.any(~(eta >= 0)):
        raise ValueError("eta must be non-negative")
    shape = rho.shape
    rho = rho.ravel()
    eta = eta.ravel()
    out = np.empty(rho.shape)

    free = eta == 0
    near = ~free & (np.abs(rho - eta) <= NEAR_EQUAL_RTOL * np.maximum(rho, eta))
    gen = ~free & ~near
    if free.any():
        out[free] = scaled_e1(1.0 / rho[free]) / LN2
    if near.any():
        r = rho[near]
        out[near] = r * _dh(0.5 * (r + eta[near])) / LN2
    if gen.any():
        r, e = rho[gen], eta[gen]
        out[gen] = r / ((r - e) * LN2) * (scaled_e1(1.0 / r) - scaled_e1(1.0 / e))
    return out.reshape(shape) if shape else float(out[0])


def w_cdf(w, rho, eta):
    """CDF of W = rho U / (1 + eta V) for unit exponentials U, V."""
    w = np.asarray(w, dtype=float)
    out = np.where(w > 0, 1.0 - np.exp(-np.maximum(w, 0) / rho) * rho / (rho + eta * np.maximum(w, 0)), 0.0)
    return out if out.ndim else float(out)


def _cap(rho, eta):
    return np.asarray(ergodic_capacity_shared(rho, eta), dtype=float)


def pair_capacity(p_h, p_l, gains, noise, mode=ConnectivityMode.MC_COMBINED):
    """HCU capacity when sharing its band with an LCU transmitting at ``p_l``.

    ``MC_COMBINED`` evaluates one closed form on the summed RBS+HAP gains,
    ``MC_PER_LINK_SUM`` adds the RBS-leg and HAP-leg capacities, and
    ``SC_RBS_ONLY`` keeps the RBS leg alone.
    """
    mode = ConnectivityMode(mode)
    p_h = np.asarray(p_h, dtype=float)
    p_l = np.asarray(p_l, dtype=float)
    if np.any(p_h < 0) or np.any(p_l < 0):
        raise ValueError("powers must be non-negative")
    if mode is ConnectivityMode.MC_COMBINED:
        out = _cap(p_h * (gains.a_iR + gains.a_iH) / noise,
                   p_l * (gains.a_jR + gains.a_jH) / noise)
    elif mode is ConnectivityMode.MC_PER_LINK_SUM:
        out = (_cap(p_h * gains.a_iR / noise, p_l * gains.a_jR / noise)
               + _cap(p_h * gains.a_iH / noise, p_l * gains.a_jH / noise))
    else:
        out = _cap(p_h * gains.a_iR / noise, p_l * gains.a_jR / noise)
    return out if out.ndim else float(out)


def interference_free_capacity(p_h, a_iR, a_iH, noise, mode=ConnectivityMode.MC_COMBINED):
    """Capacity of an HCU keeping its band to itself (no LCU on it)."""
    mode = ConnectivityMode(mode)
    p_h = np.asarray(p_h, dtype=float)
    if mode is ConnectivityMode.MC_COMBINED:
        out = _cap(p_h * (np.asarray(a_iR) + a_iH) / noise, 0.0)
    elif mode is ConnectivityMode.MC_PER_LINK_SUM:
        out = _cap(p_h * np.asarray(a_iR) / noise, 0.0) + _cap(p_h * np.asarray(a_iH) / noise, 0.0)
    else:
        out = _cap(p_h * np.asarray(a_iR) / noise, 0.0)
    return out if out.ndim else float(out)


@dataclass
class CapacityMatrix:
    """C*_{i,j} grid; infeasible pairs hold ``-inf`` with a reason code.

    Attributes:
        values: I x J capacities after the floor filter (``-inf`` sentinel).
        raw: Capacities before filtering (NaN for reliability-infeasible pairs).
        reason: :class:`SentinelReason` codes per entry.
        cap_min: The floor ``C_0^h`` used by the filter.
    """

    values: np.ndarray
    raw: np.ndarray
    reason: np.ndarray
    cap_min: float

    @property
    def i_count(self):
        return self.values.shape[0]

    @property
    def j_count(self):
        return self.values.shape[1]

    @property
    def feasible(self):
        return np.isfinite(self.values)


@dataclass
class PowerGrid:
    p_hcu: np.ndarray
    p_lcu: np.ndarray
    case: np.ndarray


def build_capacity_matrix(gains, limits, qos, mode=ConnectivityMode.MC_COMBINED,
                          tol=Tolerance()):
    """Optimal powers and capacities for every candidate pair, then the floor filter.

    Args:
        gains: Broadcastable :class:`PairGains` spanning the I x J grid
            (HCU terms shaped ``(I, 1)``, LCU terms ``(1, J)``, cross gains
            ``(I, J)``).

    Returns:
        ``(CapacityMatrix, PowerGrid)``.
    """
    p_h, p_l, case = optimal_powers(gains, limits, qos, tol)
    shape = case.shape
    raw = np.full(shape, np.nan)
    ok = case != BoundaryCase.INFEASIBLE
    if ok.any():
        full = {n: np.broadcast_to(np.asarray(getattr(gains, n), dtype=float), shape)[ok]
                for n in ("a_iR", "a_iH", "a_jR", "a_jH")}
        sub = _Legs(**full)
        raw[ok] = pair_capacity(p_h[ok], p_l[ok], sub, limits.noise, mode)
    reason = np.full(shape, SentinelReason.FEASIBLE, dtype=int)
    reason[~ok] = SentinelReason.RELIABILITY
    reason[ok & (raw < qos.cap_min_hcu)] = SentinelReason.BELOW_FLOOR
    values = np.where(reason == SentinelReason.FEASIBLE, raw, -np.inf)
    return (CapacityMatrix(values=values, raw=raw, reason=reason, cap_min=qos.cap_min_hcu),
            PowerGrid(p_hcu=p_h, p_lcu=p_l, case=case))


@dataclass(frozen=True)
class _Legs:
    a_iR: np.ndarray
    a_iH: np.ndarray
    a_jR: np.ndarray
    a_jH: np.ndarray
