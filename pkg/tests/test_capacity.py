import math

import numpy as np
import pytest
from scipy import integrate

from uavshare.capacity import (CapacityParams, ConnectivityMode, SentinelReason,
                               build_capacity_matrix, ergodic_capacity_shared,
                               interference_free_capacity, pair_capacity, w_cdf)
from uavshare.channel import PairGains, db_to_linear
from uavshare.power import PowerLimits, QosRequirements, optimal_pair_powers

NOISE = db_to_linear(-114.0, "dbm")


def quad_capacity(rho, eta):
    """E[log2(1 + rho U / (1 + eta V))] by direct 2-D quadrature."""
    def inner(v):
        f = lambda u: math.log1p(rho * u / (1 + eta * v)) * math.exp(-u)
        return integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-11, limit=200)[0]
    val, _ = integrate.quad(lambda v: inner(v) * math.exp(-v), 0, np.inf, epsabs=0,
                            epsrel=1e-10, limit=200)
    return val / math.log(2)


@pytest.mark.parametrize("rho,eta", [(1.0, 0.0), (0.05, 0.0), (30.0, 0.0), (10.0, 1.0),
                                     (2.0, 5.0), (0.3, 0.3), (50.0, 49.99999), (100.0, 3.0)])
def test_closed_form_matches_quadrature(rho, eta):
    assert ergodic_capacity_shared(rho, eta) == pytest.approx(quad_capacity(rho, eta), rel=1e-7)


def test_interference_free_reference():
    c = ergodic_capacity_shared(1.0, 0.0)
    assert c == pytest.approx(0.5963473623231940 / math.log(2), rel=1e-12)
    assert c == pytest.approx(0.86035, abs=1e-5)


@pytest.mark.parametrize("rho", [1e-3, 0.1, 1.0, 17.0, 1e4])
def test_continuity_across_rho_equal_eta(rho):
    c0 = ergodic_capacity_shared(rho, rho)
    for f in (1 - 1e-7, 1 + 1e-7, 1 - 2e-6, 1 + 2e-6):
        assert abs(ergodic_capacity_shared(rho, rho * f) - c0) < 1e-5
    assert np.isfinite(c0) and c0 > 0


def test_monotonicity():
    r = np.logspace(-2, 3, 60)
    for eta in (0.0, 0.5, 5.0, 100.0):
        assert np.all(np.diff(ergodic_capacity_shared(r, eta)) > 0)
    e = np.logspace(-3, 3, 60)
    for rho in (0.1, 3.0, 300.0):
        assert np.all(np.diff(ergodic_capacity_shared(rho, e)) < 0)


def test_params_and_domain():
    assert ergodic_capacity_shared(CapacityParams(4.0, 2.0)) == ergodic_capacity_shared(4.0, 2.0)
    with pytest.raises(ValueError):
        ergodic_capacity_shared(0.0, 1.0)
    with pytest.raises(ValueError):
        ergodic_capacity_shared(1.0, -1.0)
    with pytest.raises(ValueError):
        CapacityParams(-1.0, 0.0)


def test_w_cdf_limits_and_density():
    assert w_cdf(0.0, 2.0, 1.0) == 0.0
    assert w_cdf(1e6, 2.0, 1.0) == pytest.approx(1.0, abs=1e-9)
    w = np.linspace(0, 40, 400)
    assert np.all(np.diff(w_cdf(w, 3.0, 0.7)) >= 0)
    # E[log2(1+W)] from the CDF agrees with the closed form
    rho, eta = 3.0, 0.7
    tail = integrate.quad(lambda x: (1 - w_cdf(x, rho, eta)) / (1 + x), 0, np.inf, limit=200)[0]
    assert tail / math.log(2) == pytest.approx(ergodic_capacity_shared(rho, eta), rel=1e-8)


def gains(**kw):
    base = dict(a_jj=1e-7, a_ij=1e-9, a_iR=2e-9, a_iH=1e-11, a_jR=1e-9, a_jH=1e-11)
    base.update(kw)
    return PairGains(**base)


def test_sc_with_silent_lcu_is_interference_free():
    g = gains()
    c = pair_capacity(0.03, 0.0, g, NOISE, "sc")
    assert c == pytest.approx(ergodic_capacity_shared(0.03 * g.a_iR / NOISE, 0.0), rel=1e-14)
    assert c == pytest.approx(interference_free_capacity(0.03, g.a_iR, g.a_iH, NOISE, "sc"))


def test_mode_formulas():
    g = gains()
    p_h, p_l = 0.03, 0.1
    comb = ergodic_capacity_shared(p_h * (g.a_iR + g.a_iH) / NOISE, p_l * (g.a_jR + g.a_jH) / NOISE)
    legs = (ergodic_capacity_shared(p_h * g.a_iR / NOISE, p_l * g.a_jR / NOISE)
            + ergodic_capacity_shared(p_h * g.a_iH / NOISE, p_l * g.a_jH / NOISE))
    assert pair_capacity(p_h, p_l, g, NOISE) == pytest.approx(comb, rel=1e-14)
    assert pair_capacity(p_h, p_l, g, NOISE, "mc-sum") == pytest.approx(legs, rel=1e-14)
    with pytest.raises(ValueError):
        pair_capacity(-1.0, 0.1, g, NOISE)


# Fixtures where the HAP leg has at least the RBS leg's signal-to-interference
# ratio: adding it can only help, so both multi-connectivity modes dominate.
MC_FIXTURES = [
    gains(a_jH=5e-12),
    gains(a_iH=1e-9, a_jH=1e-10),
    gains(a_iR=5e-10, a_jR=5e-9, a_iH=2e-10, a_jH=1e-9),
    gains(a_iR=1e-8, a_jR=1e-10, a_iH=1e-10, a_jH=1e-12),
]


@pytest.mark.parametrize("g", MC_FIXTURES)
@pytest.mark.parametrize("mode", ["mc-combined", "mc-sum"])
def test_multi_connectivity_dominates_sc_on_fixtures(g, mode):
    for p_h, p_l in [(0.01, 0.01), (0.04, 0.16), (0.001, 0.1)]:
        assert pair_capacity(p_h, p_l, g, NOISE, mode) >= pair_capacity(p_h, p_l, g, NOISE, "sc")


def test_per_link_sum_always_dominates_sc():
    rng = np.random.default_rng(0)
    for _ in range(200):
        g = gains(**{k: 10 ** rng.uniform(-12, -7) for k in ("a_iR", "a_iH", "a_jR", "a_jH")})
        p_h, p_l = rng.uniform(1e-3, 0.04), rng.uniform(1e-3, 0.16)
        assert pair_capacity(p_h, p_l, g, NOISE, "mc-sum") >= pair_capacity(p_h, p_l, g, NOISE, "sc")


def test_combined_form_can_fall_below_sc():
    # a strong clean RBS leg merged with a weak, heavily interfered HAP leg
    assert ergodic_capacity_shared(100.1, 101.0) < ergodic_capacity_shared(100.0, 1.0)


def grid_gains(rng, I, J):
    return PairGains(a_jj=10 ** rng.uniform(-9, -6, (1, J)), a_ij=10 ** rng.uniform(-10.5, -8, (I, J)),
                     a_iR=10 ** rng.uniform(-10, -8, (I, 1)), a_iH=10 ** rng.uniform(-12, -11, (I, 1)),
                     a_jR=10 ** rng.uniform(-10, -8, (1, J)), a_jH=10 ** rng.uniform(-12, -11, (1, J)))


@pytest.mark.parametrize("mode", list(ConnectivityMode))
def test_matrix_is_entrywise_composition(mode):
    rng = np.random.default_rng(1)
    g = grid_gains(rng, 3, 3)
    limits, qos = PowerLimits(), QosRequirements()
    m, p = build_capacity_matrix(g, limits, qos, mode)
    assert (m.i_count, m.j_count) == (3, 3)
    for i in range(3):
        for j in range(3):
            a = optimal_pair_powers(g.at(i, j), limits, qos)
            assert (p.p_hcu[i, j], p.p_lcu[i, j]) == (a.p_hcu, a.p_lcu)
            if not a.feasible:
                assert m.reason[i, j] == SentinelReason.RELIABILITY and m.values[i, j] == -np.inf
                continue
            c = pair_capacity(a.p_hcu, a.p_lcu, g.at(i, j), limits.noise, mode)
            assert m.raw[i, j] == pytest.approx(c, rel=1e-12)
            if c < qos.cap_min_hcu:
                assert m.reason[i, j] == SentinelReason.BELOW_FLOOR
            else:
                assert m.values[i, j] == pytest.approx(c, rel=1e-12)


def test_floor_filter_extremes():
    rng = np.random.default_rng(2)
    g = grid_gains(rng, 8, 6)
    limits = PowerLimits()
    m, _ = build_capacity_matrix(g, limits, QosRequirements(cap_min_hcu=0.0))
    assert not np.any(m.reason == SentinelReason.BELOW_FLOOR)
    m, _ = build_capacity_matrix(g, limits, QosRequirements(cap_min_hcu=1e6))
    assert not m.feasible.any()
    m, _ = build_capacity_matrix(g, limits, QosRequirements())
    fin = m.values[m.feasible]
    assert np.all(fin >= m.cap_min)
    assert np.all((m.reason == SentinelReason.FEASIBLE) == m.feasible)
