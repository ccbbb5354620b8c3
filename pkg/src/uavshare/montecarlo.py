"""Sampling oracles for the closed forms in ``power`` and ``capacity``.

Random streams are keyed by ``(seed, link_id, chunk)`` through numpy's
``SeedSequence`` and samples are accumulated in fixed-size chunks, so an
estimate depends only on the seed, the link id and ``n_samples``; the order
in which chunks are evaluated does not matter.
"""

from dataclasses import dataclass

import numpy as np

from .capacity import ConnectivityMode

CHUNK = 1 << 18


@dataclass(frozen=True)
class SamplingConfig:
    n_samples: int = 100_000
    seed: int = 0
    confidence_z: float = 3.0

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError("n_samples must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class FadingDraw:
    """Unit-mean exponential power gains of one sample block."""

    g: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.g) < 0):
            raise ValueError("fading power gains are non-negative")


def _chunks(cfg, link_id):
    """Yield ``(rng, size)`` per chunk for one link."""
    done = 0
    k = 0
    while done < cfg.n_samples:
        size = min(CHUNK, cfg.n_samples - done)
        ss = np.random.SeedSequence(cfg.seed, spawn_key=(int(link_id), k))
        yield np.random.default_rng(ss), size
        done += size
        k += 1


def fading(rng, n_links, size):
    """Unit-mean exponential draws, one row per link."""
    return FadingDraw(rng.standard_exponential((n_links, size)))


def empirical_outage(p_h, p_l, gains, qos, noise, cfg, link_id=0):
    """Fraction of fading draws with LCU SINR at or below the threshold.

    Returns:
        ``(probability, standard_error)`` with the binomial standard error.
    """
    hits = 0
    for rng, size in _chunks(cfg, link_id):
        g = fading(rng, 2, size).g
        sinr = p_l * gains.a_jj * g[0] / (noise + p_h * gains.a_ij * g[1])
        hits += int(np.count_nonzero(sinr <= qos.sinr_min_lcu))
    n = cfg.n_samples
    p = hits / n
    return p, float(np.sqrt(p * (1.0 - p) / n))


def _mean_se(total, total_sq, n):
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return float(mean), float(np.sqrt(var / n))


def empirical_capacity(rho, eta, cfg, link_id=0):
    """Sample mean of log2(1 + rho U / (1 + eta V)) and its standard error."""
    total = 0.0
    total_sq = 0.0
    for rng, size in _chunks(cfg, link_id):
        g = fading(rng, 2, size).g
        c = np.log2(1.0 + rho * g[0] / (1.0 + eta * g[1]))
        total += float(c.sum())
        total_sq += float(np.dot(c, c))
    return _mean_se(total, total_sq, cfg.n_samples)


def sample_w(rho, eta, cfg, link_id=0):
    """All samples of W = rho U / (1 + eta V), concatenated in chunk order."""
    parts = []
    for rng, size in _chunks(cfg, link_id):
        g = fading(rng, 2, size).g
        parts.append(rho * g[0] / (1.0 + eta * g[1]))
    return np.concatenate(parts)


def empirical_cdf_w(rho, eta, cfg, grid, link_id=0):
    """Empirical CDF of W evaluated at the points of ``grid``."""
    w = np.sort(sample_w(rho, eta, cfg, link_id))
    grid = np.asarray(grid, dtype=float)
    return (np.searchsorted(w, grid, side="right") / w.size).tolist()


def ks_distance_w(rho, eta, cfg, cdf, link_id=0):
    """Kolmogorov-Smirnov distance between W samples and a reference CDF."""
    w = np.sort(sample_w(rho, eta, cfg, link_id))
    n = w.size
    f = np.asarray(cdf(w), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def empirical_pair_capacity(p_h, p_l, gains, noise, mode, cfg, link_id=0):
    """Monte Carlo HCU capacity for one pair, drawing fading on each leg.

    ``p_l = 0`` gives the interference-free capacity. In the combined mode
    a single fading pair acts on the summed gains, matching the closed form
    it checks; the per-link mode draws the RBS and HAP legs independently.
    """
    mode = ConnectivityMode(mode)
    total = 0.0
    total_sq = 0.0
    for rng, size in _chunks(cfg, link_id):
        g = fading(rng, 4, size).g
        if mode is ConnectivityMode.MC_COMBINED:
            rho = p_h * (gains.a_iR + gains.a_iH) / noise
            eta = p_l * (gains.a_jR + gains.a_jH) / noise
            c = np.log2(1.0 + rho * g[0] / (1.0 + eta * g[1]))
        else:
            c = np.log2(1.0 + p_h * gains.a_iR * g[0] / (noise + p_l * gains.a_jR * g[1]))
            if mode is ConnectivityMode.MC_PER_LINK_SUM:
                c = c + np.log2(1.0 + p_h * gains.a_iH * g[2] / (noise + p_l * gains.a_jH * g[3]))
        total += float(c.sum())
        total_sq += float(np.dot(c, c))
    return _mean_se(total, total_sq, cfg.n_samples)
