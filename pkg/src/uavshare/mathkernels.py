"""Special functions and root finding shared by the closed-form models.

Only the first-order exponential integral E1, its overflow-free scaled form
e^x E1(x), and a vectorised bisection solver live here.
"""

from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286061

_SERIES_TERMS = 30
_CF_MAX_ITER = 1000
_CF_EPS = 1e-16
_FPMIN = 1e-300


@dataclass(frozen=True)
class Tolerance:
    """Stopping rule for bisection searches.

    Attributes:
        abs_eps: Target bracket width (in the units of the search variable).
        max_iter: Hard cap on the number of halvings.
    """

    abs_eps: float = 1e-5
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_eps > 0:
            raise ValueError("abs_eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


class BracketError(ValueError):
    """Raised when the target is not bracketed by [f(lo), f(hi)]."""


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("E1 is only defined here for finite x > 0")
    return x


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * (-x) / k
        total += term / k
    return -EULER_GAMMA - np.log(x) - total


def _scaled_e1_cf(x):
    """e^x E1(x) for x > 1 via the modified Lentz continued fraction."""
    b = x + 1.0
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _CF_MAX_ITER + 1):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _CF_EPS
        if not active.any():
            break
    return h


def exp_integral_e1(x):
    """First-order exponential integral E1(x) = int_x^inf e^-t / t dt.

    Uses the power series for x <= 1 and a continued fraction above.
    Accepts scalars or arrays; raises ValueError for x <= 0 or non-finite x.
    """
    arr = _check_domain(x)
    out = np.empty_like(arr)
    small = arr <= 1.0
    if small.any():
        out[small] = _e1_series(arr[small])
    if (~small).any():
        xl = arr[~small]
        out[~small] = _scaled_e1_cf(xl) * np.exp(-xl)
    return out if out.ndim else float(out)


def scaled_e1(x):
    """Return e^x * E1(x) without overflow for large x."""
    arr = _check_domain(x)
    out = np.empty_like(arr)
    small = arr <= 1.0
    if small.any():
        xs = arr[small]
        out[small] = np.exp(xs) * _e1_series(xs)
    if (~small).any():
        out[~small] = _scaled_e1_cf(arr[~small])
    return out if out.ndim else float(out)


def bisect_increasing(f, target, lo, hi, tol=Tolerance(), relative=False):
    """Invert a monotone increasing map by bisection.

    Works elementwise on arrays: ``f`` must accept and return arrays of the
    broadcast shape of ``target``, ``lo`` and ``hi``.

    Args:
        f: Monotone increasing callable.
        target: Value(s) to hit.
        lo, hi: Bracket with ``f(lo) <= target <= f(hi)``.
        tol: Stopping rule; the bracket width is compared with ``tol.abs_eps``
            (or with ``tol.abs_eps * hi`` when ``relative`` is set).
        relative: Use a width relative to the upper end of the bracket.

    Returns:
        The upper end of the final bracket, so ``f(x) >= target`` always
        holds. The result lies in ``[lo, hi]``.

    Raises:
        BracketError: if the target lies outside ``[f(lo), f(hi)]``.
    """
    target, lo, hi = np.broadcast_arrays(
        np.asarray(target, dtype=float),
        np.asarray(lo, dtype=float),
        np.asarray(hi, dtype=float),
    )
    scalar = target.ndim == 0
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    target = np.array(target, dtype=float, ndmin=1)
    if np.any(lo >= hi):
        raise ValueError("bisect_increasing needs lo < hi")
    f_lo = np.asarray(f(lo), dtype=float)
    f_hi = np.asarray(f(hi), dtype=float)
    if np.any(f_lo > target):
        raise BracketError("target below f(lo): lower side of the bracket fails")
    if np.any(f_hi < target):
        raise BracketError("target above f(hi): upper side of the bracket fails")

    for _ in range(tol.max_iter):
        width = hi - lo
        limit = tol.abs_eps * np.abs(hi) if relative else tol.abs_eps
        if np.all(width <= limit):
            break
        mid = 0.5 * (lo + hi)
        below = np.asarray(f(mid), dtype=float) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return float(hi[0]) if scalar else hi.reshape(target.shape)
