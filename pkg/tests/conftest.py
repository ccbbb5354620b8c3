import functools
import itertools

import numpy as np


@functools.lru_cache(maxsize=None)
def _perms(c, r):
    return np.array(list(itertools.permutations(range(c), r)), dtype=int).reshape(-1, r)


def brute_assignment(cost, maximize=False):
    """(n_pairs, best value) over all max-cardinality matchings on finite cells."""
    cost = np.asarray(cost, dtype=float)
    if cost.shape[0] > cost.shape[1]:
        cost = cost.T
    r, c = cost.shape
    perms = _perms(c, r)
    vals = cost[np.arange(r), perms]
    ok = np.isfinite(vals)
    count = ok.sum(axis=1)
    total = np.where(ok, vals, 0.0).sum(axis=1)
    top = count == count.max()
    best = total[top].max() if maximize else total[top].min()
    return int(count.max()), float(best)


def brute_max_min(values):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    return float(values[np.arange(n), _perms(n, n)].min(axis=1).max())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
