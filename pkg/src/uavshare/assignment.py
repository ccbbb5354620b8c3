"""Hungarian-method assignment on rectangular grids with forbidden cells.

Non-finite entries (``inf``/``-inf``) are forbidden: they are never reported
as pairs. Internally they get a cost tier above any finite combination, so
the solver first maximises the number of allowed pairs and only then
optimises the objective. Rectangular grids are padded with zero-cost dummy
rows or columns.

Among equally good assignments the lexicographically smallest pair list is
returned, so repeated runs are bit-for-bit identical.
"""

from dataclasses import dataclass, field

import numpy as np

_SMALL_N = 48


@dataclass
class AssignmentProblem:
    cost: np.ndarray
    objective: str = "minimize"

    def __post_init__(self):
        self.cost = np.array(self.cost, dtype=float, ndmin=2)
        if self.cost.ndim != 2 or min(self.cost.shape) < 1:
            raise ValueError("cost must be a non-empty 2-D grid")
        if np.isnan(self.cost).any():
            raise ValueError("cost contains NaN")
        if self.objective not in ("minimize", "maximize"):
            raise ValueError("objective must be 'minimize' or 'maximize'")


@dataclass
class Assignment:
    pairs: list
    objective_value: float
    complete: bool
    row_to_col: np.ndarray = field(repr=False)


def _hungarian_py(a):
    """O(n^3) shortest augmenting path Hungarian method, pure Python lists."""
    n = len(a)
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col, np.array(u[1:]), np.array(v[1:])


def _hungarian_np(a):
    """Same algorithm with the column scans vectorised (large n)."""
    n = a.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = a[i0 - 1] - u[i0] - v[1:]
            better = free[1:] & (cur < minv[1:])
            idx = np.flatnonzero(better) + 1
            minv[idx] = cur[idx - 1]
            way[idx] = j0
            cand = np.where(free, minv, np.inf)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            used_idx = np.flatnonzero(used)
            u[p[used_idx]] += delta
            v[used_idx] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.empty(n, dtype=int)
    row_to_col[p[1:] - 1] = np.arange(n)
    return row_to_col, u[1:], v[1:]


def _lex_smallest(a, row_to_col, u, v, tol, allowed):
    """Move to the lexicographically smallest optimum.

    Optimal assignments are exactly the perfect matchings on edges with zero
    reduced cost. Row by row, give the row the smallest allowed tight column
    that still leaves a perfect matching for the rows not yet settled (an
    alternating path from that column's owner back to the row's current
    column). Rows left on padding or forbidden cells stay unassigned, but
    may still shuffle among such cells later on.
    """
    n = a.shape[0]
    tight = (a - u[:, None] - v[None, :]) <= tol
    match = row_to_col.copy()
    owner = np.empty(n, dtype=int)
    owner[match] = np.arange(n)
    rows = np.arange(n)
    parked = np.zeros(n, dtype=bool)
    for r in range(n):
        c0 = match[r]
        cur_ok = allowed[r, c0]
        cands = tight[r] & allowed[r]
        if cur_ok:
            cands[c0:] = False
        cands = np.flatnonzero(cands)
        if cands.size:
            movable = tight & ((rows > r)[:, None] | (parked[:, None] & ~allowed))
            mov_row = (rows > r) | parked
            cands = cands[mov_row[owner[cands]]]
        if cands.size:
            # backward search: rows that can hand their column on towards c0
            nxt = np.full(n, -1)
            reach = np.zeros(n, dtype=bool)
            frontier = np.array([c0])
            while frontier.size:
                sub = movable[:, frontier]
                new = np.flatnonzero(sub.any(axis=1) & ~reach)
                if new.size == 0:
                    break
                nxt[new] = frontier[np.argmax(sub[new], axis=1)]
                reach[new] = True
                frontier = match[new]
            ok = cands[reach[owner[cands]]]
            if ok.size:
                c = ok[0]
                x = owner[c]
                match[r] = c
                owner[c] = r
                while True:
                    col = nxt[x]
                    prev = owner[col] if col != c0 else -1
                    match[x] = col
                    owner[col] = x
                    if col == c0:
                        break
                    x = prev
        if not allowed[r, match[r]]:
            parked[r] = True
    return match


def _solve_square(w):
    n = w.shape[0]
    if n <= _SMALL_N:
        return _hungarian_py(w.tolist())
    return _hungarian_np(w)


def solve_assignment(problem, canonical=True):
    """Optimal one-to-one assignment avoiding forbidden (non-finite) cells.

    Returns a complete assignment of ``min(R, C)`` pairs when one exists;
    otherwise the best assignment among those with the most allowed pairs,
    flagged ``complete=False``. With ``canonical=False`` the lexicographic
    tie-break is skipped; the result is still optimal and deterministic.
    """
    cost = problem.cost
    R, C = cost.shape
    forbidden = ~np.isfinite(cost)
    w = -cost if problem.objective == "maximize" else cost.copy()
    finite = w[~forbidden]
    n = max(R, C)
    sq = np.zeros((n, n))
    if finite.size:
        lo = finite.min()
        span = finite.max() - lo
        big = n * (span + 1.0) + 1.0
        block = np.where(forbidden, big, w - lo)
    else:
        span = 0.0
        block = np.ones_like(w)
    sq[:R, :C] = block
    row_to_col, u, v = _solve_square(sq)
    tol = 1e-9 * (span + 1.0)
    allowed = np.zeros((n, n), dtype=bool)
    allowed[:R, :C] = ~forbidden
    if canonical:
        row_to_col = _lex_smallest(sq, row_to_col, u, v, tol, allowed)

    pairs = []
    value = 0.0
    out = np.full(R, -1, dtype=int)
    for r in range(R):
        c = int(row_to_col[r])
        if c < C and not forbidden[r, c]:
            pairs.append((r, c))
            value += cost[r, c]
            out[r] = c
    return Assignment(pairs=pairs, objective_value=float(value),
                      complete=len(pairs) == min(R, C), row_to_col=out)


def min_total_binary_cost(l_matrix, canonical=True):
    """Assignment using as few 1-cells of a binary grid as possible.

    Returns:
        ``(delta, pairs)`` where ``delta`` counts the 1-cells in the
        min(R, C)-pair assignment; ``delta == 0`` iff a complete assignment
        on 0-cells exists.
    """
    l_matrix = np.array(l_matrix, dtype=float, ndmin=2)
    if not np.isin(l_matrix, (0.0, 1.0)).all():
        raise ValueError("l_matrix must be binary")
    res = solve_assignment(AssignmentProblem(l_matrix, "minimize"), canonical)
    return int(round(res.objective_value)), res.pairs
