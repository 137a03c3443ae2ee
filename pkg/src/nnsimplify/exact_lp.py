"""Exact rational linear programming over small boxes.

Two independent procedures:

* :func:`maximize`: two-phase tableau simplex with Bland's rule on
  exact rational entries.
* :func:`fm_maximize`: Fourier-Motzkin elimination.  Exponential, only
  meant for cross-checking tiny systems.

Constraints are ``G z <= h`` together with ``lo <= z <= hi``.  Arithmetic
uses ``gmpy2.mpq``; any exact rational (int, Fraction, mpq, or a float
taken at its exact binary value) is accepted as input.
"""

from __future__ import annotations

from gmpy2 import mpq

__all__ = ["LPResult", "maximize", "feasible_point", "fm_maximize", "fm_feasible"]

_ZERO = mpq(0)


class LPResult:
    __slots__ = ("feasible", "value", "point")

    def __init__(self, feasible, value=None, point=None):
        self.feasible = feasible
        self.value = value
        self.point = point

    def __repr__(self):
        return f"LPResult(feasible={self.feasible}, value={self.value})"


def _pivot(rows, basis, r, c):
    row = rows[r]
    p = row[c]
    if p != 1:
        rows[r] = row = [x / p if x else x for x in row]
    nonzero = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(rows):
        if i != r:
            f = other[c]
            if f:
                other = list(other)
                for j in nonzero:
                    other[j] -= f * row[j]
                rows[i] = other
    basis[r] = c


def _run(rows, basis, cost, allowed):
    """Maximize ``cost . x`` over the tableau; returns False when unbounded."""
    rhs = len(rows[0]) - 1
    while True:
        entering = None
        for j in allowed:
            if j in basis:
                continue
            reduced = cost[j] - sum(cost[b] * rows[i][j] for i, b in enumerate(basis) if cost[b])
            if reduced > 0:
                entering = j
                break
        if entering is None:
            return True
        leave, best = None, None
        for i, row in enumerate(rows):
            a = row[entering]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            return False
        _pivot(rows, basis, leave, entering)


def _solve(c, A, b):
    """max c.x  s.t.  A x <= b, x >= 0.  Returns LPResult with ``point`` = x."""
    m, n = len(A), len(c)
    aux = n + m
    width = n + m + 2
    rows = []
    for i in range(m):
        row = [mpq(v) for v in A[i]] + [_ZERO] * m + [mpq(-1), mpq(b[i])]
        row[n + i] = mpq(1)
        rows.append(row)
    basis = [n + i for i in range(m)]
    cols = range(width - 1)

    if m and min(row[-1] for row in rows) < 0:
        r = min(range(m), key=lambda i: (rows[i][-1], i))
        _pivot(rows, basis, r, aux)
        phase1 = [_ZERO] * (width - 1)
        phase1[aux] = mpq(-1)
        _run(rows, basis, phase1, cols)
        value = sum(rows[i][-1] for i, bv in enumerate(basis) if bv == aux)
        if value > 0:
            return LPResult(False)
        if aux in basis:
            r = basis.index(aux)
            for j in range(aux):
                if rows[r][j] != 0:
                    _pivot(rows, basis, r, j)
                    break
    cost = [mpq(v) for v in c] + [_ZERO] * (m + 1)
    allowed = range(aux)
    if not _run(rows, basis, cost, allowed):
        raise ValueError("unbounded linear program")
    x = [_ZERO] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = rows[i][-1]
    value = sum(ci * xi for ci, xi in zip(cost[:n], x))
    return LPResult(True, value, x)


def _shifted(G, h, lo, hi):
    """Rewrite with ``s = z - lo`` so that ``s >= 0``."""
    A, b = [], []
    for g, hv in zip(G, h):
        A.append(list(g))
        b.append(hv - sum(gj * lj for gj, lj in zip(g, lo)))
    n = len(lo)
    for j in range(n):
        row = [_ZERO] * n
        row[j] = mpq(1)
        A.append(row)
        b.append(hi[j] - lo[j])
    return A, b


def maximize(c, G, h, lo, hi) -> LPResult:
    """Exact ``max c.z`` subject to ``G z <= h`` and ``lo <= z <= hi``."""
    lo = [mpq(v) for v in lo]
    hi = [mpq(v) for v in hi]
    if any(l > u for l, u in zip(lo, hi)):
        return LPResult(False)
    A, b = _shifted(G, h, lo, hi)
    res = _solve(c, A, b)
    if not res.feasible:
        return res
    z = [s + l for s, l in zip(res.point, lo)]
    return LPResult(True, sum(mpq(ci) * zi for ci, zi in zip(c, z)), z)


def feasible_point(G, h, lo, hi):
    """Some point of the polytope, or None when it is empty."""
    res = maximize([0] * len(lo), G, h, lo, hi)
    return res.point if res.feasible else None


def _fm_eliminate(rows, j):
    pos, neg, rest = [], [], []
    for a, c in rows:
        (pos if a[j] > 0 else neg if a[j] < 0 else rest).append((a, c))
    out = list(rest)
    seen = {(tuple(a), c) for a, c in rest}
    for ap, cp in pos:
        for an, cn in neg:
            fp, fn = ap[j], -an[j]
            a = [fn * x + fp * y for x, y in zip(ap, an)]
            c = fn * cp + fp * cn
            key = (tuple(a), c)
            if key not in seen:
                seen.add(key)
                out.append((a, c))
    return out


def _fm_rows(G, h, lo, hi):
    n = len(lo)
    rows = [([mpq(v) for v in g], mpq(hv)) for g, hv in zip(G, h)]
    for j in range(n):
        up = [_ZERO] * n
        up[j] = mpq(1)
        rows.append((up, mpq(hi[j])))
        down = [_ZERO] * n
        down[j] = mpq(-1)
        rows.append((down, -mpq(lo[j])))
    return rows


def fm_feasible(G, h, lo, hi) -> bool:
    rows = _fm_rows(G, h, lo, hi)
    for j in range(len(lo)):
        rows = _fm_eliminate(rows, j)
    return all(c >= 0 for _, c in rows)


def fm_maximize(c, G, h, lo, hi):
    """Maximum of ``c.z`` by projecting onto an extra objective variable; None if infeasible."""
    n = len(lo)
    rows = [(a + [_ZERO], cv) for a, cv in _fm_rows(G, h, lo, hi)]
    # t - c.z <= 0
    rows.append(([-mpq(v) for v in c] + [mpq(1)], _ZERO))
    for j in range(n):
        rows = _fm_eliminate(rows, j)
    best = None
    for a, cv in rows:
        t = a[n]
        if t == 0:
            if cv < 0:
                return None
        elif t > 0:
            bound = cv / t
            best = bound if best is None else min(best, bound)
    return best
