"""Exact two-phase tableau simplex over ``fractions.Fraction``.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.
Bland's rule (lowest index enters, lowest basic index leaves on ratio
ties) guarantees termination on degenerate lattice data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

__all__ = ["LPResult", "simplex_min", "feasible"]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: Optional[tuple] = None
    value: Optional[Fraction] = None


def _pivot(T: list, basis: list, row: int, col: int):
    piv = T[row][col]
    prow = [v / piv for v in T[row]]
    T[row] = prow
    for i, r in enumerate(T):
        if i != row and r[col]:
            f = r[col]
            T[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run(T: list, basis: list, allowed: int) -> bool:
    """Optimize the tableau whose last row holds reduced costs (objective row
    ``z - c.x``).  Only columns ``< allowed`` may enter.  Returns False when
    unbounded."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        col = next((j for j in range(allowed) if obj[j] > 0), None)
        if col is None:
            return True
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return False
        _pivot(T, basis, best[1], col)


def simplex_min(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    n = len(c)
    F = Fraction
    rows = []
    # slack columns n .. n+len(A_ub)-1, artificial columns after them
    n_slack = len(A_ub)
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        row = [F(v) for v in a] + [F(0)] * n_slack
        row[n + i] = F(1)
        rows.append((row, F(b)))
    for a, b in zip(A_eq, b_eq):
        rows.append(([F(v) for v in a] + [F(0)] * n_slack, F(b)))
    m = len(rows)
    width = n + n_slack + m
    T = []
    for i, (row, b) in enumerate(rows):
        if b < 0:
            row = [-v for v in row]
            b = -b
        full = row + [F(0)] * m + [b]
        full[n + n_slack + i] = F(1)
        T.append(full)
    basis = [n + n_slack + i for i in range(m)]

    # phase I: minimize the sum of artificials, i.e. maximize -sum
    obj = [F(0)] * (width + 1)
    for r in T:
        for j in range(n + n_slack):
            obj[j] += r[j]
        obj[-1] += r[-1]
    T.append(obj)
    _run(T, basis, n + n_slack)
    if T[-1][-1] != 0:
        return LPResult("infeasible")

    # drive remaining (zero-level) artificials out of the basis
    for i in range(m):
        if basis[i] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)

    # phase II objective row: reduced costs c_B B^-1 A - c
    obj = [F(0)] * (width + 1)
    cost = [F(v) for v in c] + [F(0)] * (n_slack + m)
    for j in range(n + n_slack):
        obj[j] = -cost[j]
    obj[-1] = F(0)
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            obj = [o + cb * t for o, t in zip(obj, T[i])]
    T[-1] = obj
    # artificial rows left in the basis are redundant (all-zero) rows
    if not _run(T, basis, n + n_slack):
        return LPResult("unbounded")
    x = [F(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    value = sum((F(cv) * xv for cv, xv in zip(c, x)), F(0))
    return LPResult("optimal", tuple(x), value)


def feasible(A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
             A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> Optional[tuple]:
    """A feasible point of the constraint system, or None."""
    width = len(A_ub[0]) if A_ub else len(A_eq[0])
    res = simplex_min([0] * width, A_ub, b_ub, A_eq, b_eq)
    return res.x if res.status == "optimal" else None
