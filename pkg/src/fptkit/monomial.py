"""Monomial ideals: Newton polytope, exact LP threshold, integral closure,
height and Hilbert-Samuel multiplicity.

For a monomial ideal ``a`` with Newton polytope
``P(a) = conv{v_i} + R^d_{>=0}`` the threshold is the largest ``t`` with
``(1, ..., 1)`` in ``t * P(a)``.  Writing ``s = 1/t`` this is the LP

    minimize s  subject to  sum_i mu_i v_ij <= s  (each j),  sum mu_i = 1,  mu >= 0

and the answer is ``1/s*``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import FPTError, NotMPrimary, ResourceLimit
from .lp import feasible, simplex_min

__all__ = [
    "MonomialIdeal",
    "NewtonPolytope",
    "LPCertificate",
    "fpt_lp",
    "fpt_certificate",
    "contains",
    "integral_closure",
    "height",
    "multiplicity",
    "maximal_ideal",
]


def _divides(u: Sequence[int], v: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(u, v))


def _minimalize(vectors: Iterable[tuple]) -> tuple:
    """Antichain of componentwise-minimal vectors, sorted."""
    pts = sorted(set(vectors), key=lambda v: (sum(v), v))
    keep = []
    for v in pts:
        if not any(_divides(u, v) for u in keep):
            keep.append(v)
    return tuple(sorted(keep))


@dataclass(frozen=True)
class MonomialIdeal:
    """Monomial ideal of ``k[X_1..X_d]`` by its minimal exponent vectors."""

    d: int
    gens: tuple

    def __post_init__(self):
        gens = [tuple(int(x) for x in g) for g in self.gens]
        if not gens:
            raise ValueError("a monomial ideal needs at least one generator")
        for g in gens:
            if len(g) != self.d:
                raise ValueError(f"generator {g} does not have {self.d} coordinates")
            if any(x < 0 for x in g):
                raise ValueError(f"negative exponent in {g}")
            if not any(g):
                raise ValueError("the unit ideal is not allowed (zero generator)")
        object.__setattr__(self, "gens", _minimalize(gens))

    def __contains__(self, u) -> bool:
        return any(_divides(g, u) for g in self.gens)

    def __add__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        if other.d != self.d:
            raise ValueError("ideals live in different rings")
        return MonomialIdeal(self.d, self.gens + other.gens)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        if other.d != self.d:
            raise ValueError("ideals live in different rings")
        return MonomialIdeal(
            self.d, [tuple(a + b for a, b in zip(u, v)) for u in self.gens for v in other.gens]
        )

    def power(self, n: int) -> "MonomialIdeal":
        """``a^n`` as iterated Minkowski sums, normalized after each step."""
        if n < 1:
            raise ValueError("power must be >= 1")
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def order(self) -> int:
        return min(sum(g) for g in self.gens)

    def is_equigenerated(self) -> bool:
        return len({sum(g) for g in self.gens}) == 1

    def pure_powers(self) -> list:
        """For each variable, the smallest c with ``X_j^c`` in the ideal, else None."""
        out = []
        for j in range(self.d):
            cs = [g[j] for g in self.gens if all(x == 0 for i, x in enumerate(g) if i != j)]
            out.append(min(cs) if cs else None)
        return out

    def is_m_primary(self) -> bool:
        return all(c is not None for c in self.pure_powers())

    def newton_polytope(self) -> "NewtonPolytope":
        return NewtonPolytope(self.gens)

    def to_text(self, variables: Sequence[str] | None = None) -> str:
        names = variables or [f"X{i + 1}" for i in range(self.d)]
        parts = []
        for g in self.gens:
            fs = [n if x == 1 else f"{n}^{x}" for n, x in zip(names, g) if x]
            parts.append("*".join(fs))
        return "(" + ", ".join(parts) + ")"


def maximal_ideal(d: int, r: int = 1) -> MonomialIdeal:
    """``m^r`` in ``d`` variables."""
    base = MonomialIdeal(d, [tuple(int(i == j) for i in range(d)) for j in range(d)])
    return base.power(r)


@dataclass(frozen=True)
class NewtonPolytope:
    vertices: tuple

    @property
    def d(self) -> int:
        return len(self.vertices[0])

    def contains(self, u: Sequence) -> bool:
        return contains(self, u)

    def certificate(self, u: Sequence):
        """Convex weights ``mu`` with ``sum mu_i v_i <= u``, or None."""
        d, n = self.d, len(self.vertices)
        A_ub = [[v[j] for v in self.vertices] for j in range(d)]
        return feasible(A_ub, [Fraction(x) for x in u], [[1] * n], [1])


def contains(P: NewtonPolytope, u: Sequence) -> bool:
    """Exact membership of a rational point in ``P``."""
    if len(u) != P.d:
        raise ValueError("point has the wrong dimension")
    u = [Fraction(x) for x in u]
    if any(x < 0 for x in u):
        return False
    if any(_divides(v, u) for v in P.vertices):
        return True
    return P.certificate(u) is not None


@dataclass(frozen=True)
class LPCertificate:
    """Primal weights ``mu`` and dual weights ``w`` proving ``s*`` optimal.

    ``max_j sum_i mu_i v_ij = s*`` shows s* is attainable; ``w`` in the
    simplex with ``min_i w.v_i = s*`` shows no feasible s is smaller, since
    ``s >= sum_j w_j sum_i mu_i v_ij >= s*`` for any feasible ``mu``.
    """

    s: Fraction
    mu: tuple
    w: tuple

    def verify(self, vertices: Sequence[Sequence[int]]) -> bool:
        d = len(vertices[0])
        if any(m < 0 for m in self.mu) or sum(self.mu) != 1:
            return False
        if any(x < 0 for x in self.w) or sum(self.w) != 1:
            return False
        primal = max(sum(m * v[j] for m, v in zip(self.mu, vertices)) for j in range(d))
        dual = min(sum(wj * v[j] for j, wj in enumerate(self.w)) for v in vertices)
        return primal == self.s == dual


def fpt_certificate(a: MonomialIdeal) -> LPCertificate:
    V = a.gens
    n, d = len(V), a.d
    # primal: variables (mu_1..mu_n, s)
    A_ub = [[v[j] for v in V] + [-1] for j in range(d)]
    primal = simplex_min([0] * n + [1], A_ub, [0] * d, [[1] * n + [0]], [1])
    # dual: variables (w_1..w_d, t), maximize t
    A_ub = [[-v[j] for j in range(d)] + [1] for v in V]
    dual = simplex_min([0] * d + [-1], A_ub, [0] * n, [[1] * d + [0]], [1])
    if primal.status != "optimal" or dual.status != "optimal":
        raise FPTError("internal error: threshold LP did not solve")
    s = primal.value
    cert = LPCertificate(s, primal.x[:n], dual.x[:d])
    if s <= 0 or -dual.value != s or not cert.verify(V):
        raise FPTError("internal error: threshold LP certificate failed verification")
    return cert


def fpt_lp(a: MonomialIdeal) -> Fraction:
    """``max{t : (1,...,1) in t P(a)}`` as an exact rational.

    >>> fpt_lp(MonomialIdeal(2, [(2, 0), (0, 3)]))
    Fraction(5, 6)
    """
    return 1 / fpt_certificate(a).s


def integral_closure(a: MonomialIdeal) -> MonomialIdeal:
    """Minimal lattice points of ``P(a)``.

    Minimal generators lie in the box ``[0, M_j]`` with ``M_j`` the largest
    j-th coordinate among generators: a point of P with ``u_j > M_j`` stays
    in P after lowering ``u_j`` by one.
    """
    P = a.newton_polytope()
    box = [range(max(g[j] for g in a.gens) + 1) for j in range(a.d)]
    found = []
    for u in sorted(itertools.product(*box), key=lambda v: (sum(v), v)):
        if not any(u):
            continue
        if any(_divides(g, u) for g in found):
            continue
        if u in a or P.contains(u):
            found.append(u)
    return MonomialIdeal(a.d, found)


def height(a: MonomialIdeal) -> int:
    """Smallest set of variables meeting every generator's support."""
    supports = [frozenset(j for j, x in enumerate(g) if x) for g in a.gens]
    for size in range(1, a.d + 1):
        for cover in itertools.combinations(range(a.d), size):
            cs = set(cover)
            if all(s & cs for s in supports):
                return size
    raise FPTError("internal error: no vertex cover found")


def colength_count(a: MonomialIdeal) -> int:
    """Number of monomials outside an m-primary monomial ideal."""
    pure = a.pure_powers()
    if any(c is None for c in pure):
        raise NotMPrimary(f"X{pure.index(None) + 1}")
    inside = np.zeros(tuple(pure), dtype=bool)
    for g in a.gens:
        inside[tuple(slice(x, None) for x in g)] = True
    return int(inside.size - inside.sum())


def multiplicity(a: MonomialIdeal, *, max_power: int = 40, variables: Sequence[str] | None = None) -> int:
    """Hilbert-Samuel multiplicity from lattice counts.

    ``L(n) = #{u : x^u not in a^n}`` is eventually a polynomial of degree d
    with leading coefficient ``e(a)/d!``; the d-th finite difference is
    returned once three consecutive values of it agree.
    """
    pure = a.pure_powers()
    for j, c in enumerate(pure):
        if c is None:
            name = variables[j] if variables else f"X{j + 1}"
            raise NotMPrimary(name)
    if a.d > 3:
        raise ResourceLimit("multiplicity is limited to d <= 3")
    d = a.d
    counts = []
    power = None
    diffs = []
    for n in range(1, max_power + 1):
        power = a if power is None else power * a
        counts.append(colength_count(power))
        if len(counts) > d:
            window = counts[-(d + 1):]
            diffs.append(sum((-1) ** (d - i) * math.comb(d, i) * window[i] for i in range(d + 1)))
            if len(diffs) >= 3 and diffs[-1] == diffs[-2] == diffs[-3]:
                return diffs[-1]
    raise ResourceLimit(f"multiplicity did not stabilize within {max_power} powers")
