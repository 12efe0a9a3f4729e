"""Fedder-criterion computations: the nu function of an ideal pair at a level.

For an ideal ``a = (g_1, ..., g_m)`` of ``R = F_p[X_1..X_d]`` and an optional
hypersurface ``f``, the level-``q`` value is

    nu(q) = max{k : a^k * F  not contained in  m^[q]},

where ``F = f^(q-1)`` when a multiplier is present (the colon ideal
``(f)^[q] : (f)`` is ``(f^(q-1))`` in a UFD) and ``F = 1`` otherwise.
``a^k`` is generated by the products ``g^l = g_1^l_1 ... g_m^l_m`` with
``sum(l) = k`` and ``m^[q]`` is monomial, so the test is whether some
reduced product ``F * g^l`` is nonzero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ResourceLimit
from .ffpoly import BracketArith, BracketLevel, PolyRing, SparsePoly, parse_poly, reduce_mod_bracket

__all__ = [
    "IdealPair",
    "NuRecord",
    "Budget",
    "NOT_F_PURE_AT_LEVEL",
    "nu_level",
    "fedder_fpure_at",
    "oracle_nu",
    "multiplier_power",
    "survives_at",
    "witness_product",
]

# marker stored in NuRecord.nu when f^(q-1) itself lies in m^[q]
NOT_F_PURE_AT_LEVEL = None


@dataclass(frozen=True)
class IdealPair:
    """Generators of ``a`` plus an optional principal hypersurface ``f``."""

    ring: PolyRing
    gens: tuple
    multiplier: Optional[SparsePoly] = None

    def __post_init__(self):
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        if not gens:
            raise ValueError("an ideal pair needs at least one generator")
        for g in gens:
            if not isinstance(g, SparsePoly) or g.ring != self.ring:
                raise ValueError("generators must be polynomials of the pair's ring")
            if g.is_zero():
                raise ValueError("generators must be nonzero")
            if g.constant_term():
                raise ValueError(f"generator {g} has a nonzero constant term (ideal not inside m)")
        f = self.multiplier
        if f is not None:
            if not isinstance(f, SparsePoly) or f.ring != self.ring:
                raise ValueError("multiplier must be a polynomial of the pair's ring")
            if f.is_zero():
                raise ValueError("multiplier must be nonzero")
            if f.constant_term():
                raise ValueError(f"multiplier {f} has a nonzero constant term")

    @classmethod
    def from_text(cls, p, variables: Sequence[str], gens: Sequence[str], multiplier: str | None = None):
        ring = PolyRing(p, tuple(variables))
        return cls(
            ring,
            tuple(parse_poly(g, ring.variables, ring.p) for g in gens),
            parse_poly(multiplier, ring.variables, ring.p) if multiplier else None,
        )

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def d(self) -> int:
        return self.ring.d

    @property
    def mu(self) -> int:
        return len(self.gens)

    def ord(self) -> int:
        """Minimum over generators of the lowest term degree."""
        return min(g.min_degree() for g in self.gens)

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.gens)

    def __add__(self, other: "IdealPair") -> "IdealPair":
        if self.ring != other.ring or self.multiplier != other.multiplier:
            raise ValueError("can only add ideals over the same ring and hypersurface")
        return IdealPair(self.ring, self.gens + other.gens, self.multiplier)

    def power(self, n: int) -> "IdealPair":
        """``a^n`` presented by every n-fold product of generators."""
        if n < 1:
            raise ValueError("power must be >= 1")
        prods = []
        for combo in itertools.combinations_with_replacement(range(self.mu), n):
            g = self.ring.one()
            for i in combo:
                g = g * self.gens[i]
            prods.append(g)
        return IdealPair(self.ring, tuple(prods), self.multiplier)

    def describe(self) -> str:
        text = "(" + ", ".join(g.to_text() for g in self.gens) + ")"
        if self.multiplier is not None:
            text += f" mod ({self.multiplier.to_text()})"
        return text


@dataclass(frozen=True)
class NuRecord:
    """Value of nu at one level; ``nu is None`` marks NOT_F_PURE_AT_LEVEL."""

    level: BracketLevel
    nu: Optional[int]
    witness: Optional[tuple] = None

    @property
    def f_pure(self) -> bool:
        return self.nu is not None

    @property
    def e(self) -> int:
        return self.level.e

    @property
    def q(self) -> int:
        return self.level.q


@dataclass(frozen=True)
class Budget:
    """Caps on a single nu computation; exceeding one raises ResourceLimit."""

    max_terms: int = 2_000_000
    max_nodes: int = 5_000_000
    max_memo: int = 200_000


def _check(pair: IdealPair, lvl: BracketLevel):
    if pair.p != lvl.p:
        raise ValueError(f"level prime {lvl.p} does not match the pair's prime {pair.p}")


def multiplier_power(pair: IdealPair, lvl: BracketLevel) -> SparsePoly:
    """``f^(q-1)`` reduced mod ``m^[q]``, or 1 without a multiplier."""
    from .ffpoly import pow_reduced

    _check(pair, lvl)
    if pair.multiplier is None:
        return pair.ring.one()
    return pow_reduced(pair.multiplier, lvl.q - 1, lvl)


class _PolySearch:
    """Partial products as packed term maps."""

    def __init__(self, pair, lvl, arith: BracketArith, F: dict, budget: Budget):
        self.arith = arith
        self.budget = budget
        self.gens = [arith.from_poly(g) for g in pair.gens]
        self.start = F
        self._pows = [[{0: 1}] for _ in self.gens]

    def is_zero(self, state) -> bool:
        return not state

    def times(self, state, j: int):
        out = self.arith.mul(state, self.gens[j])
        if len(out) > self.budget.max_terms:
            raise ResourceLimit(f"partial product exceeded {self.budget.max_terms} terms")
        return out

    def gen_power(self, j: int, r: int):
        pows = self._pows[j]
        while len(pows) <= r and pows[-1]:
            pows.append(self.arith.mul(pows[-1], self.gens[j]))
        return pows[r] if r < len(pows) else {}

    def times_power(self, state, j: int, r: int):
        g = self.gen_power(j, r)
        return self.arith.mul(state, g) if g else {}

    def subset_mins(self, state, ind: np.ndarray) -> np.ndarray:
        return self.arith.exponent_matrix(state).dot(ind).min(axis=0)


class _MonomialSearch:
    """Monomial generators: multiplying by x^v only shifts terms, never merges
    them, so a partial product is the array of per-term slacks ``q-1-u``."""

    def __init__(self, pair, lvl, arith: BracketArith, F: dict, budget: Budget):
        self.q = lvl.q
        self.vecs = [np.array(next(iter(g.terms)), dtype=np.int64) for g in pair.gens]
        rows = [arith.unpack(k) for k in F]
        self.start = (lvl.q - 1) - np.array(rows, dtype=np.int64).reshape(len(rows), pair.d)

    def is_zero(self, state) -> bool:
        return state.shape[0] == 0

    def times(self, state, j: int):
        s = state - self.vecs[j]
        return s[(s >= 0).all(axis=1)]

    def times_power(self, state, j: int, r: int):
        s = state - r * self.vecs[j]
        return s[(s >= 0).all(axis=1)]

    def subset_mins(self, state, ind: np.ndarray) -> np.ndarray:
        # rows hold slacks q-1-u, so the smallest sum of u is the largest slack
        return (self.q - 1) * ind.sum(axis=0) - state.dot(ind).max(axis=0)


class _NuSearch:
    """Depth-first tuple search with memoized prefix products."""

    def __init__(self, pair: IdealPair, lvl: BracketLevel, budget: Budget):
        self.pair, self.lvl, self.budget = pair, lvl, budget
        arith = BracketArith(pair.d, lvl.p, lvl.q)
        F = arith.from_poly(multiplier_power(pair, lvl))
        self.F_zero = not F
        if self.F_zero:
            return
        cls = _MonomialSearch if pair.is_monomial() else _PolySearch
        self.ops = cls(pair, lvl, arith, F, budget)
        # Prune on variable subsets A: every surviving term of a completion is
        # u + (one reduced term per remaining factor), so its A-degree is at
        # least min_u |u|_A + rem * min_g ord_A(g) and at most |A|(q-1).
        d, q, m = pair.d, lvl.q, pair.mu
        masks = range(1, 1 << d) if d <= 6 else [1 << i for i in range(d)] + [(1 << d) - 1]
        self.ind = np.array([[(mask >> i) & 1 for mask in masks] for i in range(d)], dtype=np.int64)
        self.caps = (q - 1) * self.ind.sum(axis=0)
        reduced = [arith.from_poly(g) for g in pair.gens]
        # generators already inside m^[q] can never appear in a surviving tuple
        self.alive = [bool(g) for g in reduced]
        never = d * q + 1
        ords = [arith.exponent_matrix(g).dot(self.ind).min(axis=0) if g else np.full(len(masks), never)
                for g in reduced]
        # suffix minima over generators j.., one entry per subset
        self.ords = ords
        self.tail = [np.full(len(masks), never, dtype=np.int64)] * (m + 1)
        for j in reversed(range(m)):
            self.tail[j] = np.minimum(ords[j], self.tail[j + 1])
        self.F_mins = arith.exponent_matrix(F).dot(self.ind).min(axis=0)
        self.memo = {(): self.ops.start}
        self.nodes = 0

    def upper_bound(self) -> int:
        """A k that certainly fails: some subset degree overflows its cap."""
        tail = self.tail[0]
        bounded = tail > 0  # the full set always is: generators have no constant term
        room = (self.caps - self.F_mins)[bounded] // tail[bounded]
        return int(room.min()) + 1

    def hopeless(self, state, remaining: int, j: int) -> bool:
        mins = self.ops.subset_mins(state, self.ind)
        return bool((mins + remaining * self.tail[j] > self.caps).any())

    def survives(self, k: int) -> Optional[tuple]:
        """Some tuple with sum k whose product survives, or None."""
        m = self.pair.mu
        ops = self.ops

        def dfs(j: int, prefix: tuple, state, r: int):
            self.nodes += 1
            if self.nodes > self.budget.max_nodes:
                raise ResourceLimit(f"tuple search visited more than {self.budget.max_nodes} nodes")
            if j == m - 1:
                if r and not self.alive[j]:
                    return None
                last = ops.times_power(state, j, r) if r else state
                return None if ops.is_zero(last) else prefix + (r,)
            lo, hi = self._exponent_range(state, j, r)
            if lo > hi:
                return None
            # jump to the first feasible l, then multiply by g_j once per step
            cur = state if lo == 0 else self._jump(prefix, state, j, lo)
            for l in range(lo, hi + 1):
                if l > lo:
                    cur = self._step(prefix, cur, j, l)
                if ops.is_zero(cur):
                    break
                rem = r - l
                if rem and self.hopeless(cur, rem, j + 1):
                    continue
                found = dfs(j + 1, prefix + (l,), cur, rem)
                if found is not None:
                    return found
            return None

        if k == 0:
            return (0,) * m
        if self.hopeless(ops.start, k, 0):
            return None
        return dfs(0, (), ops.start, k)

    def _exponent_range(self, state, j: int, r: int) -> tuple:
        """Bounds on l_j from the subset prune applied before multiplying:
        the A-degree of ``state * g_j^l`` is at least ``mins + l * ord_A(g_j)``,
        so feasibility is linear in l for each subset."""
        coef = self.ords[j] - self.tail[j + 1]
        base = self.ops.subset_mins(state, self.ind) + r * self.tail[j + 1] - self.caps
        if (base[coef == 0] > 0).any():
            return 1, 0
        lo, hi = 0, r
        neg, pos = coef < 0, coef > 0
        if neg.any():
            lo = max(lo, int((-(-base[neg] // -coef[neg])).max()))
        if pos.any():
            hi = min(hi, int(((-base[pos]) // coef[pos]).min()))
        return lo, hi

    def _jump(self, prefix: tuple, state, j: int, l: int):
        key = prefix + (l,)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = self.ops.times_power(state, j, l)
        if len(self.memo) < self.budget.max_memo:
            self.memo[key] = out
        return out

    def _step(self, prefix: tuple, cur, j: int, l: int):
        key = prefix + (l,)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        state = self.ops.times(cur, j)
        if len(self.memo) < self.budget.max_memo:
            self.memo[key] = state
        return state


def nu_level(pair: IdealPair, lvl: BracketLevel, budget: Budget | None = None) -> NuRecord:
    """Largest k with ``a^k * F`` not inside ``m^[q]``, by binary search on k.

    Membership of ``a^k * F`` is monotone in k (``a^(k+1)`` sits inside
    ``a^k``), so bisection over ``[0, upper_bound)`` is exact.  Each probe
    runs a DFS over generator-exponent tuples that prunes on zero partial
    products and on degree bounds over every subset of the variables.

    Returns a record with ``nu = NOT_F_PURE_AT_LEVEL`` (None) when
    ``f^(q-1)`` already lies in ``m^[q]``.
    """
    _check(pair, lvl)
    search = _NuSearch(pair, lvl, budget or Budget())
    if search.F_zero:
        return NuRecord(lvl, NOT_F_PURE_AT_LEVEL, None)
    lo, witness = 0, (0,) * pair.mu
    hi = search.upper_bound()
    while hi - lo > 1:
        mid = (lo + hi) // 2
        found = search.survives(mid)
        if found is None:
            hi = mid
        else:
            lo, witness = mid, found
    return NuRecord(lvl, lo, witness)


def survives_at(pair: IdealPair, lvl: BracketLevel, k: int, budget: Budget | None = None) -> Optional[tuple]:
    """Witness tuple of total degree k surviving mod ``m^[q]``, or None."""
    _check(pair, lvl)
    search = _NuSearch(pair, lvl, budget or Budget())
    if search.F_zero:
        return None
    return search.survives(k)


def witness_product(pair: IdealPair, lvl: BracketLevel, witness: Sequence[int]) -> SparsePoly:
    """``F * g^witness`` reduced mod ``m^[q]`` (exact, no search shortcuts)."""
    from .ffpoly import mul_reduced, pow_reduced

    if len(witness) != pair.mu:
        raise ValueError("witness length must equal the number of generators")
    prod = multiplier_power(pair, lvl)
    for g, l in zip(pair.gens, witness):
        prod = mul_reduced(prod, pow_reduced(g, l, lvl), lvl)
    return prod


def fedder_fpure_at(pair: IdealPair, t, lvl: BracketLevel, budget: Budget | None = None) -> bool:
    """Level-q Fedder test: ``floor(t (q-1)) <= nu(q)``.

    A True answer at one level is evidence, not a proof, of F-purity.
    """
    t = Fraction(t)
    if t < 0:
        raise ValueError("exponent t must be nonnegative")
    k = math.floor(t * (lvl.q - 1))
    rec = nu_level(pair, lvl, budget)
    return rec.f_pure and k <= rec.nu


def _compositions(k: int, m: int):
    """All m-tuples of naturals summing to k, in lex order (stars and bars)."""
    for bars in itertools.combinations(range(k + m - 1), m - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(k + m - 2 - prev)
        yield tuple(parts)


def oracle_nu(pair: IdealPair, lvl: BracketLevel, bound: int = 64) -> NuRecord:
    """Brute-force nu for tests: ascending k, every tuple, products rebuilt
    from scratch by repeated multiply-then-reduce on plain term maps."""
    _check(pair, lvl)
    q = lvl.q
    if pair.d * (q - 1) > bound:
        raise ResourceLimit(f"oracle bound exceeded: d(q-1) = {pair.d * (q - 1)} > {bound}")

    def times(a: SparsePoly, b: SparsePoly) -> SparsePoly:
        return reduce_mod_bracket(a * b, lvl)

    F = pair.ring.one()
    if pair.multiplier is not None:
        for _ in range(q - 1):
            F = times(F, pair.multiplier)
    if F.is_zero():
        return NuRecord(lvl, NOT_F_PURE_AT_LEVEL, None)
    best, best_witness = 0, (0,) * pair.mu
    for k in range(1, pair.d * (q - 1) + 1):
        hit = None
        for tup in _compositions(k, pair.mu):
            prod = F
            for g, l in zip(pair.gens, tup):
                for _ in range(l):
                    if prod.is_zero():
                        break  # this tuple's product stays zero
                    prod = times(prod, g)
            if not prod.is_zero():
                hit = tup
                break
        if hit is None:
            break
        best, best_witness = k, hit
    return NuRecord(lvl, best, best_witness)
