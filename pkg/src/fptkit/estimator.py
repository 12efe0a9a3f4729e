"""Rigorous rational bounds on the F-pure threshold from finitely many levels,
plus a labelled guess at the limit.

Lower bound: a surviving level gives ``fpt >= nu(q)/q``.

Upper bound: if ``a^k F`` lies in ``m^[q]`` with ``k = nu(q)+1`` then every
product of ``N = p*k + (p-1)*mu`` generators splits as ``g^r (g^s)^p`` with
``r_i < p`` and ``sum(s) >= k``, so it lies in ``m^[pq]``; the multiplier
power ``f^(pq-1) = f^(p-1) (f^(q-1))^p`` is absorbed the same way.  Hence
``w_e = nu(p^e) + 1 + mu`` satisfies ``w_(e+1) <= p w_e`` and
``U_e = w_e / p^e`` is a non-increasing upper bound on the limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Protocol

from .errors import AllLevelsNotFPure, FPTError, ResourceLimit
from .ffpoly import BracketLevel
from .frobenius import Budget, IdealPair, NuRecord, nu_level

__all__ = [
    "NuSequence",
    "FptInterval",
    "ClosedFormGuess",
    "default_levels",
    "nu_sequence",
    "bounds",
    "conjecture",
]


class NuCache(Protocol):
    def get(self, pair: IdealPair, lvl: BracketLevel) -> Optional[NuRecord]: ...

    def put(self, pair: IdealPair, record: NuRecord) -> None: ...


@dataclass(frozen=True)
class NuSequence:
    pair: IdealPair
    records: tuple

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for i, rec in enumerate(self.records, start=1):
            if rec.level.e != i or rec.level.p != self.pair.p:
                raise ValueError("levels must be consecutive starting at e = 1")
        dead = False
        for rec in self.records:
            if dead and rec.f_pure:
                raise FPTError("internal error: F-pure level after a NOT_F_PURE_AT_LEVEL level")
            dead = dead or not rec.f_pure

    @property
    def nus(self) -> tuple:
        return tuple(r.nu for r in self.records)

    def finite(self) -> tuple:
        return tuple(r for r in self.records if r.f_pure)


@dataclass(frozen=True)
class FptInterval:
    lower: Fraction
    upper: Fraction
    lower_level: int
    upper_level: int

    def __contains__(self, value) -> bool:
        return self.lower <= Fraction(value) <= self.upper


@dataclass(frozen=True)
class ClosedFormGuess:
    """``limit = nu(p^e0)/p^e0 + delta/(p^e0 (p-1))``; never a proof."""

    limit: Fraction
    e0: int
    delta: int
    confirmed_steps: int
    status: str = field(default="CONJECTURED")


def default_levels(p: int) -> int:
    return 3 if p <= 7 else 2


def nu_sequence(pair: IdealPair, E: int | None = None, *, cache: NuCache | None = None,
                budget: Budget | None = None) -> NuSequence:
    """nu records for ``e = 1..E``.  Once a level is not F-pure every later
    level is too, so the remaining records are filled without searching."""
    if E is None:
        E = default_levels(pair.p)
    if E < 1:
        raise ValueError("E must be >= 1")
    records = []
    for e in range(1, E + 1):
        lvl = BracketLevel(pair.p, e)
        if records and not records[-1].f_pure:
            records.append(NuRecord(lvl, None, None))
            continue
        rec = cache.get(pair, lvl) if cache is not None else None
        if rec is None:
            try:
                rec = nu_level(pair, lvl, budget)
            except ResourceLimit as exc:
                raise ResourceLimit(str(exc), partial=NuSequence(pair, records)) from exc
            if cache is not None:
                cache.put(pair, rec)
        records.append(rec)
    return NuSequence(pair, records)


def bounds(seq: NuSequence) -> FptInterval:
    finite = seq.finite()
    if not finite:
        raise AllLevelsNotFPure(f"{seq.pair.describe()} is not F-pure at any tested level")
    mu = seq.pair.mu
    lows = [(Fraction(r.nu, r.q), r.e) for r in finite]
    ups = [(Fraction(r.nu + 1 + mu, r.q), r.e) for r in finite]
    lower = max(v for v, _ in lows)
    upper = min(v for v, _ in ups)
    # report the earliest level achieving each bound
    lower_e = min(e for v, e in lows if v == lower)
    upper_e = min(e for v, e in ups if v == upper)
    return FptInterval(lower, upper, lower_e, upper_e)


def conjecture(seq: NuSequence) -> Optional[ClosedFormGuess]:
    """Guess the limit from constant ``delta_e = nu(p^(e+1)) - p nu(p^e)``.

    Fires when the last two deltas agree, or when only one delta exists.
    """
    finite = seq.finite()
    if len(finite) < 2:
        return None
    p = seq.pair.p
    nus = [r.nu for r in finite]
    deltas = [nus[i + 1] - p * nus[i] for i in range(len(nus) - 1)]
    if len(deltas) >= 2 and deltas[-1] != deltas[-2]:
        return None
    delta = deltas[-1]
    run = 1
    while run < len(deltas) and deltas[-run - 1] == delta:
        run += 1
    e0 = len(deltas) - run + 1
    q0 = p**e0
    limit = Fraction(nus[e0 - 1], q0) + Fraction(delta, q0 * (p - 1))
    return ClosedFormGuess(limit, e0, delta, run)
