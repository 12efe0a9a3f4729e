import random
from fractions import Fraction

import pytest

from fptkit.errors import AllLevelsNotFPure, FPTError, ResourceLimit
from fptkit.ffpoly import BracketLevel
from fptkit.estimator import (
    FptInterval,
    NuSequence,
    bounds,
    conjecture,
    default_levels,
    nu_sequence,
)
from fptkit.frobenius import Budget, IdealPair, NuRecord
from fptkit.harness import _monomial_pair, random_ideal
from fptkit.monomial import fpt_lp

XYZ = ["X", "Y", "Z"]
E8 = "X^2 + Y^3 + Z^5"


def pair(p, variables, gens, multiplier=None):
    return IdealPair.from_text(p, list(variables), list(gens), multiplier)


def fake_sequence(p, nus, gens=("X",)):
    P = pair(p, "X", gens)
    return NuSequence(P, [NuRecord(BracketLevel(p, e), nu, None) for e, nu in enumerate(nus, start=1)])


def test_sequence_examples():
    assert nu_sequence(pair(3, "X", ["X"]), 3).nus == (2, 8, 26)
    assert nu_sequence(pair(11, XYZ, XYZ, E8), 2).nus == (1, 16)
    assert nu_sequence(pair(7, XYZ, XYZ, E8), 2).nus == (1, 8)


def test_default_levels():
    assert [default_levels(p) for p in (2, 3, 5, 7, 11, 13)] == [3, 3, 3, 3, 2, 2]


def test_bounds_examples():
    iv = bounds(nu_sequence(pair(7, "XY", ["X^2", "Y^3"]), 1))
    assert (iv.lower, iv.upper) == (Fraction(5, 7), Fraction(8, 7))
    assert Fraction(5, 6) in iv

    iv = bounds(nu_sequence(pair(5, "XY", ["X", "Y"]), 2))
    assert (iv.lower, iv.upper) == (Fraction(48, 25), Fraction(51, 25))
    assert (iv.lower_level, iv.upper_level) == (2, 2)
    assert 2 in iv

    seq = nu_sequence(pair(2, "X", ["X^2"]), 1)
    assert seq.nus == (0,)
    iv = bounds(seq)
    assert (iv.lower, iv.upper) == (0, Fraction(2, 2))


def test_bounds_e8_at_eleven():
    iv = bounds(nu_sequence(pair(11, XYZ, XYZ, E8), 2))
    assert iv == FptInterval(Fraction(16, 121), Fraction(20, 121), 2, 2)


def test_all_levels_not_f_pure():
    seq = nu_sequence(pair(2, "X", ["X^2"], "X^2"), 3)
    assert seq.nus == (None, None, None)
    with pytest.raises(AllLevelsNotFPure):
        bounds(seq)
    assert conjecture(seq) is None


def test_conjecture_examples():
    g = conjecture(nu_sequence(pair(5, "X", ["X"]), 3))
    assert (g.limit, g.confirmed_steps, g.status) == (1, 2, "CONJECTURED")
    g = conjecture(nu_sequence(pair(11, XYZ, XYZ, E8), 2))
    assert (g.limit, g.confirmed_steps, g.e0, g.delta) == (Fraction(3, 22), 1, 1, 5)
    assert g.limit == Fraction(1, 6) - Fraction(1, 33)
    assert conjecture(fake_sequence(3, (1, 4, 14))) is None
    assert conjecture(fake_sequence(3, (1,))) is None


def test_conjecture_earliest_constant_level():
    # deltas (2, 1, 1): constant from e0 = 2
    g = conjecture(fake_sequence(2, (0, 2, 5, 11)))
    assert (g.e0, g.delta, g.confirmed_steps) == (2, 1, 2)
    assert g.limit == Fraction(2, 4) + Fraction(1, 4)


def test_sequence_validation():
    P = pair(3, "X", ["X"])
    with pytest.raises(ValueError):
        NuSequence(P, [NuRecord(BracketLevel(3, 2), 8, None)])
    with pytest.raises(FPTError):
        NuSequence(P, [NuRecord(BracketLevel(3, 1), None, None), NuRecord(BracketLevel(3, 2), 8, None)])


def test_resource_limit_keeps_partial_levels():
    with pytest.raises(ResourceLimit) as info:
        nu_sequence(pair(5, XYZ, ["X + Y", "Y + Z", "X*Z + Y^2"]), 3, budget=Budget(max_nodes=100))
    assert info.value.partial.nus == (10, 60)


class DictCache:
    def __init__(self):
        self.data, self.hits = {}, 0

    def get(self, P, lvl):
        rec = self.data.get((P, lvl.e))
        self.hits += rec is not None
        return rec

    def put(self, P, rec):
        self.data[(P, rec.e)] = rec


def test_cache_protocol():
    P = pair(3, "XY", ["X^2", "X*Y + Y^2"])
    cache = DictCache()
    first = nu_sequence(P, 3, cache=cache)
    second = nu_sequence(P, 3, cache=cache)
    assert first == second == nu_sequence(P, 3)
    assert cache.hits == 3


# --- interval properties ---------------------------------------------------------

def _per_level(seq, mu):
    lows = [Fraction(r.nu, r.q) for r in seq.finite()]
    ups = [Fraction(r.nu + 1 + mu, r.q) for r in seq.finite()]
    return lows, ups


@pytest.mark.parametrize("p", [2, 3, 5])
def test_monomial_intervals_contain_lp_threshold(p):
    rng = random.Random(p)
    for _ in range(12):
        a = random_ideal(rng, "monomial", rng.randint(1, 3), 4, rng.randint(1, 3))
        P = _monomial_pair(a, p)
        seq = nu_sequence(P, 3 if p < 5 else 2)
        t = fpt_lp(a)
        lows, ups = _per_level(seq, P.mu)
        assert all(lo <= t <= up for lo, up in zip(lows, ups))
        assert lows == sorted(lows)
        assert ups == sorted(ups, reverse=True)
        guess = conjecture(seq)
        if guess is not None and guess.confirmed_steps >= 2:
            assert guess.limit == t


def test_envelope_recursion_with_multiplier():
    for f in ("X*Y + Z^2", "X^2 + Y^3 + Z^4", "X^2 + Y^3 + Y*Z^3", E8, "X^3 + Y^3 + Z^3"):
        for p in (5, 7):
            P = pair(p, XYZ, XYZ, f)
            seq = nu_sequence(P, 2)
            nus = seq.nus
            if None in nus:
                continue
            assert nus[1] <= p * (nus[0] + 1) + (p - 1) * P.mu - 1
            iv = bounds(seq)
            assert iv.lower <= iv.upper
