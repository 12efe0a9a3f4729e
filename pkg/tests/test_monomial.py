import random
from fractions import Fraction

import pytest

from fptkit.errors import NotMPrimary
from fptkit.harness import random_ideal, random_m_primary
from fptkit.monomial import (
    MonomialIdeal,
    NewtonPolytope,
    contains,
    fpt_certificate,
    fpt_lp,
    height,
    integral_closure,
    maximal_ideal,
    multiplicity,
)

A23 = MonomialIdeal(2, [(2, 0), (0, 3)])
CUBE = MonomialIdeal(3, [(2, 0, 0), (0, 2, 0), (0, 0, 2)])


def test_normalization():
    a = MonomialIdeal(2, [(1, 1), (2, 3), (1, 1), (0, 4)])
    assert a.gens == ((0, 4), (1, 1))
    with pytest.raises(ValueError):
        MonomialIdeal(2, [(0, 0)])
    with pytest.raises(ValueError):
        MonomialIdeal(2, [(1, -1)])


def test_fpt_examples():
    assert fpt_lp(A23) == Fraction(5, 6)
    assert fpt_lp(CUBE) == Fraction(3, 2)
    assert fpt_lp(MonomialIdeal(1, [(3,)])) == Fraction(1, 3)
    assert fpt_lp(MonomialIdeal(2, [(1, 1)])) == 1


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("r", [2, 3, 5])
def test_powers_of_maximal_ideal(d, r):
    assert fpt_lp(maximal_ideal(d, r)) == Fraction(d, r)


def test_contains_examples():
    P = A23.newton_polytope()
    assert contains(P, (1, 2))
    assert not contains(P, (1, 1))
    for v in P.vertices:
        assert contains(P, v)
    assert contains(P, (Fraction(6, 5), Fraction(6, 5)))
    assert not contains(P, (Fraction(5, 6), Fraction(5, 6)))
    mu = P.certificate((1, 2))
    assert mu is not None and sum(mu) == 1


def test_closure_examples():
    assert integral_closure(CUBE) == maximal_ideal(3, 2)
    x = MonomialIdeal(1, [(1,)])
    assert integral_closure(x) == x
    assert integral_closure(A23).gens == ((0, 3), (1, 2), (2, 0))


def test_height_examples():
    assert height(A23) == 2
    assert height(MonomialIdeal(3, [(1, 1, 0), (1, 0, 1)])) == 1
    assert height(MonomialIdeal(1, [(1,)])) == 1


def test_multiplicity_examples():
    for n in range(1, 5):
        assert multiplicity(maximal_ideal(2, n)) == n * n
    assert multiplicity(A23) == 6
    assert multiplicity(CUBE) == 8


def test_multiplicity_requires_m_primary():
    with pytest.raises(NotMPrimary, match="Y"):
        multiplicity(MonomialIdeal(2, [(2, 0), (1, 1)]), variables=("X", "Y"))


def test_certificate_verifies():
    rng = random.Random(5)
    for _ in range(40):
        a = random_ideal(rng, "monomial", rng.randint(1, 3), 6, rng.randint(1, 4))
        cert = fpt_certificate(a)
        assert cert.verify(a.gens)
        assert fpt_lp(a) == 1 / cert.s
        # (1,...,1) sits on the boundary of t P(a) at the threshold
        t = fpt_lp(a)
        P = a.newton_polytope()
        assert contains(P, [1 / t] * a.d)
        assert not contains(P, [1 / t - Fraction(1, 1000)] * a.d)


# --- laws on random ideals ---------------------------------------------------

def _random_monomials(seed, n, max_deg=5):
    rng = random.Random(seed)
    return [random_ideal(rng, "monomial", rng.randint(1, 3), max_deg, rng.randint(1, 4)) for _ in range(n)]


@pytest.mark.parametrize("seed", range(3))
def test_closure_and_power_laws(seed):
    for a in _random_monomials(seed, 15):
        abar = integral_closure(a)
        assert fpt_lp(abar) == fpt_lp(a)
        assert integral_closure(abar) == abar
        assert all(g in abar for g in a.gens)
        for n in (2, 3):
            assert n * fpt_lp(a.power(n)) == fpt_lp(a)


@pytest.mark.parametrize("seed", range(3))
def test_bound_laws(seed):
    for a in _random_monomials(10 + seed, 30):
        t = fpt_lp(a)
        assert Fraction(1, a.order()) <= t <= Fraction(a.d, a.order())
        assert t <= height(a)
        if a.is_equigenerated():
            assert t >= Fraction(height(a), a.order())


def test_subadditivity():
    rng = random.Random(21)
    for _ in range(40):
        d = rng.randint(1, 3)
        a = random_ideal(rng, "monomial", d, 5, rng.randint(1, 3))
        b = random_ideal(rng, "monomial", d, 5, rng.randint(1, 3))
        assert fpt_lp(a) + fpt_lp(b) >= fpt_lp(a + b)


def _shoelace_multiplicity(a: MonomialIdeal) -> Fraction:
    """e(a) for d = 2 as twice the area below the Newton polygon."""
    pts = sorted(a.gens)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    poly = [(0, 0), (hull[-1][0], 0)] + hull[::-1]
    twice_area = 0
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        twice_area += x1 * y2 - x2 * y1
    return abs(Fraction(twice_area))


def test_multiplicity_matches_area_oracle():
    rng = random.Random(8)
    for _ in range(40):
        a = random_m_primary(rng, 2, 7, extra=3)
        assert multiplicity(a) == _shoelace_multiplicity(a)


def test_multiplicity_inequality_and_equality_case():
    rng = random.Random(9)
    for _ in range(30):
        d = rng.randint(1, 3)
        a = random_m_primary(rng, d, 4 if d == 3 else 6)
        e = multiplicity(a)
        t = fpt_lp(a)
        bound = (d / t) ** d
        assert e >= bound
        assert e == multiplicity(integral_closure(a))
        n = d / t
        is_power = n.denominator == 1 and integral_closure(a) == maximal_ideal(d, int(n))
        assert (e == bound) == is_power


def test_to_text():
    assert A23.to_text(("X", "Y")) == "(Y^3, X^2)"
    assert NewtonPolytope(A23.gens).d == 2
