import math
import random
from fractions import Fraction
from itertools import islice, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bshyper.numtheory import (NoSolution, NotCoherentIrrational, RationalInput, beta_lower_bound, cf_convergents,
                               cf_expansion, coarse_bounds, granularity, lower_approximations, solve_diophantine)
from bshyper.rank import delta, in_kalpha
from bshyper.weights import AlphaSpec, Weight, parse_weight
from oracles import HALF, PAIR, SURD, TWO, random_structure

ROOT_HALF = parse_weight("sqrt(2)/2")


def brute_granularity(spec, m):
    """Least positive sum alpha(E) n_E - k with 0 < k < m, n_E bounded generously."""
    best = None
    caps = [int(m / float(spec.alpha(e))) + 2 for e in spec.names]
    for ns in product(*(range(c + 1) for c in caps)):
        s = Weight(0)
        for e, k in zip(spec.names, ns):
            s = s + spec.alpha(e) * k
        for k in range(1, m):
            v = s - k
            if v > 0 and (best is None or v < best):
                best = v
    return best


@pytest.mark.parametrize("spec, bounds", [
    (HALF, (3, 6)),
    (AlphaSpec.of({"E": "2/3"}), (2, 4)),
    (AlphaSpec.of({"T": ("1", 3)}), (2, 6)),
])
def test_coarse_bounds(spec, bounds):
    b = coarse_bounds(spec)
    assert (b.m_pt, b.m_suff) == bounds


def test_granularity_examples():
    assert granularity(AlphaSpec.of({"E": "2/3"}), 2) == Fraction(1, 3)
    assert all(granularity(HALF, m) == Fraction(1, 2) for m in range(2, 11))
    assert all(granularity(TWO, m) == Fraction(1, 6) for m in range(2, 11))


@pytest.mark.parametrize("spec", [HALF, TWO, PAIR, SURD])
def test_granularity_matches_brute_force(spec):
    prev = None
    for m in range(2, 8):
        g = granularity(spec, m)
        assert g == brute_granularity(spec, m)
        assert all(g <= spec.alpha(e) for e in spec.names) or m > 2
        if prev is not None:
            assert g <= prev
        prev = g
    assert all(granularity(spec, 2) <= spec.alpha(e) for e in spec.names)


def test_irrational_granularity_shrinks():
    # at m = q of a lower approximation the gap q*x - p is itself a candidate
    for p, q in islice(lower_approximations(ROOT_HALF), 2, 8):
        assert granularity(SURD, p + 1) <= ROOT_HALF * q - p


def test_continued_fraction_examples():
    assert cf_expansion(ROOT_HALF, 5) == [0, 1, 2, 2, 2, 2]
    conv = cf_convergents(ROOT_HALF, 5)
    assert [(c.p, c.q) for c in conv] == [(1, 1), (2, 3), (5, 7), (12, 17), (29, 41)]
    with pytest.raises(RationalInput):
        cf_expansion(Weight(Fraction(1, 2)), 3)


@pytest.mark.parametrize("x", ["sqrt(2)/2", "1 - sqrt(2)/2", "sqrt(3) - 1", "sqrt(5)/3"])
def test_even_convergent_bounds(x):
    x = parse_weight(x)
    conv = cf_convergents(x, 14, start=0)
    prev = None
    for k in range(0, 13, 2):
        c, nxt = conv[k], conv[k + 1]
        gap = x - Fraction(c.p, c.q)
        assert Fraction(1, c.q * (c.q + nxt.q)) < gap < Fraction(1, c.q * nxt.q)
        if prev is not None:
            assert Fraction(c.p, c.q) > prev
        prev = Fraction(c.p, c.q)


def test_lower_approximations_improve():
    last = None
    for p, q in islice(lower_approximations(ROOT_HALF), 30):
        gap = ROOT_HALF * q - p
        assert gap > 0
        if last is not None:
            assert gap < last
        last = gap


def test_diophantine_examples():
    assert list(islice(solve_diophantine(HALF, Fraction(-1, 2)), 3)) == [(1, {"E": 3}), (2, {"E": 5}), (3, {"E": 7})]
    two_thirds = AlphaSpec.of({"E": "2/3"})
    assert list(islice(solve_diophantine(two_thirds, Fraction(-1, 3)), 2)) == [(1, {"E": 2}), (3, {"E": 5})]
    with pytest.raises(NoSolution):
        next(solve_diophantine(PAIR, Fraction(-1, 2)))


@pytest.mark.parametrize("spec", [HALF, TWO, AlphaSpec.of({"E": "3/5", "F": "1/4", "G": "5/6"})])
def test_diophantine_substitution(spec):
    c = math.lcm(*(spec.alpha(e).a.denominator for e in spec.names))
    target = Fraction(-1, c)
    ns = []
    for n, m in islice(solve_diophantine(spec, target, min_n=2), 100):
        assert all(k > 0 for k in m.values())
        total = Weight(n)
        for e, k in m.items():
            total = total - spec.alpha(e) * k
        assert total == target
        ns.append(n)
    assert ns == sorted(set(ns)) and ns[0] >= 2


def test_beta_lower_bound():
    b = beta_lower_bound(PAIR)
    assert Weight(0) < b <= granularity(PAIR, 2)
    exact = beta_lower_bound(PAIR, exact=True, max_size=4)
    assert b <= exact
    with pytest.raises(NotCoherentIrrational):
        beta_lower_bound(HALF)
    with pytest.raises(NotCoherentIrrational):
        beta_lower_bound(SURD)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_beta_bounds_small_positive_ranks(seed):
    rng = random.Random(seed)
    b = beta_lower_bound(PAIR)
    m_suff = coarse_bounds(PAIR).m_suff
    S = random_structure(PAIR, rng.randint(1, min(5, m_suff - 1)), rng)
    if in_kalpha(PAIR, S) and delta(PAIR, S) > 0:
        assert b <= delta(PAIR, S)
