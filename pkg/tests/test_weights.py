from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bshyper.weights import (AlphaSpec, MixedSurdBase, SignatureError, Weight, is_coherent, is_rational,
                             parse_weight, surd_sign, weight_compare)

mpmath.mp.dps = 50

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=40)
surds = st.builds(lambda a, b: Weight(a, b, 2), fracs, fracs)


def high_precision(x: Weight):
    return mpmath.mpf(x.a.numerator) / x.a.denominator + \
        mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.d)


def test_compare_examples():
    assert weight_compare(Fraction(1, 2), Fraction(1, 2)) == "EQ"
    assert weight_compare(parse_weight("sqrt(2)/2"), Fraction(2, 3)) == "GT"
    assert weight_compare(parse_weight("1 - sqrt(2)/2"), 0) == "GT"


def test_mixed_bases_rejected():
    with pytest.raises(MixedSurdBase):
        Weight.sqrt(2) + Weight.sqrt(3)
    with pytest.raises(MixedSurdBase):
        AlphaSpec.of({"E": "sqrt(2)/2", "F": "sqrt(3)/2"})


def test_square_factors_pulled_out():
    assert Weight.sqrt(8) == Weight(0, 2, 2)
    assert Weight.sqrt(9) == Weight(3)


def test_parse_forms():
    assert parse_weight("1/2") == Weight(Fraction(1, 2))
    assert parse_weight("1 - sqrt(2)/2") == Weight(1, Fraction(-1, 2), 2)
    assert parse_weight("3/4*sqrt(5)") == Weight(0, Fraction(3, 4), 5)
    with pytest.raises(ValueError):
        parse_weight("two")


@pytest.mark.parametrize("mapping, expect", [
    ({"E": "1/2"}, (True, 2)),
    ({"E": "2/3", "F": "1/2"}, (True, 6)),
    ({"E": "sqrt(2)/2", "F": "1-sqrt(2)/2"}, (False, None)),
])
def test_is_rational(mapping, expect):
    assert is_rational(AlphaSpec.of(mapping)) == expect


def test_is_coherent():
    assert is_coherent(AlphaSpec.of({"E": "1/2"})) == (True, {"E": 1})
    ok, wit = is_coherent(AlphaSpec.of({"E": "sqrt(2)/2", "F": "1-sqrt(2)/2"}))
    assert ok and wit == {"E": 1, "F": 1}
    assert is_coherent(AlphaSpec.of({"E": "sqrt(2)/2"})) == (False, None)


@given(st.lists(st.tuples(fracs.filter(lambda x: x != 0), st.booleans()), min_size=1, max_size=4))
def test_coherence_witness_cancels_surd(parts):
    # weights c + s*sqrt(2)/k kept inside (0, 1]
    syms = []
    for i, (q, neg) in enumerate(parts):
        b = Fraction(1, 4 + abs(q.denominator)) * (-1 if neg else 1)
        syms.append((f"E{i}", 2, Weight(Fraction(1, 2), b, 2)))
    spec = AlphaSpec(syms)
    ok, wit = is_coherent(spec)
    if ok:
        total = Weight(0)
        for s in spec:
            assert wit[s.name] > 0
            total = total + s.alpha * wit[s.name]
        assert total.is_rational
    else:
        signs = {s.alpha.b > 0 for s in spec if s.alpha.b}
        assert len(signs) == 1


def test_signature_restrictions():
    with pytest.raises(SignatureError):
        AlphaSpec.of({"E": "1"})
    with pytest.raises(SignatureError):
        AlphaSpec.of({"E": "3/2"})
    with pytest.raises(SignatureError):
        AlphaSpec([("E", 1, "1/2")])
    AlphaSpec.of({"E": ("1", 3)})


@given(surds, surds)
def test_field_identities(x, y):
    assert weight_compare(x + y, y + x) == "EQ"
    assert (x - y) + y == x
    assert x * y == y * x
    if y:
        assert (x / y) * y == x


@given(surds)
def test_sign_trichotomy_and_decimal_oracle(x):
    flags = [x < 0, x == 0, x > 0]
    assert sum(flags) == 1
    ref = high_precision(x)
    assert x.sign() == (ref > 0) - (ref < 0)


@given(surds)
def test_floor_matches_decimal(x):
    assert int(mpmath.floor(high_precision(x))) == x.__floor__()


@given(st.lists(st.tuples(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6)), min_size=1, max_size=30))
@settings(max_examples=50)
def test_vector_sign_agrees_with_scalar(pairs):
    p = [a for a, _ in pairs]
    q = [b for _, b in pairs]
    got = surd_sign(p, q, 2).tolist()
    assert got == [Weight(a, b, 2).sign() for a, b in pairs]


@given(surds)
def test_json_round_trip(x):
    assert Weight.from_json(x.to_json()) == x
    assert parse_weight(str(x)) == x
