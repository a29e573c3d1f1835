import json
import random
from fractions import Fraction

import pytest

from bshyper.constructions import (BaseNotStrong, BudgetInfeasible, Certificate, EpsilonTooLarge, NotCoherent,
                                   NotEssentialPair, PhiMemberStrong, absorb_join, amalgam, essential_minimal_pair,
                                   omit_extension, tent, verify, zero_extension)
from bshyper.rank import delta, icl, in_kalpha, is_strong, rel_rank, zero_set
from bshyper.structures import FinStructure, find_embeddings, induced, is_isomorphic
from bshyper.weights import AlphaSpec, Weight
from oracles import (HALF, PAIR, SURD, mutate_certificate, naive_embeds, naive_essential, naive_in_kalpha,
                     naive_strong, rel_list)

POINT = FinStructure(["a"])


def drop(cert, spec=None):
    spec = spec or cert.spec
    return rel_rank(spec, cert.result, cert.result.universe, cert.base)


def test_amalgam_examples():
    M = FinStructure(["a"])
    c = amalgam(HALF, M, [], FinStructure(["x", "y"], {"E": [("x", "y")]}))
    assert len(c.result) == 3 and c.result.count() == 1
    assert naive_strong(HALF, c.result, M.universe)
    assert amalgam(HALF, M, ["a"], M).result == M
    # complete graph on five points has rank 0, below the point's rank 1
    K5 = FinStructure("abcde", {"E": [(x, y) for x in "abcde" for y in "abcde" if x < y]})
    with pytest.raises(BaseNotStrong):
        amalgam(HALF, M, ["a"], K5)


def test_emp_rational_point():
    cert = essential_minimal_pair(HALF, POINT)
    D = cert.result
    assert drop(cert) == Fraction(-1, 2)
    assert len(D) <= 64
    assert naive_essential(HALF, D, ["a"])
    assert verify(cert)[0]


def test_emp_seeds_differ():
    Ds = [essential_minimal_pair(HALF, POINT, variant_seed=s).result for s in range(4)]
    pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    assert any(not is_isomorphic(Ds[i], Ds[j], over={"a": "a"}) for i, j in pairs)


def test_emp_irrational_drop():
    cert = essential_minimal_pair(SURD, POINT, epsilon=Fraction(1, 10))
    d = drop(cert)
    assert Weight(Fraction(-1, 10)) < d < 0
    assert verify(cert)[0]


def test_emp_large_base_uses_one_symbol():
    A = FinStructure([f"a{i}" for i in range(8)])
    cert = essential_minimal_pair(PAIR, A, epsilon=Fraction(1, 10))
    new = {sym for sym, t in rel_list(cert.result) if not t <= set(A.universe)}
    assert len(new) == 1 and not PAIR.alpha(new.pop()).is_rational
    assert Weight(Fraction(-1, 10)) < drop(cert) < 0
    assert verify(cert)[0]


def test_epsilon_clamp_and_strict():
    cert = essential_minimal_pair(SURD, POINT, epsilon=Fraction(5))
    assert drop(cert) < 0 and verify(cert)[0]
    with pytest.raises(EpsilonTooLarge):
        essential_minimal_pair(SURD, POINT, epsilon=Fraction(5), strict_epsilon=True)


def test_absorb_join_examples():
    B = FinStructure(["a", "b"])
    C = essential_minimal_pair(HALF, B).result
    cert = absorb_join(HALF, C, ["a", "b"], ["a"])
    assert cert.info["copies"] == 2
    assert rel_rank(HALF, cert.result, cert.result.universe, ["a"]) == 0
    assert verify(cert)[0]
    # delta(B/A) below gamma: nothing is added
    cert0 = absorb_join(HALF, C, ["a", "b"], ["a", "b"])
    assert cert0.info["copies"] == 0 and cert0.result == B
    with pytest.raises(NotEssentialPair):
        absorb_join(HALF, B, ["a"], ["a"])


def _minimal_pair_over(B: FinStructure):
    """B plus a point joined to both ends of B and to a second new point joined to both ends."""
    a, b = B.universe[:2]
    rels = [tuple(t) for _, t in rel_list(B)]
    rels += [(a, "x"), (b, "x"), (a, "y"), (b, "y"), ("x", "y")]
    return FinStructure(list(B.universe) + ["x", "y"], {"E": [tuple(sorted(t)) for t in rels]})


def test_omit_rational():
    B = FinStructure(["a", "b"])
    C = _minimal_pair_over(B)
    assert not is_strong(HALF, C, B.universe)
    for m in (2, 3, 5):
        cert = omit_extension(HALF, B, ["a"], [C], m=m)
        D = cert.result
        assert rel_rank(HALF, D, D.universe, ["a"]) == 0
        assert not naive_embeds(C, D, {v: v for v in B.universe}) if len(D) <= 9 else \
            not find_embeddings(C, D, {v: v for v in B.universe}, limit=1)
        assert verify(cert)[0]


def test_omit_trivial_and_errors():
    B = FinStructure(["a", "b"], {"E": [("a", "b")]})
    cert = omit_extension(HALF, B, ["a", "b"], [])
    assert cert.result == B
    strong_C = FinStructure(["a", "b", "c"], {"E": [("a", "b")]})
    with pytest.raises(PhiMemberStrong):
        omit_extension(HALF, B, ["a"], [strong_C])


def test_omit_irrational_bound():
    from bshyper.numtheory import granularity
    B = FinStructure(["a", "b"])
    C = _minimal_pair_over(B)
    cert = omit_extension(PAIR, B, ["a"], [C], m=3)
    d = rel_rank(PAIR, cert.result, cert.result.universe, ["a"])
    assert 0 <= d < granularity(PAIR, 3)
    assert not find_embeddings(C, cert.result, {"a": "a", "b": "b"}, limit=1)
    assert verify(cert)[0]


def test_zero_extension_rational():
    cert = zero_extension(HALF, POINT)
    assert delta(HALF, cert.result) == 0 and verify(cert)[0]
    tri_spec = AlphaSpec.of({"E": "2/3"})
    tri = FinStructure("abc", {"E": [("a", "b"), ("b", "c"), ("a", "c")]})
    cert = zero_extension(tri_spec, tri)
    assert cert.info.get("copies", 3) == 3
    assert delta(tri_spec, cert.result) == 0
    assert zero_set(tri_spec, cert.result) == cert.result.vertex_set


def test_zero_extension_irrational():
    cert = zero_extension(PAIR, POINT)
    D = cert.result
    assert delta(PAIR, D) == 0
    assert zero_set(PAIR, D) == D.vertex_set
    assert induced(D, ["a"]) == POINT
    counts = cert.info["outside_zero"]
    assert all(x > y for x, y in zip(counts, counts[1:]))
    assert verify(cert)[0]


def test_zero_extension_needs_coherence():
    with pytest.raises(NotCoherent):
        zero_extension(SURD, POINT)


def test_tent_examples():
    assert tent(HALF, 1, Fraction(3, 4)).result == FinStructure(["a1"])
    cert = tent(HALF, 2, Fraction(3, 4))
    N = cert.result
    assert naive_in_kalpha(HALF, N) if len(N) <= 12 else in_kalpha(HALF, N)
    for a in ("a1", "a2"):
        assert icl(HALF, N, [a]) == {a}
    assert verify(cert)[0]
    cert = tent(SURD, 3, Fraction(1, 8))
    for a in ("a1", "a2", "a3"):
        assert icl(SURD, cert.result, [a]) == {a}
    assert verify(cert)[0]
    with pytest.raises(BudgetInfeasible):
        tent(HALF, 3, Fraction(1, 4))
    with pytest.raises(BudgetInfeasible):
        tent(HALF, 5, Fraction(3, 4))


def test_certificate_round_trip_and_determinism():
    a = essential_minimal_pair(HALF, POINT, variant_seed=3)
    b = essential_minimal_pair(HALF, POINT, variant_seed=3)
    ja = json.dumps(a.to_json(), sort_keys=True)
    assert ja == json.dumps(b.to_json(), sort_keys=True)
    back = Certificate.from_json(json.loads(ja))
    assert back.result == a.result and verify(back)[0]


def test_tampering_is_caught_by_claims_alone():
    cert = zero_extension(HALF, FinStructure(["a", "b"]))
    rng = random.Random(0)
    for m in mutate_certificate(cert, rng, 20):
        assert not verify(m)[0]
        m.pop("digest")
        assert not verify(m)[0]


def test_forged_rank_claim_rejected():
    cert = essential_minimal_pair(HALF, POINT).to_json()
    for c in cert["claims"]:
        if c["kind"] == "rank_equals":
            c["value"] = {"num": 7, "den": 2}
    ok, results = verify(cert)
    assert not ok and any(not r.ok and r.claim["kind"] == "rank_equals" for r in results)
