"""Essential minimal pairs: exact drop -1/2 at weight 1/2, and arbitrarily
small negative drops with an irrational weight.

Run: python demos/essential_pairs.py
"""
from fractions import Fraction

from bshyper import AlphaSpec, FinStructure, is_isomorphic, rel_rank, verify
from bshyper.constructions import essential_minimal_pair

point = FinStructure(["a"])

half = AlphaSpec.of({"E": "1/2"})
seen = []
for seed in range(8):
    cert = essential_minimal_pair(half, point, variant_seed=seed)
    D = cert.result
    if not any(is_isomorphic(D, R, over={"a": "a"}) for R in seen):
        seen.append(D)
    print(f"seed {seed}: {len(D)} vertices, drop {rel_rank(half, D, D.universe, ['a'])}, "
          f"certificate ok: {verify(cert)[0]}")
print(f"{len(seen)} pairwise non-isomorphic results out of 8")

surd = AlphaSpec.of({"E": "sqrt(2)/2"})
for eps in (Fraction(1, 4), Fraction(1, 10), Fraction(1, 50)):
    cert = essential_minimal_pair(surd, point, epsilon=eps)
    D = cert.result
    d = rel_rank(surd, D, D.universe, ["a"])
    print(f"eps {eps}: {len(D)} vertices, drop {d} ~ {float(d):.5f}")
