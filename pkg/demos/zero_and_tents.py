"""Rank-0 extensions and tents.

Run: python demos/zero_and_tents.py
"""
from fractions import Fraction

from bshyper import AlphaSpec, FinStructure, delta, icl, zero_set
from bshyper.constructions import tent, zero_extension

pair = AlphaSpec.of({"E": "sqrt(2)/2", "F": "1-sqrt(2)/2"})
A = FinStructure(["a", "b"], {"E": [("a", "b")]})
cert = zero_extension(pair, A)
D = cert.result
print(f"zero extension of an edge: {len(D)} vertices, rank {delta(pair, D)}")
print("whole structure is its own zero set:", zero_set(pair, D) == D.vertex_set)
print("points outside the zero set per round:", cert.info.get("outside_zero"))

half = AlphaSpec.of({"E": "1/2"})
N = tent(half, 3, Fraction(3, 4)).result
print(f"tent on 3 points at weight 1/2: {len(N)} vertices")
for a in ("a1", "a2", "a3"):
    print(f"  closure of {a}: {sorted(icl(half, N, [a]))}")
print(f"  closure of a1, a2 has {len(icl(half, N, ['a1', 'a2']))} vertices")
