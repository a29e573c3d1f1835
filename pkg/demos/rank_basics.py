"""Ranks, strong subsets and closures on a small graph.

Run: python demos/rank_basics.py
"""
from bshyper import AlphaSpec, FinStructure, delta, icl, in_kalpha, is_strong, rel_rank

spec = AlphaSpec.of({"E": "1/2"})

# a 4-cycle with one chord
S = FinStructure("abcd", {"E": [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"), ("a", "c")]})
print("rank of S:", delta(spec, S))
print("every subset has rank >= 0:", bool(in_kalpha(spec, S)))

for X in (["a"], ["a", "c"], ["b", "d"]):
    print(f"rank of S over {X}: {rel_rank(spec, S, S.universe, X)}"
          f"  strong: {bool(is_strong(spec, S, X))}  closure: {sorted(icl(spec, S, X))}")

# with an irrational weight the same graph ranks differently
surd = AlphaSpec.of({"E": "sqrt(2)/2"})
print("rank with weight sqrt(2)/2:", delta(surd, S), "~", float(delta(surd, S)))
