"""Grow a finite piece of the generic structure and query it.

Run: python demos/fragment.py
"""
from bshyper import AlphaSpec, FinStructure
from bshyper.generic import build_fragment, check_fragment, eval_extension_formula

spec = AlphaSpec.of({"E": "1/2"})
frag = build_fragment(spec, 30, size_cap=4, seed=1)
top = frag.top
print(f"{frag.steps} steps, {len(top)} vertices, {top.count()} edges")
print("invariants:", check_fragment(frag))

v = top.universe[0]
cherry = FinStructure(["p", "q", "r"], {"E": [("p", "q"), ("p", "r")]})
print(f"{v} has two neighbours forming a cherry:", eval_extension_formula(spec, top, {"p": v}, cherry))

atomic = build_fragment(spec, 10, mode="atomic", seed=1)
print(f"atomic fragment: {len(atomic.top)} vertices, checks {check_fragment(atomic)}")
