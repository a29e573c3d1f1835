"""Brute-force reference implementations used as test oracles.

Everything here works from the JSON form of a structure and plain
itertools enumeration, so it shares no code path with the library's
subset scans, elimination or min-cut routes.
"""

from __future__ import annotations

import json
import random
from itertools import combinations, permutations

from bshyper.structures import FinStructure
from bshyper.weights import AlphaSpec, Weight

HALF = AlphaSpec.of({"E": "1/2"})
TWO = AlphaSpec.of({"E": "2/3", "F": "1/2"})
PAIR = AlphaSpec.of({"E": "sqrt(2)/2", "F": "1-sqrt(2)/2"})
SURD = AlphaSpec.of({"E": "sqrt(2)/2"})
TERNARY = AlphaSpec.of({"E": ("1/2", 2), "T": ("2/3", 3)})

RANK_SPECS = [HALF, TWO, PAIR]


def rel_list(S: FinStructure):
    js = S.to_json()
    return [(sym, frozenset(t)) for sym, ts in js["relations"].items() for t in ts]


def naive_delta(spec: AlphaSpec, S: FinStructure, X=None, rels=None) -> Weight:
    X = set(S.universe if X is None else X)
    total = Weight(len(X))
    for sym, t in rel_list(S) if rels is None else rels:
        if t <= X:
            total = total - spec.alpha(sym)
    return total


def subsets(xs):
    xs = list(xs)
    for k in range(len(xs) + 1):
        for c in combinations(xs, k):
            yield frozenset(c)


def naive_in_kalpha(spec, S) -> bool:
    rels = rel_list(S)
    return all(naive_delta(spec, S, X, rels) >= 0 for X in subsets(S.universe))


def naive_strong(spec, S, A) -> bool:
    A = frozenset(A)
    dA = naive_delta(spec, S, A)
    rest = [v for v in S.universe if v not in A]
    return all(naive_delta(spec, S, A | Y) >= dA for Y in subsets(rest))


def naive_minimal_pair(spec, S, A) -> bool:
    A = frozenset(A)
    full = frozenset(S.universe)
    if A == full or not naive_delta(spec, S) < naive_delta(spec, S, A):
        return False
    dA = naive_delta(spec, S, A)
    rest = [v for v in S.universe if v not in A]
    for Y in subsets(rest):
        C = A | Y
        if C != full and naive_delta(spec, S, C) < dA:
            return False
    return True


def naive_essential(spec, S, B) -> bool:
    B = frozenset(B)
    SB = induced_naive(S, B)
    if not naive_delta(spec, SB) > 0 or not naive_in_kalpha(spec, SB) or not naive_in_kalpha(spec, S):
        return False
    if not naive_minimal_pair(spec, S, B):
        return False
    full = frozenset(S.universe)
    for X in subsets(S.universe):
        if X != full and naive_delta(spec, S, X) - naive_delta(spec, S, X & B) < 0:
            return False
    return True


def naive_icl(spec, S, X) -> frozenset:
    """Intersection of all strong supersets of X."""
    X = frozenset(X)
    out = frozenset(S.universe)
    rest = [v for v in S.universe if v not in X]
    for Y in subsets(rest):
        if naive_strong(spec, S, X | Y):
            out &= X | Y
    return out


def naive_zero_set(spec, S) -> frozenset:
    out = frozenset()
    for X in subsets(S.universe):
        if naive_delta(spec, S, X) == 0:
            out |= X
    return out


def induced_naive(S: FinStructure, X) -> FinStructure:
    X = set(X)
    rels = {}
    for sym, t in rel_list(S):
        if t <= X:
            rels.setdefault(sym, []).append(tuple(sorted(t)))
    return FinStructure([v for v in S.universe if v in X], rels)


def naive_embeds(B: FinStructure, M: FinStructure, partial=None) -> bool:
    """Is there an injective map B -> M preserving relations and non-relations over partial?"""
    partial = dict(partial or {})
    free = [v for v in B.universe if v not in partial]
    targets = [v for v in M.universe if v not in partial.values()]
    mrels = {(sym, t) for sym, t in rel_list(M)}
    brels = {(sym, t) for sym, t in rel_list(B)}
    syms = {sym for sym, _ in brels | mrels}
    for img in permutations(targets, len(free)):
        f = dict(partial)
        f.update(zip(free, img))
        image = set(f.values())
        mapped = {(sym, frozenset(f[x] for x in t)) for sym, t in brels}
        inside = {(sym, t) for sym, t in mrels if t <= image and sym in syms}
        if mapped == inside:
            return True
    return False


def random_structure(spec: AlphaSpec, n: int, rng: random.Random, p: float | None = None,
                     prefix: str = "x") -> FinStructure:
    V = [f"{prefix}{i}" for i in range(n)]
    p = rng.choice((0.1, 0.25, 0.4, 0.6)) if p is None else p
    rels = {e: [t for t in combinations(V, spec.arity(e)) if rng.random() < p] for e in spec.names}
    return FinStructure(V, rels)


def random_kalpha(spec: AlphaSpec, n: int, rng: random.Random, tries: int = 100) -> FinStructure:
    for _ in range(tries):
        S = random_structure(spec, n, rng)
        if naive_in_kalpha(spec, S):
            return S
    return FinStructure([f"x{i}" for i in range(n)])


def mutate_certificate(cert, rng, count):
    """Copies of the certificate JSON, each with one relation removed or one E-edge added."""
    js = cert.to_json()
    res = js["result"]
    V = res["universe"]
    out = []
    for _ in range(count):
        m = json.loads(json.dumps(js))
        rels = m["result"]["relations"]
        present = [(s, tuple(t)) for s, ts in rels.items() for t in ts]
        if rng.random() < 0.5 and present:
            s, t = rng.choice(present)
            rels[s].remove(list(t))
        else:
            while True:
                t = sorted(rng.sample(V, 2))
                if ("E", tuple(t)) not in present:
                    rels.setdefault("E", []).append(t)
                    break
        out.append(m)
    return out
