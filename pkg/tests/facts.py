"""Exact rank identities checked on random structures (shared by unit and acceptance tests)."""

import random

from bshyper.rank import delta, is_strong
from bshyper.structures import FinStructure, free_join, induced
from bshyper.weights import Weight
from oracles import naive_in_kalpha, random_structure, rel_list


def e3(spec, S, X, Y, Z):
    """Weighted count of relations inside X u Y u Z meeting both X and Z."""
    inside = X | Y | Z
    total = Weight(0)
    for sym, t in rel_list(S):
        if t <= inside and t & X and t & Z:
            total = total + spec.alpha(sym)
    return total


def rel(spec, S, B, A):
    return delta(spec, S, A | B) - delta(spec, S, A)


def _pick(S, rng, p=0.5):
    return frozenset(v for v in S.universe if rng.random() < p)


def check_structure(spec, S: FinStructure, rng: random.Random) -> list[str]:
    """Run every identity on random subsets of S; return descriptions of failures."""
    bad = []
    A, B, C = _pick(S, rng), _pick(S, rng), _pick(S, rng)
    AB = A | B
    # (1) decomposition of relative rank
    lhs = rel(spec, S, B, A)
    rhs = delta(spec, S, B) - delta(spec, S, A & B) - e3(spec, S, A - B, A & B, B - A)
    if lhs != rhs:
        bad.append("decomposition")
    kal = naive_in_kalpha(spec, S)
    if kal and not lhs <= delta(spec, S, B) - e3(spec, S, A - B, A & B, B - A):
        bad.append("decomposition bound")
    if not A & B and lhs != delta(spec, S, B) - e3(spec, S, A, frozenset(), B):
        bad.append("disjoint decomposition")
    # (2) shrinking the base to its trace
    A1 = A & B
    if not rel(spec, S, B, A1) >= lhs or lhs != rel(spec, S, AB, A):
        bad.append("trace monotonicity")
    for sym, t in rel_list(S):
        if t <= AB and not t <= A and not t <= B:
            if not lhs + spec.alpha(sym) <= rel(spec, S, B, A1):
                bad.append("trace gap")
            break
    # (3) subadditivity over a strong base
    B3, C3 = B - A, C - A
    if is_strong(spec, induced(S, A | B3), A) and is_strong(spec, induced(S, A | C3), A):
        if not rel(spec, S, B3 | C3, A) <= rel(spec, S, B3, A) + rel(spec, S, C3, A):
            bad.append("subadditivity")
    # (5) chain rule
    parts = [_pick(S, rng, 0.3) for _ in range(rng.randint(1, 4))]
    total = rel(spec, S, parts[0], A)
    acc = A | parts[0]
    for P in parts[1:]:
        total = total + rel(spec, S, P, acc)
        acc = acc | P
    if total != delta(spec, S, acc) - delta(spec, S, A):
        bad.append("chain rule")
    return bad


def check_free_join(spec, rng: random.Random) -> list[str]:
    """(4) rank of a free join over A is the sum of the parts' relative ranks."""
    bad = []
    A = random_structure(spec, rng.randint(0, 3), rng, prefix="a")
    parts = []
    for i in range(rng.randint(1, 3)):
        P = random_structure(spec, len(A) + rng.randint(0, 3), rng, prefix=f"t{i}_")
        names = dict(zip(P.universe[:len(A)], A.universe))
        rels = {}
        for sym, t in rel_list(P):
            tt = tuple(names.get(x, x) for x in sorted(t))
            if set(tt) <= set(A.universe):
                continue
            rels.setdefault(sym, []).append(tt)
        for sym, t in rel_list(A):
            rels.setdefault(sym, []).append(tuple(sorted(t)))
        uni = list(A.universe) + [v for v in P.universe if v not in names]
        parts.append(FinStructure(uni, rels))
    Z = free_join(parts, A.universe)
    base = frozenset(A.universe)
    want = Weight(0)
    for P in parts:
        want = want + rel(spec, P, frozenset(P.universe), base)
    if rel(spec, Z, frozenset(Z.universe), base) != want:
        bad.append("free join sum")
    if all(is_strong(spec, P, base) for P in parts) and not is_strong(spec, Z, base):
        bad.append("free join strong")
    return bad
