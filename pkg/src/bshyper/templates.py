"""Collections of relation symbols, good pairs, templates and template extensions."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .numtheory import coarse_bounds, granularity, lower_approximations, solve_diophantine
from .rank import InternalInconsistency, delta, rel_rank
from .structures import FinStructure, sort_ids
from .weights import AlphaSpec, Weight, combination, is_rational


class BTooSmall(ValueError):
    pass


class CoveringInfeasible(ValueError):
    pass


class ModeMismatch(ValueError):
    pass


class BStarInfeasible(ValueError):
    pass


class LCollection(Mapping):
    """A finite multiset of relation symbols, stored as positive counts."""

    __slots__ = ("_c",)

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]] | None = None):
        items = dict(counts or {})
        for k, v in items.items():
            if int(v) < 0:
                raise ValueError(f"negative count for {k}")
        object.__setattr__(self, "_c", {str(k): int(v) for k, v in items.items() if int(v) > 0})

    def __getitem__(self, k):
        return self._c.get(k, 0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __contains__(self, k):
        return k in self._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __eq__(self, other):
        if isinstance(other, LCollection):
            return self._c == other._c
        if isinstance(other, Mapping):
            return self._c == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __repr__(self):
        return "LCollection(" + ", ".join(f"{k}:{v}" for k, v in sorted(self._c.items())) + ")"

    @property
    def size(self) -> int:
        return sum(self._c.values())

    def support(self) -> list[str]:
        return sorted(self._c)

    def __add__(self, other):
        out = dict(self._c)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return LCollection(out)

    def __sub__(self, other):
        out = dict(self._c)
        for k, v in other.items():
            out[k] = out.get(k, 0) - v
            if out[k] < 0:
                raise ValueError("subtraction below zero")
        return LCollection(out)

    def __le__(self, other):
        return all(other[k] >= v for k, v in self._c.items())

    def weight(self, spec: AlphaSpec) -> Weight:
        return combination(spec, self._c)

    def vector(self, spec: AlphaSpec) -> tuple[int, ...]:
        return tuple(self[n] for n in spec.names)

    def to_json(self) -> dict:
        return dict(sorted(self._c.items()))


def w(spec: AlphaSpec, n: int, s: Mapping[str, int]) -> Weight:
    """Weighted sum n - sum alpha(E) s(E)."""
    return Weight(n) - combination(spec, s)


@dataclass(frozen=True)
class Template:
    n: int
    r: tuple[LCollection, ...]
    t: tuple[str, ...]

    def __post_init__(self):
        if len(self.r) != self.n or len(self.t) != self.n - 1:
            raise ValueError("template needs n collections and n-1 chain symbols")

    def total(self) -> LCollection:
        out = LCollection({e: self.t.count(e) for e in set(self.t)})
        for ri in self.r:
            out = out + ri
        return out

    def support(self) -> list[str]:
        return self.total().support()

    def to_json(self) -> dict:
        return {"n": self.n, "r": [ri.to_json() for ri in self.r], "t": list(self.t)}

    @classmethod
    def from_json(cls, obj) -> "Template":
        return cls(int(obj["n"]), tuple(LCollection(x) for x in obj["r"]), tuple(obj["t"]))


@dataclass(frozen=True)
class PairNS:
    n: int
    s: LCollection
    classification: str
    w: Weight

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s.to_json(), "classification": self.classification, "w": self.w.to_json()}


def _check_base(spec: AlphaSpec, B: FinStructure):
    b = coarse_bounds(spec)
    if len(B) < b.m_suff:
        raise BTooSmall(f"|B| = {len(B)} < m_suff = {b.m_suff}")
    return b


def _achievable(spec: AlphaSpec, s: LCollection) -> set[Weight]:
    vals = {Weight(0)}
    for e in s:
        a = spec.alpha(e)
        vals = {v + a * k for v in vals for k in range(s[e] + 1)}
    return vals


def coverable(spec: AlphaSpec, B_size: int, r_total: LCollection, all_total: LCollection) -> bool:
    """Count test for covering: enough unary attachments, or enough wide relations."""
    if r_total.size >= B_size:
        return True
    wide = sum(k for e, k in all_total.items() if spec.arity(e) >= 3)
    return wide >= B_size


def classify_pair(spec: AlphaSpec, B: FinStructure, n: int, s: Mapping[str, int]) -> PairNS:
    """none / acceptable / good for the pair (n, s) over B."""
    _check_base(spec, B)
    s = LCollection(s)
    val = w(spec, n, s)
    dB = delta(spec, B)
    if not dB > 0:
        raise ValueError("base must have positive rank")
    if not s:
        return PairNS(n, s, "none", val)
    gr = granularity(spec, 2, s.support())
    acceptable = (val < 0 and -val <= min(dB, gr) and s.size >= n)
    if not acceptable:
        return PairNS(n, s, "none", val)
    wide = sum(k for e, k in s.items() if spec.arity(e) >= 3)
    size_ok = s.size >= len(B) + n - 1 or wide >= len(B)
    gap_ok = True
    if size_ok:
        for v in _achievable(spec, s):
            m = min(n, math.ceil(v) - 1)
            # an integer m in (v + w, v) with 1 <= m <= n would land inside (w, 0)
            if m >= 1 and Weight(m) - v > val:
                gap_ok = False
                break
    return PairNS(n, s, "good" if size_ok and gap_ok else "acceptable", val)


# -- the greedy template --------------------------------------------------------

def _best_sub(spec: AlphaSpec, pool: LCollection, base: Weight) -> LCollection:
    """Sub-collection u of pool minimising base - weight(u) subject to >= 0.

    Ties go to the lexicographically least count vector in signature order.
    """
    names = [e for e in spec.names if pool[e] > 0]
    best_val = None
    best_vec = None

    def rec(i, acc, vec):
        nonlocal best_val, best_vec
        if i == len(names):
            v = base - acc
            key = tuple(vec)
            if best_val is None or v < best_val or (v == best_val and key < best_vec):
                best_val, best_vec = v, key
            return
        a = spec.alpha(names[i])
        cur = acc
        for k in range(pool[names[i]] + 1):
            if cur > base:
                break
            vec.append(k)
            rec(i + 1, cur, vec)
            vec.pop()
            cur = cur + a

    rec(0, Weight(0), [])
    return LCollection(dict(zip(names, best_vec)))


def greedy_template(spec: AlphaSpec, B: FinStructure, pair: PairNS | tuple) -> tuple[Template, list[Weight]]:
    """Template from an acceptable pair, with the potential ranks Rel(1..n)."""
    if not isinstance(pair, PairNS):
        pair = classify_pair(spec, B, pair[0], pair[1])
    if pair.classification == "none":
        raise ValueError("pair is neither acceptable nor good")
    bounds = _check_base(spec, B)
    n, s = pair.n, pair.s
    if n < 3:
        raise ValueError("templates need n >= 3")
    # chain symbols
    top = max(spec.alpha(e) for e in spec.names)
    forced = None
    for e in spec.names:
        if spec.arity(e) >= 3 and s[e] >= n - 1 >= len(B) and spec.alpha(e) == top:
            forced = e
            break
    residual = s
    t = []
    for _ in range(n - 1):
        if forced is not None:
            e = forced
        else:
            avail = [e for e in spec.names if residual[e] > 0]
            if not avail:
                raise InternalInconsistency("ran out of symbols for the chain")
            e = max(avail, key=lambda x: (spec.alpha(x), -spec.names.index(x)))
        t.append(e)
        residual = residual - {e: 1}
    # unary attachments
    r = []
    rel = []
    one = Weight(1)
    r1 = _best_sub(spec, residual, one)
    r.append(r1)
    cur = one - r1.weight(spec)
    rel.append(cur)
    residual = residual - r1
    for j in range(1, n - 1):
        budget = cur + 1 - spec.alpha(t[j - 1])
        if budget < 0:
            raise InternalInconsistency(f"potential rank would go negative at step {j + 1}")
        if not residual:
            raise InternalInconsistency(f"residual collection empty at step {j + 1}")
        rj = _best_sub(spec, residual, budget)
        r.append(rj)
        cur = budget - rj.weight(spec)
        rel.append(cur)
        residual = residual - rj
    r.append(residual)
    cur = cur + 1 - residual.weight(spec) - spec.alpha(t[n - 2])
    rel.append(cur)
    for j in range(n - 1):
        if not rel[j] < spec.alpha(t[j]):
            raise InternalInconsistency(f"potential rank {rel[j]} reaches alpha at step {j + 1}")
    for ri in r:
        for e, k in ri.items():
            if k >= bounds.m_pt:
                raise InternalInconsistency(f"{k} copies of {e} at one point exceed m_pt")
    if rel[-1] != pair.w:
        raise InternalInconsistency("final potential rank differs from the pair weight")
    return Template(n, tuple(r), tuple(t)), rel


def pair_to_template(spec: AlphaSpec, B: FinStructure, pair: PairNS | tuple) -> Template:
    return greedy_template(spec, B, pair)[0]


def template_rels(spec: AlphaSpec, theta: Template) -> list[Weight]:
    """Rel(j) = sum_{i<=j} w(1, r_i) - sum_{i<j} alpha(E_i), computed arithmetically."""
    out = []
    cur = Weight(0)
    for j in range(theta.n):
        cur = cur + 1 - theta.r[j].weight(spec)
        if j > 0:
            cur = cur - spec.alpha(theta.t[j - 1])
        out.append(cur)
    return out


# -- extension by a template ------------------------------------------------------

def _fresh_prefix(B: FinStructure, n: int, prefix: str) -> str:
    p = prefix
    while any(f"{p}{i}" in B for i in range(1, n + 1)):
        p += "_"
    return p


def new_points(B: FinStructure, n: int, prefix: str = "d") -> list[str]:
    p = _fresh_prefix(B, n, prefix)
    return [f"{p}{i}" for i in range(1, n + 1)]


def extend_by_template(spec: AlphaSpec, B: FinStructure, theta: Template, covering: bool = True,
                       variant_seed: int = 0, prefix: str = "d", steer: str | None = None) -> FinStructure:
    """The extension of B by theta on new points d1..dn.

    Seed 0 takes subsets in lexicographic order of B's sorted vertices; other
    seeds shuffle that order.  With covering, each subset first takes still
    uncovered vertices.  With steer = b, one relation at the last new point
    is made to contain b.
    """
    bounds = _check_base(spec, B)
    for ri in theta.r:
        for e, k in ri.items():
            if k >= bounds.m_pt:
                raise ValueError(f"template uses {k} copies of {e} at one point (m_pt = {bounds.m_pt})")
    if covering and not coverable(spec, len(B), sum(theta.r, LCollection()), theta.total()):
        raise CoveringInfeasible("neither counting hypothesis for covering holds")
    order = sort_ids(B.universe)
    if variant_seed:
        random.Random(variant_seed).shuffle(order)
    rank_of = {v: i for i, v in enumerate(order)}
    d = new_points(B, theta.n, prefix)
    uncovered = list(order) if covering else []
    rels: dict[str, list[tuple[str, ...]]] = {k: list(v) for k, v in B.relations.items()}

    def pick(k: int, used: set, must: str | None = None) -> tuple[str, ...]:
        if k == 0:
            return ()
        head = [must] if must is not None else []
        pool_first = [v for v in uncovered if v not in head]
        cand = head + pool_first[: k - len(head)]
        if len(cand) < k:
            cand += [v for v in order if v not in cand][: k - len(cand)]
        c = tuple(sorted(cand, key=rank_of.__getitem__))
        if c not in used and len(c) == k:
            return c
        for combo in combinations(order, k):
            if must is not None and must not in combo:
                continue
            if combo not in used:
                return combo
        raise ValueError("ran out of distinct subsets of the base")

    def mark(Q):
        for v in Q:
            if v in uncovered:
                uncovered.remove(v)

    steered = steer is None
    if steer is not None and steer not in B:
        raise BStarInfeasible(f"{steer} is not in the base")
    # unary attachments {d_i} u Q
    for i in range(theta.n):
        for e in spec.names:
            k = theta.r[i][e]
            used: set = set()
            for _ in range(k):
                must = None
                if not steered and i == theta.n - 1:
                    must = steer
                    steered = True
                Q = pick(spec.arity(e) - 1, used, must)
                used.add(Q)
                mark(Q)
                rels.setdefault(e, []).append((d[i],) + Q)
    # chain relations {d_i, d_{i+1}} u Q
    for i in range(theta.n - 1):
        e = theta.t[i]
        k = spec.arity(e) - 2
        must = None
        if not steered and i == theta.n - 2 and k >= 1:
            must = steer
            steered = True
        Q = pick(k, set(), must)
        mark(Q)
        rels.setdefault(e, []).append((d[i], d[i + 1]) + Q)
    if not steered:
        raise BStarInfeasible("no relation at the last new point can contain the steered vertex")
    if covering and uncovered:
        raise CoveringInfeasible(f"vertices left uncovered: {uncovered}")
    return FinStructure(list(B.universe) + d, rels)


def covers(D: FinStructure, B: Iterable[str]) -> bool:
    """Every vertex of B shares a relation with some vertex outside B."""
    B = set(B)
    hit = set()
    for ts in D.relations.values():
        for t in ts:
            if not B.issuperset(t):
                hit.update(x for x in t if x in B)
    return hit == B


def template_class(spec: AlphaSpec, B: FinStructure, theta: Template) -> str:
    """none / acceptable / good, from the prefix extensions D^j of the built D."""
    bounds = _check_base(spec, B)
    dB = delta(spec, B)
    if not dB > 0:
        raise ValueError("base must have positive rank")
    if theta.n < 3 or any(k >= bounds.m_pt for ri in theta.r for k in ri.values()):
        return "none"
    D = extend_by_template(spec, B, theta, covering=False)
    newp = [v for v in D.universe if v not in B]
    base = list(B.universe)
    pre = [rel_rank(spec, D, base + newp[:j], base) for j in range(1, theta.n + 1)]
    dD = pre[-1]
    gr = granularity(spec, 2, theta.support())
    if not (dD < 0 and -dD <= min(dB, gr)):
        return "none"
    for j in range(theta.n - 1):
        if pre[j] < 0 or not spec.alpha(theta.t[j]) - pre[j] > 0:
            return "none"
    good = all(spec.alpha(theta.t[j]) - pre[j] + dD >= 0 for j in range(theta.n - 1))
    good = good and coverable(spec, len(B), sum(theta.r, LCollection()), theta.total())
    return "good" if good else "acceptable"


# -- streams of good pairs ---------------------------------------------------------

def gen_good_pairs(spec: AlphaSpec, B: FinStructure, mode: str = "auto", min_n: int = 3,
                   epsilon=None, symbol: str | None = None) -> Iterator[PairNS]:
    """Good pairs over B in increasing n.

    mode "irrational": single-symbol pairs (n, l*E) with n/l a lower
    approximation of alpha(E) from its continued fraction and 0 < -w < epsilon.
    mode "rational": -w = 1/c from the Diophantine stream over the symbols of
    weight below 1.  mode "unit_c": every weight is 1; s = (n+1)*E for a
    symbol of arity at least 3, so -w = 1.
    """
    _check_base(spec, B)
    rat, c = is_rational(spec)
    if mode == "auto":
        mode = "irrational" if not rat else ("unit_c" if c == 1 else "rational")
    n0 = max(3, min_n)
    if mode == "irrational":
        if symbol is None:
            irr = [e for e in spec.names if not spec.alpha(e).is_rational]
            if not irr:
                raise ModeMismatch("no irrational weight in the signature")
            symbol = irr[0]
        a = spec.alpha(symbol)
        if a.is_rational:
            raise ModeMismatch(f"weight of {symbol} is rational")
        cap = min(delta(spec, B), granularity(spec, 2, [symbol]))
        eps = Weight.from_json(epsilon) if epsilon is not None else cap
        wide = spec.arity(symbol) >= 3
        for p, q in lower_approximations(a):
            gap = a * q - p
            if not (gap < eps and gap <= cap) or p < n0:
                continue
            if not (q >= len(B) + p - 1 or (wide and q >= len(B))):
                continue
            pr = classify_pair(spec, B, p, {symbol: q})
            if pr.classification == "good":
                yield pr
    elif mode == "rational":
        if not rat:
            raise ModeMismatch("rational mode needs rational weights")
        light = [e for e in spec.names if spec.alpha(e) < 1]
        if not light:
            raise ModeMismatch("every weight is 1; use unit_c mode")
        from fractions import Fraction
        for n, m in solve_diophantine(spec, Fraction(-1, c), min_n=n0, symbols=light):
            if sum(m.values()) < len(B) + n - 1:
                continue
            pr = classify_pair(spec, B, n, m)
            if pr.classification == "good":
                yield pr
    elif mode == "unit_c":
        if not rat or c != 1:
            raise ModeMismatch("unit_c mode needs every weight equal to 1")
        wide = [e for e in spec.names if spec.arity(e) >= 3]
        if not wide:
            raise ModeMismatch("unit_c mode needs a symbol of arity >= 3")
        e = wide[0]
        n = max(n0, len(B) - 1)
        while True:
            pr = classify_pair(spec, B, n, {e: n + 1})
            if pr.classification == "good":
                yield pr
            n += 1
    else:
        raise ModeMismatch(f"unknown mode {mode!r}")
