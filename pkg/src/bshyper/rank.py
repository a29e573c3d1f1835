"""Predimension, strong substructures, minimal pairs and closures.

Every predicate here reduces to minimising an objective of the form

    sum over v in X of u(v)  -  sum over relations e inside X of w(e)

over vertex sets X between a forced-in and a forced-out set.  Two exact
routes are provided: an exhaustive scan over all subsets (numpy, with a
sum-over-subsets transform), and min-sum variable elimination for larger
sparse structures.  Values are kept as integer pairs (P, Q) standing for
(P + Q sqrt d) / L, so every comparison is exact.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from .structures import FinStructure, UnknownVertex, SignatureMismatch, induced, sort_ids
from .weights import AlphaSpec, Weight, surd_sign

__all__ = [
    "TooLarge", "NotInKalpha", "InternalInconsistency", "SignatureMismatch", "UnknownVertex",
    "RankReport", "delta", "rel_rank", "edge_interaction", "in_kalpha", "is_strong",
    "is_minimal_pair", "is_essential_minimal_pair", "icl", "icl_by_pairs", "zero_set",
    "is_closed", "min_rank", "min_rank_limited", "delta_table", "default_cap",
]


class TooLarge(ValueError):
    pass


class NotInKalpha(ValueError):
    pass


class InternalInconsistency(AssertionError):
    pass


def default_cap() -> int:
    return int(os.environ.get("BSHYPER_CAP", "24"))


EXHAUSTIVE_LIMIT = 20     # above this many free vertices "auto" switches to elimination
WIDTH_LIMIT = 20          # largest factor scope elimination will build


@dataclass(frozen=True)
class RankReport:
    holds: bool
    value: Weight | None = None
    witness: frozenset | None = None
    note: str = ""

    def __bool__(self):
        return self.holds


# -- plain rank arithmetic ----------------------------------------------------

def _vset(S: FinStructure, X) -> frozenset[str]:
    if X is None:
        return S.vertex_set
    if isinstance(X, FinStructure):
        X = X.universe
    X = frozenset(X)
    for v in X:
        if v not in S:
            raise UnknownVertex(v)
    return X


def delta(spec: AlphaSpec, S: FinStructure, X=None) -> Weight:
    """|X| minus the weighted number of relations inside X."""
    S.check(spec)
    X = _vset(S, X)
    total = Weight(len(X))
    for sym, ts in S.relations.items():
        k = sum(1 for t in ts if X.issuperset(t))
        if k:
            total = total - spec.alpha(sym) * k
    return total


def rel_rank(spec: AlphaSpec, S: FinStructure, B, A) -> Weight:
    """delta(B / A) = delta(A u B) - delta(A), both sets inside S."""
    A = _vset(S, A)
    B = _vset(S, B)
    return delta(spec, S, A | B) - delta(spec, S, A)


def edge_interaction(spec: AlphaSpec, S: FinStructure, A, B, C=None) -> Weight:
    """Weighted count of relations inside the union that meet both outer sets.

    With two arguments: relations inside A u B meeting A and B.  With three:
    relations inside A u B u C meeting A and C.
    """
    A = _vset(S, A)
    B = _vset(S, B)
    if C is None:
        inside, left, right = A | B, A, B
    else:
        C = _vset(S, C)
        inside, left, right = A | B | C, A, C
    total = Weight(0)
    for sym, ts in S.relations.items():
        k = sum(1 for t in ts if inside.issuperset(t) and not left.isdisjoint(t) and not right.isdisjoint(t))
        if k:
            total = total + spec.alpha(sym) * k
    return total


# -- objectives ---------------------------------------------------------------

class _Objective:
    """u(v) = 1 except on `base` (0); relations inside base are dropped.

    With base empty this is delta(X); with a base B it is delta(X) - delta(X n B).
    tie adds tie*|X| as a secondary key (+1 prefers small sets, -1 large).
    """

    def __init__(self, spec: AlphaSpec, S: FinStructure, base: Iterable[int] = (), tie: int = 0):
        S.check(spec)
        L, coeff = spec.scaled()
        self.L, self.d, self.n, self.tie = L, spec.d, len(S), tie
        base = set(base)
        self.unary = [0 if i in base else L for i in range(self.n)]
        merged: dict[tuple[int, ...], list[int]] = {}
        for sym, t in S.edges():
            if base.issuperset(t):
                continue
            p, q = coeff[sym]
            acc = merged.setdefault(t, [0, 0])
            acc[0] -= p
            acc[1] -= q
        self.terms = [(t, pq[0], pq[1]) for t, pq in merged.items()]

    def weight(self, p: int, q: int) -> Weight:
        return Weight(Fraction(p, self.L), Fraction(q, self.L), self.d) if q else Weight(Fraction(p, self.L))


def _ssign(p: int, q: int, d: int) -> int:
    if q == 0 or d == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if (p > 0) == (q > 0):
        return 1 if p > 0 else -1
    return (1 if p > 0 else -1) if p * p > q * q * d else (1 if q > 0 else -1)


def _lex_less(a, b, d: int):
    """Elementwise a < b for triples of arrays (P, Q, T)."""
    s = surd_sign(a[0] - b[0], a[1] - b[1], d)
    return (s < 0) | ((s == 0) & (a[2] < b[2]))


def _argmin(P, Q, T, d: int, valid=None) -> int:
    idx = np.arange(P.size) if valid is None else np.flatnonzero(valid)
    if idx.size == 0:
        return -1
    p, q = P[idx], Q[idx]
    if d == 0 or not q.any():
        m = p.min()
        sel = idx[p == m]
        return int(sel[np.argmin(T[sel])])
    f = p.astype(np.float64) + q.astype(np.float64) * math.sqrt(d)
    m = f.min()
    near = f <= m + 1e-6 * (1.0 + abs(m))
    cand = idx[near]
    pairs = sorted({(int(P[i]), int(Q[i])) for i in cand})
    best = pairs[0]
    for pr in pairs[1:]:
        if _ssign(pr[0] - best[0], pr[1] - best[1], d) < 0:
            best = pr
    sel = cand[(P[cand] == best[0]) & (Q[cand] == best[1])]
    return int(sel[np.argmin(T[sel])])


# -- exhaustive route ---------------------------------------------------------

def _zeta(h: np.ndarray, k: int) -> None:
    """In place: h[m] <- sum of h[s] over submasks s of m."""
    for i in range(k):
        v = h.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]


def _tables(obj: _Objective, free: list[int], fixed_in: set[int], forced_out: set[int]):
    """Yield (offset, P, Q, T) blocks covering all subsets of `free` (bit i = free[i])."""
    k = len(free)
    pos = {v: i for i, v in enumerate(free)}
    p0 = sum(obj.unary[v] for v in fixed_in)
    q0 = 0
    terms = []
    for t, p, q in obj.terms:
        if not forced_out.isdisjoint(t):
            continue
        m = 0
        ok = True
        for v in t:
            if v in pos:
                m |= 1 << pos[v]
            elif v not in fixed_in:
                ok = False
                break
        if not ok:
            continue
        if m == 0:
            p0 += p
            q0 += q
        else:
            terms.append((m, p, q))
    low = min(k, EXHAUSTIVE_LIMIT)
    hi = k - low
    size = 1 << low
    masks = np.arange(size, dtype=np.int64)
    bits = [(masks >> i) & 1 for i in range(low)]
    pop_low = np.zeros(size, dtype=np.int64)
    un_low = np.zeros(size, dtype=np.int64)
    for i in range(low):
        pop_low += bits[i]
        un_low += obj.unary[free[i]] * bits[i]
    lowmask = size - 1
    for h in range(1 << hi):
        hp = sum(obj.unary[free[low + j]] for j in range(hi) if h >> j & 1)
        hq = bin(h).count("1")
        hP = np.zeros(size, dtype=np.int64)
        hQ = np.zeros(size, dtype=np.int64)
        for m, p, q in terms:
            if (m >> low) & ~h:
                continue
            hP[m & lowmask] += p
            hQ[m & lowmask] += q
        _zeta(hP, low)
        _zeta(hQ, low)
        P = hP + un_low + (p0 + hp)
        Q = hQ + q0
        T = obj.tie * (pop_low + hq + len(fixed_in))
        yield h << low, P, Q, T


def _exhaustive(obj: _Objective, forced_in: set[int], forced_out: set[int], exclude_full: bool, cap: int):
    free = [v for v in range(obj.n) if v not in forced_in and v not in forced_out]
    if len(free) > cap:
        raise TooLarge(f"{len(free)} free vertices exceed the scan cap {cap}")
    best = None
    full = (1 << len(free)) - 1
    for off, P, Q, T in _tables(obj, free, forced_in, forced_out):
        valid = None
        if exclude_full and not forced_out and off <= full < off + P.size:
            valid = np.ones(P.size, dtype=bool)
            valid[full - off] = False
        i = _argmin(P, Q, T, obj.d, valid)
        if i < 0:
            continue
        cand = (int(P[i]), int(Q[i]), int(T[i]), off + i)
        if best is None or _better(cand, best, obj.d):
            best = cand
    if best is None:
        return None
    chosen = set(forced_in) | {free[j] for j in range(len(free)) if best[3] >> j & 1}
    return best[0], best[1], best[2], chosen


def _better(a, b, d) -> bool:
    s = _ssign(a[0] - b[0], a[1] - b[1], d)
    return s < 0 or (s == 0 and a[2] < b[2])


# -- elimination route --------------------------------------------------------

class _Factor:
    __slots__ = ("scope", "P", "Q", "T")

    def __init__(self, scope, P, Q, T):
        self.scope, self.P, self.Q, self.T = scope, P, Q, T


def _eliminate(obj: _Objective, forced_in: set[int], forced_out: set[int], width: int = WIDTH_LIMIT):
    free = [v for v in range(obj.n) if v not in forced_in and v not in forced_out]
    fset = set(free)
    p0 = sum(obj.unary[v] for v in forced_in)
    q0 = 0
    t0 = obj.tie * len(forced_in)
    by_scope: dict[tuple[int, ...], list[int]] = {}
    for v in free:
        by_scope[(v,)] = [0, 0]
    for t, p, q in obj.terms:
        if not forced_out.isdisjoint(t):
            continue
        sc = tuple(sorted(v for v in t if v in fset))
        if not sc:
            p0 += p
            q0 += q
            continue
        acc = by_scope.setdefault(sc, [0, 0])
        acc[0] += p
        acc[1] += q
    factors: list[_Factor] = []
    for sc, (p, q) in by_scope.items():
        shape = (2,) * len(sc)
        P = np.zeros(shape, dtype=np.int64)
        Q = np.zeros(shape, dtype=np.int64)
        T = np.zeros(shape, dtype=np.int64)
        top = (1,) * len(sc)
        P[top] = p
        Q[top] = q
        if len(sc) == 1:
            P[1] += obj.unary[sc[0]]
            T[1] = obj.tie
        factors.append(_Factor(sc, P, Q, T))

    # interaction graph and a greedy min-degree order computed on the fly
    adj: dict[int, set[int]] = {v: set() for v in free}
    holders: dict[int, set[int]] = {v: set() for v in free}
    for k, f in enumerate(factors):
        for v in f.scope:
            holders[v].add(k)
            adj[v].update(f.scope)
    for v in free:
        adj[v].discard(v)
    alive = {k: f for k, f in enumerate(factors)}
    next_id = len(factors)
    trace = []
    remaining = set(free)
    while remaining:
        x = min(remaining, key=lambda v: (len(adj[v]), v))
        scope = tuple(sorted(adj[x] | {x}))
        if len(scope) > width:
            raise TooLarge(f"elimination needs a factor over {len(scope)} vertices (limit {width})")
        shape = (2,) * len(scope)
        P = np.zeros(shape, dtype=np.int64)
        Q = np.zeros(shape, dtype=np.int64)
        T = np.zeros(shape, dtype=np.int64)
        for k in sorted(holders[x]):
            f = alive.pop(k)
            rs = [2 if v in f.scope else 1 for v in scope]
            P = P + f.P.reshape(rs)
            Q = Q + f.Q.reshape(rs)
            T = T + f.T.reshape(rs)
            for v in f.scope:
                if v != x:
                    holders[v].discard(k)
        ax = scope.index(x)
        a = (np.take(P, 0, ax), np.take(Q, 0, ax), np.take(T, 0, ax))
        b = (np.take(P, 1, ax), np.take(Q, 1, ax), np.take(T, 1, ax))
        pick = _lex_less(b, a, obj.d)
        newP = np.where(pick, b[0], a[0])
        newQ = np.where(pick, b[1], a[1])
        newT = np.where(pick, b[2], a[2])
        rest = tuple(v for v in scope if v != x)
        trace.append((x, rest, np.asarray(pick)))
        remaining.discard(x)
        for v in rest:
            adj[v].discard(x)
            adj[v].update(w for w in rest if w != v)
        del adj[x]
        alive[next_id] = _Factor(rest, np.asarray(newP), np.asarray(newQ), np.asarray(newT))
        for v in rest:
            holders[v].add(next_id)
        next_id += 1
    P, Q, T = p0, q0, t0
    for f in alive.values():
        P += int(f.P)
        Q += int(f.Q)
        T += int(f.T)
    val: dict[int, int] = {}
    for x, rest, pick in reversed(trace):
        val[x] = int(pick[tuple(val[v] for v in rest)]) if rest else int(pick)
    chosen = set(forced_in) | {v for v, b in val.items() if b}
    return P, Q, T, chosen


# -- min-cut route --------------------------------------------------------------
#
# Minimising sum u(v) - sum w(e)[e inside X] is a selection problem: a source
# edge of capacity w(e) to each relation node, infinite edges from a relation
# to its vertices, and an edge of capacity u(v) from each vertex to the sink.
# Capacities are exact pairs (p, q) for (p + q sqrt d) / L.

_INF = 1 << 62


class _Net:
    def __init__(self, n: int, d: int):
        self.d = d
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cp: list[int] = []
        self.cq: list[int] = []

    def add(self, u: int, v: int, p: int, q: int = 0):
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cp.append(p)
        self.cq.append(q)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cp.append(0)
        self.cq.append(0)

    def _pos(self, e: int) -> bool:
        return _ssign(self.cp[e], self.cq[e], self.d) > 0

    def maxflow(self, s: int, t: int) -> None:
        n = len(self.adj)
        while True:
            level = [-1] * n
            level[s] = 0
            queue = [s]
            for u in queue:
                for e in self.adj[u]:
                    v = self.to[e]
                    if level[v] < 0 and self._pos(e):
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return
            it = [0] * n
            while self._augment(s, t, level, it):
                pass

    def _augment(self, s: int, t: int, level, it) -> bool:
        """One augmenting path in the level graph (iterative DFS)."""
        path: list[int] = []
        u = s
        while u != t:
            adj = self.adj[u]
            while it[u] < len(adj):
                e = adj[it[u]]
                v = self.to[e]
                if level[v] == level[u] + 1 and self._pos(e):
                    break
                it[u] += 1
            else:
                if u == s:
                    return False
                level[u] = -1          # dead end
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1
                continue
            path.append(e)
            u = self.to[e]
        bp, bq = self.cp[path[0]], self.cq[path[0]]
        for e in path[1:]:
            if _ssign(self.cp[e] - bp, self.cq[e] - bq, self.d) < 0:
                bp, bq = self.cp[e], self.cq[e]
        for e in path:
            self.cp[e] -= bp
            self.cq[e] -= bq
            self.cp[e ^ 1] += bp
            self.cq[e ^ 1] += bq
        return True

    def reach_from(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.adj[u]:
                v = self.to[e]
                if v not in seen and self._pos(e):
                    seen.add(v)
                    stack.append(v)
        return seen

    def reach_to(self, t: int) -> set[int]:
        seen = {t}
        stack = [t]
        while stack:
            v = stack.pop()
            for e in self.adj[v]:
                u = self.to[e]
                # residual u -> v lives on the reverse of e
                if u not in seen and self._pos(e ^ 1):
                    seen.add(u)
                    stack.append(u)
        return seen


def _mincut(obj: _Objective, forced_in: set[int], forced_out: set[int]):
    n = obj.n
    terms = [(t, p, q) for t, p, q in obj.terms if forced_out.isdisjoint(t)]
    S, T = n + len(terms), n + len(terms) + 1
    net = _Net(n + len(terms) + 2, obj.d)
    for v in range(n):
        if v in forced_in:
            net.add(S, v, _INF)
        if v in forced_out:
            net.add(v, T, _INF)
        elif obj.unary[v]:
            net.add(v, T, obj.unary[v])
    for k, (t, p, q) in enumerate(terms):
        node = n + k
        net.add(S, node, -p, -q)
        for v in t:
            net.add(node, v, _INF)
    net.maxflow(S, T)
    if obj.tie >= 0:
        side = net.reach_from(S)
        chosen = {v for v in range(n) if v in side}
    else:
        sink_side = net.reach_to(T)
        chosen = {v for v in range(n) if v not in sink_side}
    chosen |= forced_in
    P = sum(obj.unary[v] for v in chosen)
    Q = 0
    for t, p, q in obj.terms:
        if chosen.issuperset(t):
            P += p
            Q += q
    return P, Q, obj.tie * len(chosen), chosen


# -- dispatch -----------------------------------------------------------------

def _solve(obj: _Objective, forced_in=(), forced_out=(), exclude_full: bool = False,
           method: str = "auto", cap: int | None = None):
    """Exact lexicographic minimum of (objective, tie) and a minimising set of indices."""
    forced_in = set(forced_in)
    forced_out = set(forced_out)
    cap = default_cap() if cap is None else cap
    nfree = obj.n - len(forced_in | forced_out)
    if method == "auto":
        method = "exhaustive" if nfree <= min(cap, EXHAUSTIVE_LIMIT) else "mincut"
    if method == "exhaustive":
        return _exhaustive(obj, forced_in, forced_out, exclude_full, cap)
    if method == "mincut":
        run = _mincut
    elif method == "eliminate":
        run = _eliminate
    else:
        raise ValueError(f"unknown method {method!r}")
    if not exclude_full:
        return run(obj, forced_in, forced_out)
    best = None
    free = [v for v in range(obj.n) if v not in forced_in and v not in forced_out]
    if forced_out:
        # every candidate already misses a forced-out vertex
        return run(obj, forced_in, forced_out)
    if not free:
        return None
    for v in free:
        r = run(obj, forced_in, forced_out | {v})
        if best is None or _better(r, best, obj.d):
            best = r
    return best


def _ids(S: FinStructure, X) -> set[int]:
    return {S.index(v) for v in X}


def _names(S: FinStructure, idx) -> frozenset[str]:
    return frozenset(S.universe[i] for i in idx)


def min_rank(spec: AlphaSpec, S: FinStructure, forced_in=(), forced_out=(), base=(), tie: int = 0,
             exclude_full: bool = False, method: str = "auto", cap: int | None = None):
    """Least delta(X) (or delta(X) - delta(X n base)) over forced_in <= X <= S - forced_out.

    Returns (value, minimiser) or None when the range is empty.
    """
    obj = _Objective(spec, S, _ids(S, base), tie)
    r = _solve(obj, _ids(S, forced_in), _ids(S, forced_out), exclude_full, method, cap)
    if r is None:
        return None
    return obj.weight(r[0], r[1]), _names(S, r[3])


# -- cardinality-limited minimum -------------------------------------------------

class _CFactor:
    """Factor with an optional trailing count axis (number of chosen vertices)."""
    __slots__ = ("scope", "P", "Q", "T", "V", "counted")

    def __init__(self, scope, P, Q, T, V, counted):
        self.scope, self.P, self.Q, self.T, self.V, self.counted = scope, P, Q, T, V, counted


def _lexmin_into(dst, src, d):
    """dst <- elementwise lexicographic min of dst and src over valid entries."""
    P, Q, T, V = dst
    p, q, t, v = src
    s = surd_sign(p - P, q - Q, d)
    better = v & (~V | (s < 0) | ((s == 0) & (t < T)))
    return (np.where(better, p, P), np.where(better, q, Q), np.where(better, t, T), V | v)


def _eliminate_counted(obj: _Objective, forced_in: set[int], limit: int):
    """Least objective over X >= forced_in with |X - forced_in| <= limit (value only)."""
    free = [v for v in range(obj.n) if v not in forced_in]
    fset = set(free)
    K = limit + 1
    p0 = sum(obj.unary[v] for v in forced_in)
    q0 = 0
    by_scope: dict[tuple[int, ...], list[int]] = {}
    for t, p, q in obj.terms:
        sc = tuple(sorted(v for v in t if v in fset))
        if not sc:
            p0 += p
            q0 += q
            continue
        acc = by_scope.setdefault(sc, [0, 0])
        acc[0] += p
        acc[1] += q
    factors = []
    for sc, (p, q) in by_scope.items():
        shape = (2,) * len(sc)
        P = np.zeros(shape, dtype=np.int64)
        Q = np.zeros(shape, dtype=np.int64)
        P[(1,) * len(sc)] = p
        Q[(1,) * len(sc)] = q
        factors.append(_CFactor(sc, P, Q, np.zeros(shape, dtype=np.int64), np.ones(shape, dtype=bool), False))
    for v in free:
        P = np.zeros((2, K), dtype=np.int64)
        Q = np.zeros((2, K), dtype=np.int64)
        T = np.zeros((2, K), dtype=np.int64)
        V = np.zeros((2, K), dtype=bool)
        P[1, :] = obj.unary[v]
        T[1, :] = obj.tie
        V[0, 0] = True
        if K > 1:
            V[1, 1] = True
        factors.append(_CFactor((v,), P, Q, T, V, True))
    adj: dict[int, set[int]] = {v: set() for v in free}
    for f in factors:
        for v in f.scope:
            adj[v].update(f.scope)
    for v in free:
        adj[v].discard(v)
    alive = list(factors)
    remaining = set(free)
    while remaining:
        x = min(remaining, key=lambda v: (len(adj[v]), v))
        scope = tuple(sorted(adj[x] | {x}))
        if len(scope) > WIDTH_LIMIT - 4:
            raise TooLarge(f"counted elimination needs a factor over {len(scope)} vertices")
        bucket = [f for f in alive if x in f.scope]
        alive = [f for f in alive if x not in f.scope]
        shape = (2,) * len(scope)
        plain = [np.zeros(shape, dtype=np.int64) for _ in range(3)]
        acc = None
        for f in bucket:
            rs = [2 if v in f.scope else 1 for v in scope]
            if not f.counted:
                for arr, src in zip(plain, (f.P, f.Q, f.T)):
                    arr += np.broadcast_to(src.reshape(rs), shape)
                continue
            g = tuple(np.broadcast_to(a.reshape(rs + [K]), shape + (K,)).copy() for a in (f.P, f.Q, f.T, f.V))
            if acc is None:
                acc = g
                continue
            out = (np.zeros(shape + (K,), dtype=np.int64), np.zeros(shape + (K,), dtype=np.int64),
                   np.zeros(shape + (K,), dtype=np.int64), np.zeros(shape + (K,), dtype=bool))
            for a in range(K):
                src = (acc[0][..., a:a + 1] + g[0][..., :K - a], acc[1][..., a:a + 1] + g[1][..., :K - a],
                       acc[2][..., a:a + 1] + g[2][..., :K - a], acc[3][..., a:a + 1] & g[3][..., :K - a])
                part = tuple(o[..., a:] for o in out)
                merged = _lexmin_into(part, src, obj.d)
                for o, m in zip(out, merged):
                    o[..., a:] = m
            acc = out
        P = acc[0] + plain[0][..., None]
        Q = acc[1] + plain[1][..., None]
        T = acc[2] + plain[2][..., None]
        V = acc[3]
        ax = scope.index(x)
        lo = tuple(np.take(a, 0, ax) for a in (P, Q, T, V))
        hi = tuple(np.take(a, 1, ax) for a in (P, Q, T, V))
        res = _lexmin_into(lo, hi, obj.d)
        rest = tuple(v for v in scope if v != x)
        remaining.discard(x)
        for v in rest:
            adj[v].discard(x)
            adj[v].update(w for w in rest if w != v)
        del adj[x]
        alive.append(_CFactor(rest, *(np.asarray(a) for a in res), True))
    # remaining factors are scalars over the count axis (or plain scalars)
    acc = (np.full(K, p0, dtype=np.int64), np.full(K, q0, dtype=np.int64),
           np.full(K, obj.tie * len(forced_in), dtype=np.int64), np.zeros(K, dtype=bool))
    acc[3][0] = True
    for f in alive:
        if not f.counted:
            acc = (acc[0] + int(f.P), acc[1] + int(f.Q), acc[2] + int(f.T), acc[3])
            continue
        out = (np.zeros(K, dtype=np.int64), np.zeros(K, dtype=np.int64), np.zeros(K, dtype=np.int64),
               np.zeros(K, dtype=bool))
        for a in range(K):
            src = (acc[0][a] + f.P[:K - a], acc[1][a] + f.Q[:K - a], acc[2][a] + f.T[:K - a],
                   acc[3][a] & f.V[:K - a])
            merged = _lexmin_into(tuple(o[a:] for o in out), src, obj.d)
            for o, m in zip(out, merged):
                o[a:] = m
        acc = out
    i = _argmin(acc[0], acc[1], acc[2], obj.d, acc[3])
    if i < 0:
        return None
    return int(acc[0][i]), int(acc[1][i]), int(acc[2][i]), None


def min_rank_limited(spec: AlphaSpec, S: FinStructure, forced_in, limit: int, tie: int = 1,
                     method: str = "auto", cap: int | None = None):
    """Least delta(X) over forced_in <= X with at most `limit` vertices outside forced_in.

    Returns (value, minimiser); the minimiser is None on the elimination route.
    """
    obj = _Objective(spec, S, (), tie)
    fin = _ids(S, forced_in)
    free = [v for v in range(obj.n) if v not in fin]
    limit = max(0, min(limit, len(free)))
    cap = default_cap() if cap is None else cap
    if method == "auto":
        method = "exhaustive" if len(free) <= min(cap, EXHAUSTIVE_LIMIT) else "eliminate"
    if method == "eliminate":
        r = _eliminate_counted(obj, fin, limit)
        return None if r is None else (obj.weight(r[0], r[1]), None)
    if len(free) > cap:
        raise TooLarge(f"{len(free)} free vertices exceed the scan cap {cap}")
    best = None
    for off, P, Q, T in _tables(obj, free, fin, set()):
        pop = np.array([bin(off + i).count("1") for i in range(P.size)]) if off else \
            np.array([bin(i).count("1") for i in range(P.size)])
        i = _argmin(P, Q, T, obj.d, pop <= limit)
        if i < 0:
            continue
        cand = (int(P[i]), int(Q[i]), int(T[i]), off + i)
        if best is None or _better(cand, best, obj.d):
            best = cand
    chosen = set(fin) | {free[j] for j in range(len(free)) if best[3] >> j & 1}
    return obj.weight(best[0], best[1]), _names(S, chosen)


# -- predicates -----------------------------------------------------------------

def in_kalpha(spec: AlphaSpec, S: FinStructure, method: str = "auto", cap: int | None = None) -> RankReport:
    """Every substructure has non-negative rank; witness is a smallest worst subset."""
    v, X = min_rank(spec, S, tie=1, method=method, cap=cap)
    if v < 0:
        return RankReport(False, v, X, "subset of negative rank")
    return RankReport(True, v, None)


def is_strong(spec: AlphaSpec, S: FinStructure, A, method: str = "auto", cap: int | None = None) -> RankReport:
    """A <= S: no superset of A inside S has smaller rank.

    The witness is a smallest superset of least rank; value is its rank drop
    delta(witness) - delta(A), which is negative exactly when A is not strong.
    """
    A = _vset(S, A)
    base = delta(spec, S, A)
    v, X = min_rank(spec, S, forced_in=A, tie=1, method=method, cap=cap)
    drop = v - base
    if drop < 0:
        return RankReport(False, drop, X, "superset of smaller rank")
    return RankReport(True, drop, X)


def is_minimal_pair(spec: AlphaSpec, S: FinStructure, A, method: str = "auto", cap: int | None = None) -> RankReport:
    """(A, S) is a minimal pair: delta(S) < delta(A) and A <= C for all A <= C < S."""
    A = _vset(S, A)
    if A == S.vertex_set:
        return RankReport(False, None, None, "A is all of S")
    dA = delta(spec, S, A)
    dS = delta(spec, S)
    if not dS < dA:
        return RankReport(False, dS - dA, S.vertex_set, "no rank drop")
    v, X = min_rank(spec, S, forced_in=A, tie=1, exclude_full=True, method=method, cap=cap)
    if v < dA:
        return RankReport(False, v - dA, X, "intermediate set below delta(A)")
    return RankReport(True, dS - dA, None)


def is_essential_minimal_pair(spec: AlphaSpec, S: FinStructure, B, method: str = "auto",
                              cap: int | None = None) -> RankReport:
    """(B, S) is an essential minimal pair.

    Checks B in K_alpha with delta(B) > 0, S in K_alpha, the minimal pair
    condition, and delta(D'/D' n B) >= 0 for every proper D' of S.
    """
    B = _vset(S, B)
    SB = induced(S, B)
    dB = delta(spec, SB)
    if not dB > 0:
        return RankReport(False, dB, B, "base has rank <= 0")
    r = in_kalpha(spec, SB, method=method, cap=cap)
    if not r:
        return RankReport(False, r.value, r.witness, "base not in K_alpha")
    r = in_kalpha(spec, S, method=method, cap=cap)
    if not r:
        return RankReport(False, r.value, r.witness, "extension not in K_alpha")
    r = is_minimal_pair(spec, S, B, method=method, cap=cap)
    if not r:
        return RankReport(False, r.value, r.witness, "not a minimal pair: " + r.note)
    v, X = min_rank(spec, S, base=B, tie=1, exclude_full=True, method=method, cap=cap)
    if v < 0:
        return RankReport(False, v, X, "proper subset drops over its trace on the base")
    return RankReport(True, delta(spec, S) - dB, None)


def icl(spec: AlphaSpec, S: FinStructure, X, method: str = "auto", cap: int | None = None) -> frozenset[str]:
    """Intrinsic closure of X in S: the least strong superset of X.

    Computed as the smallest minimiser of delta over supersets of X; the
    minimisers of a submodular function form a lattice, so it is unique.
    """
    X = _vset(S, X)
    _, Y = min_rank(spec, S, forced_in=X, tie=1, method=method, cap=cap)
    return Y


def icl_by_pairs(spec: AlphaSpec, S: FinStructure, X, cap: int | None = None) -> frozenset[str]:
    """Closure as a fixed point: add minimal-pair extensions until none escapes.

    At each stage a smallest superset F of the current set with lower rank is
    a minimal pair over it; none exists exactly when the set is closed.
    """
    cur = _vset(S, X)
    while True:
        d0 = delta(spec, S, cur)
        rest = [v for v in S.universe if v not in cur]
        found = None
        for k in range(1, len(rest) + 1):
            if len(rest) > (cap or default_cap()):
                raise TooLarge("closure search too large")
            for extra in combinations(rest, k):
                F = cur | set(extra)
                if delta(spec, S, F) < d0:
                    found = F
                    break
            if found:
                break
        if found is None:
            return cur
        cur = frozenset(found)


def zero_set(spec: AlphaSpec, S: FinStructure, method: str = "auto", cap: int | None = None) -> frozenset[str]:
    """Union of all rank-0 subsets, itself of rank 0 (S must be in K_alpha)."""
    v, X = min_rank(spec, S, tie=-1, method=method, cap=cap)
    if v < 0:
        raise NotInKalpha(f"a subset has negative rank {v}")
    return X


# -- closedness by both clauses -----------------------------------------------

def delta_table(spec: AlphaSpec, S: FinStructure, cap: int = 22):
    """(L, d, P, Q): delta of every subset mask of S as (P + Q sqrt d)/L."""
    if len(S) > cap:
        raise TooLarge(f"{len(S)} vertices exceed the table cap {cap}")
    if len(S) > EXHAUSTIVE_LIMIT:
        raise TooLarge(f"{len(S)} vertices exceed the table cap {EXHAUSTIVE_LIMIT}")
    obj = _Objective(spec, S)
    [(_, P, Q, _)] = list(_tables(obj, list(range(len(S))), set(), set()))
    return obj.L, obj.d, P, Q


def is_closed(spec: AlphaSpec, S: FinStructure, X, cap: int = 14) -> RankReport:
    """X is closed in the finite structure S, checked two independent ways.

    Clause (b): every minimal pair (A, F) with A inside X and F inside S has F
    inside X.  Clause (c): every finite B has B n X <= B.  The two are
    computed separately and must agree.
    """
    X = _vset(S, X)
    n = len(S)
    if n > cap:
        raise TooLarge(f"{n} vertices exceed the closedness cap {cap}")
    L, d, P, Q = delta_table(spec, S)
    xm = S.mask(X)
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)

    # clause (c): delta(S' u U) >= delta(S') for S' in X and U outside X
    s = surd_sign(P - P[masks & xm], Q - Q[masks & xm], d)
    bad_c = np.flatnonzero(s < 0)
    holds_c = bad_c.size == 0

    # clause (b): for each A inside X, a minimal pair (A, F) with F not inside X
    holds_b = True
    wit_b = None
    Pl, Ql = P.tolist(), Q.tolist()
    for am in _submasks(xm):
        outside = full & ~am
        # g[m] = least delta over A <= C <= m, tracked only for m containing A
        gP = P.copy()
        gQ = Q.copy()
        for i in range(n):
            if not outside >> i & 1:
                continue
            lo = masks[(masks >> i & 1) == 0]
            hi = lo | (1 << i)
            sgn = surd_sign(gP[lo] - gP[hi], gQ[lo] - gQ[hi], d)
            take = sgn < 0
            gP[hi] = np.where(take, gP[lo], gP[hi])
            gQ[hi] = np.where(take, gQ[lo], gQ[hi])
        gPl, gQl = gP.tolist(), gQ.tolist()
        pa, qa = Pl[am], Ql[am]
        for fm in range(1 << n):
            if fm & am != am or fm & ~xm == 0:
                continue
            if _ssign(Pl[fm] - pa, Ql[fm] - qa, d) >= 0:
                continue
            ok = True
            rest = fm & ~am
            while rest:
                low = rest & -rest
                rest ^= low
                c = fm ^ low
                if _ssign(gPl[c] - pa, gQl[c] - qa, d) < 0:
                    ok = False
                    break
            if ok:
                holds_b = False
                wit_b = (am, fm)
                break
        if not holds_b:
            break
    if holds_b != holds_c:
        raise InternalInconsistency(f"closure clauses disagree on {sort_ids(X)}")
    if holds_b:
        return RankReport(True, None, None)
    if wit_b is not None:
        am, fm = wit_b
        return RankReport(False, None, frozenset(S.universe[i] for i in range(n) if fm >> i & 1),
                          "minimal pair escapes X")
    return RankReport(False, None, None)


def _submasks(m: int):
    s = m
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & m
