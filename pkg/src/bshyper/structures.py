"""Finite relational structures on string-labelled vertices.

Relations are stored per symbol as sets of sorted vertex tuples, so every
relation is an unordered set of distinct vertices.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .weights import AlphaSpec


class UnknownVertex(KeyError):
    pass


class SignatureMismatch(ValueError):
    pass


class OverlapOutsideBase(ValueError):
    pass


def _key(v: str):
    # numeric-aware order so that "v10" sorts after "v9"
    out = []
    num = ""
    for ch in v:
        if ch.isdigit():
            num += ch
        else:
            if num:
                out.append((0, int(num), ""))
                num = ""
            out.append((1, 0, ch))
    if num:
        out.append((0, int(num), ""))
    return tuple(out)


def sort_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=_key)


class FinStructure:
    """An immutable finite structure: a vertex list plus relations per symbol."""

    __slots__ = ("universe", "relations", "_index", "_edges", "_incident")

    def __init__(self, universe: Iterable[str], relations: Mapping[str, Iterable[Iterable[str]]] | None = None):
        uni = tuple(str(v) for v in universe)
        if len(set(uni)) != len(uni):
            raise ValueError("repeated vertex in universe")
        index = {v: i for i, v in enumerate(uni)}
        rels: dict[str, frozenset[tuple[str, ...]]] = {}
        for sym, tuples in (relations or {}).items():
            bag = set()
            for t in tuples:
                t = tuple(str(x) for x in t)
                for x in t:
                    if x not in index:
                        raise UnknownVertex(x)
                if len(set(t)) != len(t):
                    raise ValueError(f"relation {sym}{t} repeats a vertex")
                bag.add(tuple(sorted(t, key=index.__getitem__)))
            if bag:
                rels[sym] = frozenset(bag)
        object.__setattr__(self, "universe", uni)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_edges", None)
        object.__setattr__(self, "_incident", None)

    def __setattr__(self, name, value):
        raise AttributeError("FinStructure is immutable")

    # -- basic queries -----------------------------------------------------

    def __len__(self):
        return len(self.universe)

    def __contains__(self, v):
        return v in self._index

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(v) from None

    @property
    def vertex_set(self) -> frozenset[str]:
        return frozenset(self.universe)

    def edges(self) -> list[tuple[str, tuple[int, ...]]]:
        """All relations as (symbol, tuple of vertex indices), in a fixed order."""
        if self._edges is None:
            out = []
            for sym in sorted(self.relations):
                for t in sorted(self.relations[sym], key=lambda t: tuple(self._index[x] for x in t)):
                    out.append((sym, tuple(self._index[x] for x in t)))
            object.__setattr__(self, "_edges", out)
        return self._edges

    def incident(self) -> list[list[int]]:
        """For each vertex index, the positions in edges() that contain it."""
        if self._incident is None:
            inc: list[list[int]] = [[] for _ in self.universe]
            for k, (_, t) in enumerate(self.edges()):
                for i in t:
                    inc[i].append(k)
            object.__setattr__(self, "_incident", inc)
        return self._incident

    def count(self, sym: str | None = None) -> int:
        if sym is None:
            return sum(len(v) for v in self.relations.values())
        return len(self.relations.get(sym, ()))

    def has(self, sym: str, tup: Iterable[str]) -> bool:
        t = tuple(sorted((str(x) for x in tup), key=lambda x: self._index.get(x, -1)))
        return t in self.relations.get(sym, ())

    def mask(self, vertices: Iterable[str]) -> int:
        m = 0
        for v in vertices:
            m |= 1 << self.index(v)
        return m

    def check(self, spec: AlphaSpec) -> None:
        """Raise SignatureMismatch unless every relation fits the signature."""
        for sym, tuples in self.relations.items():
            if sym not in spec:
                raise SignatureMismatch(f"symbol {sym!r} is not in the signature")
            ar = spec.arity(sym)
            for t in tuples:
                if len(t) != ar:
                    raise SignatureMismatch(f"{sym}{t} has size {len(t)}, expected {ar}")

    # -- equality ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, FinStructure):
            return NotImplemented
        return (set(self.universe) == set(other.universe)
                and _canon_rels(self) == _canon_rels(other))

    def __hash__(self):
        return hash((frozenset(self.universe), frozenset(_canon_rels(self).items())))

    def __repr__(self):
        return f"FinStructure({len(self.universe)} vertices, {self.count()} relations)"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        rels = {}
        for sym in sorted(self.relations):
            rels[sym] = sorted(sort_ids(t) for t in self.relations[sym])
        return {"universe": list(self.universe), "relations": rels}

    @classmethod
    def from_json(cls, obj) -> "FinStructure":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["universe"], obj.get("relations", {}))

    def to_dot(self, name: str = "S") -> str:
        """Graphviz text: binary relations as edges, wider ones as hyperedge nodes."""
        lines = [f"graph {name} {{"]
        for v in self.universe:
            lines.append(f'  "{v}";')
        h = 0
        for sym in sorted(self.relations):
            for t in sorted(self.relations[sym]):
                if len(t) == 2:
                    lines.append(f'  "{t[0]}" -- "{t[1]}" [label="{sym}"];')
                else:
                    node = f"_{sym}{h}"
                    h += 1
                    lines.append(f'  "{node}" [shape=point, xlabel="{sym}"];')
                    for x in t:
                        lines.append(f'  "{node}" -- "{x}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _canon_rels(S: FinStructure) -> dict[str, frozenset[frozenset[str]]]:
    return {k: frozenset(frozenset(t) for t in v) for k, v in S.relations.items()}


def induced(S: FinStructure, X: Iterable[str]) -> FinStructure:
    """The substructure on X, keeping S's vertex order."""
    keep = set(X)
    for v in keep:
        if v not in S:
            raise UnknownVertex(v)
    uni = [v for v in S.universe if v in keep]
    rels = {sym: [t for t in ts if keep.issuperset(t)] for sym, ts in S.relations.items()}
    return FinStructure(uni, rels)


def rename(S: FinStructure, mapping: Mapping[str, str]) -> FinStructure:
    """Relabel vertices; vertices missing from mapping keep their ids."""
    f = lambda v: mapping.get(v, v)
    return FinStructure([f(v) for v in S.universe],
                        {sym: [tuple(f(x) for x in t) for t in ts] for sym, ts in S.relations.items()})


def union(parts: Iterable[FinStructure]) -> FinStructure:
    """Plain union of structures; shared vertices are identified by id."""
    uni: list[str] = []
    seen = set()
    rels: dict[str, set] = {}
    for P in parts:
        for v in P.universe:
            if v not in seen:
                seen.add(v)
                uni.append(v)
        for sym, ts in P.relations.items():
            rels.setdefault(sym, set()).update(frozenset(t) for t in ts)
    return FinStructure(uni, {k: [tuple(t) for t in v] for k, v in rels.items()})


def free_join(parts: list[FinStructure], base: Iterable[str], rename_private: bool = False) -> FinStructure:
    """Free join of structures over a common base set of vertex ids.

    With rename_private, vertices of part i outside the base become "p{i}_{id}";
    otherwise parts sharing a vertex outside the base raise OverlapOutsideBase.
    """
    base = set(base)
    if not parts:
        raise ValueError("free join of no parts")
    for P in parts:
        missing = base - set(P.universe)
        if missing:
            raise UnknownVertex(sort_ids(missing)[0])
    ref = _canon_rels(induced(parts[0], base))
    for P in parts[1:]:
        if _canon_rels(induced(P, base)) != ref:
            raise OverlapOutsideBase("parts disagree on the base")
    if rename_private:
        parts = [rename(P, {v: f"p{i}_{v}" for v in P.universe if v not in base})
                 for i, P in enumerate(parts)]
    owner: dict[str, int] = {}
    for i, P in enumerate(parts):
        for v in P.universe:
            if v in base:
                continue
            if v in owner:
                raise OverlapOutsideBase(f"vertex {v} lies in parts {owner[v]} and {i}")
            owner[v] = i
    return union(parts)


def disjoint_union(parts: list[FinStructure]) -> FinStructure:
    return free_join(parts, (), rename_private=False)


# -- embeddings ---------------------------------------------------------------

def _adjacency(S: FinStructure):
    """vertex index -> list of (symbol, frozenset of vertex indices)."""
    adj: list[list[tuple[str, frozenset[int]]]] = [[] for _ in S.universe]
    for sym, t in S.edges():
        fs = frozenset(t)
        for i in t:
            adj[i].append((sym, fs))
    return adj


def find_embeddings(B: FinStructure, M: FinStructure, partial: Mapping[str, str] | None = None,
                    limit: int | None = None) -> list[dict[str, str]]:
    """Induced embeddings of B into M extending the partial map.

    Backtracking with a most-constrained-first vertex order.  Each returned
    map is injective and preserves relations and non-relations.
    """
    partial = dict(partial or {})
    for v, w in partial.items():
        if v not in B:
            raise UnknownVertex(v)
        if w not in M:
            raise UnknownVertex(w)
    n = len(B)
    adjB = _adjacency(B)
    adjM = _adjacency(M)
    relsM = {(sym, frozenset(t)) for sym, t in M.edges()}
    relsB = {(sym, frozenset(t)) for sym, t in B.edges()}
    f = [-1] * n
    used = set()
    for v, w in partial.items():
        i, j = B.index(v), M.index(w)
        if j in used:
            return []
        f[i] = j
        used.add(j)

    def consistent(i: int) -> bool:
        # relations of B at i whose vertices are all mapped
        for sym, fs in adjB[i]:
            if all(f[x] >= 0 for x in fs):
                if (sym, frozenset(f[x] for x in fs)) not in relsM:
                    return False
        # relations of M at f(i) whose vertices are all in the image
        j = f[i]
        for sym, fs in adjM[j]:
            if fs <= used:
                pre = frozenset(inv[y] for y in fs)
                if (sym, pre) not in relsB:
                    return False
        return True

    inv = {f[i]: i for i in range(n) if f[i] >= 0}
    for i in range(n):
        if f[i] >= 0 and not consistent(i):
            return []

    # static order: repeatedly take the unmapped vertex with most ties to placed ones
    placed = {i for i in range(n) if f[i] >= 0}
    nbrs = [set().union(*(fs for _, fs in adjB[i])) - {i} if adjB[i] else set() for i in range(n)]
    order = []
    rest = [i for i in range(n) if i not in placed]
    while rest:
        best = max(rest, key=lambda i: (len(nbrs[i] & placed), len(adjB[i]), -i))
        order.append(best)
        placed.add(best)
        rest.remove(best)

    nbrsM = [set().union(*(fs for _, fs in adjM[j])) - {j} if adjM[j] else set() for j in range(len(M))]
    out: list[dict[str, str]] = []

    def candidates(i: int):
        anchors = [f[x] for x in nbrs[i] if f[x] >= 0]
        if anchors:
            cand = set(nbrsM[anchors[0]])
            for a in anchors[1:]:
                cand &= nbrsM[a]
            return sorted(cand - used)
        return [j for j in range(len(M)) if j not in used]

    def rec(k: int) -> bool:
        if k == len(order):
            out.append({B.universe[i]: M.universe[f[i]] for i in range(n)})
            return limit is not None and len(out) >= limit
        i = order[k]
        for j in candidates(i):
            if len(adjM[j]) < len(adjB[i]):
                continue
            f[i] = j
            used.add(j)
            inv[j] = i
            if consistent(i) and rec(k + 1):
                return True
            del inv[j]
            used.discard(j)
            f[i] = -1
        return False

    rec(0)
    return out


def is_isomorphic(S: FinStructure, T: FinStructure, over: Mapping[str, str] | None = None) -> bool:
    """Isomorphism test, optionally required to extend the partial map `over`."""
    if len(S) != len(T):
        return False
    if {k: len(v) for k, v in S.relations.items()} != {k: len(v) for k, v in T.relations.items()}:
        return False
    def profile(X):
        deg: dict[str, dict[str, int]] = {v: {} for v in X.universe}
        for sym, ts in X.relations.items():
            for t in ts:
                for v in t:
                    deg[v][sym] = deg[v].get(sym, 0) + 1
        return sorted(tuple(sorted(d.items())) for d in deg.values())
    if profile(S) != profile(T):
        return False
    return bool(find_embeddings(S, T, over, limit=1))
