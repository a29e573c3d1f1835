"""Finite constructions with re-checkable certificates.

Each builder returns a Certificate: the result structure plus a list of
claims.  verify() re-derives every claim from scratch with the rank and
embedding routines; nothing is taken from the builder's bookkeeping.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, islice
from typing import Iterable, Sequence

from .numtheory import beta_lower_bound, coarse_bounds, granularity
from .rank import (NotInKalpha, delta, icl, in_kalpha, is_essential_minimal_pair, is_minimal_pair,
                   is_strong, min_rank, rel_rank, zero_set, min_rank_limited)
from .structures import (FinStructure, find_embeddings, free_join, induced, rename, sort_ids, union)
from .templates import (BStarInfeasible, classify_pair, covers, extend_by_template, gen_good_pairs,
                        greedy_template)
from .weights import AlphaSpec, Weight, is_coherent, is_rational


class BaseNotStrong(ValueError):
    pass


class EpsilonTooLarge(ValueError):
    pass


class NoIrrationalSymbol(ValueError):
    pass


class NotEssentialPair(ValueError):
    pass


class PhiMemberStrong(ValueError):
    pass


class NotCoherent(ValueError):
    pass


class BudgetInfeasible(ValueError):
    pass


class ConstructionInfeasible(ValueError):
    pass


RESULT_CAP = 4096


# -- certificates -------------------------------------------------------------

@dataclass
class Certificate:
    construction: str
    spec: AlphaSpec
    result: FinStructure
    base: frozenset
    claims: list[dict]
    info: dict = field(default_factory=dict)

    def digest(self) -> str:
        return structure_digest(self.result)

    def to_json(self) -> dict:
        return {
            "construction": self.construction,
            "signature": self.spec.to_json(),
            "result": self.result.to_json(),
            "base": sort_ids(self.base),
            "claims": self.claims,
            "info": self.info,
            "digest": self.digest(),
        }

    @classmethod
    def from_json(cls, obj) -> "Certificate":
        cert = cls(obj["construction"], AlphaSpec.from_json(obj["signature"]),
                   FinStructure.from_json(obj["result"]), frozenset(obj.get("base", [])),
                   list(obj.get("claims", [])), dict(obj.get("info", {})))
        cert.info["_digest"] = obj.get("digest")
        return cert


def structure_digest(S: FinStructure) -> str:
    blob = json.dumps(S.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _ids(X) -> list[str]:
    return sort_ids(X)


def _w(x) -> dict:
    return Weight.of(x).to_json()


def claim(kind: str, **payload) -> dict:
    return {"kind": kind, **payload}


@dataclass
class ClaimResult:
    claim: dict
    ok: bool
    detail: str = ""


def check_claim(spec: AlphaSpec, R: FinStructure, c: dict, method: str = "auto") -> ClaimResult:
    kind = c["kind"]
    try:
        if kind == "in_kalpha":
            r = in_kalpha(spec, R, method=method)
            return ClaimResult(c, r.holds, "" if r else f"subset {_ids(r.witness)} has rank {r.value}")
        if kind == "essential_minimal_pair":
            r = is_essential_minimal_pair(spec, R, c["base"], method=method)
            return ClaimResult(c, r.holds, r.note)
        if kind == "minimal_pair":
            r = is_minimal_pair(spec, R, c["base"], method=method)
            return ClaimResult(c, r.holds, r.note)
        if kind == "strong":
            r = is_strong(spec, R, c["set"], method=method)
            return ClaimResult(c, r.holds, "" if r else f"superset {_ids(r.witness)} drops by {r.value}")
        if kind in ("rank_equals", "rank_between", "zero_rank"):
            S = set(c.get("set", R.universe))
            over = set(c.get("over", ()))
            v = rel_rank(spec, R, S, over)
            if kind == "zero_rank":
                return ClaimResult(c, v == 0, f"rank {v}")
            if kind == "rank_equals":
                want = Weight.from_json(c["value"])
                return ClaimResult(c, v == want, f"rank {v}, expected {want}")
            lo = Weight.from_json(c["lo"]) if c.get("lo") is not None else None
            hi = Weight.from_json(c["hi"]) if c.get("hi") is not None else None
            ok = True
            if lo is not None:
                ok &= (v > lo) if c.get("lo_strict", False) else (v >= lo)
            if hi is not None:
                ok &= (v < hi) if c.get("hi_strict", True) else (v <= hi)
            return ClaimResult(c, ok, f"rank {v} against [{lo}, {hi}]")
        if kind == "zero_set_equals":
            Z = zero_set(spec, R, method=method)
            return ClaimResult(c, Z == frozenset(c["set"]), f"zero set has {len(Z)} vertices")
        if kind == "icl_equals":
            C = icl(spec, R, c["set"], method=method)
            return ClaimResult(c, C == frozenset(c["closure"]), f"closure {_ids(C)}")
        if kind == "icl_contains":
            C = icl(spec, R, c["set"], method=method)
            return ClaimResult(c, C >= frozenset(c["part"]), f"closure has {len(C)} vertices")
        if kind == "extends":
            S = FinStructure.from_json(c["structure"])
            if not set(S.universe) <= set(R.universe):
                return ClaimResult(c, False, "vertices missing")
            return ClaimResult(c, induced(R, S.universe) == S, "induced substructure differs")
        if kind == "omits":
            C = FinStructure.from_json(c["structure"])
            over = {v: v for v in c["over"]}
            emb = find_embeddings(C, R, over, limit=1)
            return ClaimResult(c, not emb, f"embedding found: {emb[0]}" if emb else "")
        if kind == "covers":
            return ClaimResult(c, covers(induced(R, c["within"]) if "within" in c else R, c["base"]))
        if kind == "no_small_minimal_pair":
            base = set(c["base"])
            r = min_rank_limited(spec, R, base, int(c["max_new"]), method=method)
            ok = r is None or r[0] >= delta(spec, R, base)
            return ClaimResult(c, ok, "" if ok else f"small set {_ids(r[1])} drops below the base")
        return ClaimResult(c, False, f"unknown claim kind {kind!r}")
    except Exception as exc:  # a claim that cannot be evaluated does not hold
        return ClaimResult(c, False, f"{type(exc).__name__}: {exc}")


def verify(cert: Certificate | dict, method: str = "auto") -> tuple[bool, list[ClaimResult]]:
    """Replay every claim of a certificate; also check the stored digest when present."""
    if isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    out = []
    stored = cert.info.get("_digest")
    if stored is not None:
        out.append(ClaimResult({"kind": "digest"}, stored == cert.digest(), "result differs from digest"))
    try:
        cert.result.check(cert.spec)
    except Exception as exc:
        out.append(ClaimResult({"kind": "signature"}, False, str(exc)))
        return False, out
    for c in cert.claims:
        out.append(check_claim(cert.spec, cert.result, c, method))
    return all(r.ok for r in out), out


# -- helpers --------------------------------------------------------------------

def _fresh(taken: set, tag: str, count: int) -> list[str]:
    out = []
    i = 1
    while len(out) < count:
        v = f"{tag}{i}"
        if v not in taken:
            out.append(v)
        i += 1
    return out


def _relabel_private(D: FinStructure, keep: Iterable[str], taken: set, tag: str) -> FinStructure:
    keep = set(keep)
    priv = [v for v in D.universe if v not in keep]
    names = _fresh(taken | keep, tag, len(priv))
    return rename(D, dict(zip(priv, names)))


def join_copies(C: FinStructure, base: Iterable[str], k: int, taken: Iterable[str] = (), tag: str = "c") -> FinStructure:
    """Free join of k copies of C over base, with fresh ids for private vertices."""
    base = set(base)
    taken = set(taken) | set(C.universe)
    if k <= 0:
        return induced(C, base)
    parts = []
    for i in range(k):
        P = _relabel_private(C, base, taken, f"{tag}{i + 1}_")
        taken |= set(P.universe)
        parts.append(P)
    return free_join(parts, base)


def _pad_once(spec: AlphaSpec, A: FinStructure, B: FinStructure, cands, target) -> tuple[FinStructure, Weight]:
    rels = {k: list(v) for k, v in B.relations.items()}
    gap = rel_rank(spec, B, B.universe, A.universe)
    for e, c in cands:
        if target is not None and gap < target:
            break
        if gap - spec.alpha(e) < 0:
            continue
        rels.setdefault(e, []).append(c)
        T = FinStructure(B.universe, rels)
        if is_strong(spec, T, A.universe) and in_kalpha(spec, T):
            gap = gap - spec.alpha(e)
            continue
        rels[e].pop()
    return FinStructure(B.universe, rels), gap


def pad_base(spec: AlphaSpec, A: FinStructure, target: Weight | None = None, seed: int = 0,
             style: str = "tight", restarts: int = 8) -> FinStructure:
    """A superset B of A with |B| >= m_suff and A <= B.

    "isolated" adds bare points.  "tight" then adds relations touching the new
    points one at a time while A stays strong and B stays in K_alpha, until
    delta(B/A) drops below target.  Several insertion orders (fixed by seed)
    are tried and the smallest delta(B/A) wins.
    """
    need = coarse_bounds(spec).m_suff - len(A)
    if need <= 0:
        return A
    pts = _fresh(set(A.universe), "z", need)
    B = FinStructure(list(A.universe) + pts, A.relations)
    if style == "isolated":
        return B
    if style != "tight":
        raise ValueError(f"unknown padding style {style!r}")
    newset = set(pts)
    cands = [(e, c) for e in spec.names for c in combinations(B.universe, spec.arity(e)) if newset & set(c)]
    best = None
    for j in range(max(1, restarts)):
        order = list(cands)
        if seed or j:
            random.Random(f"{seed}:{j}").shuffle(order)
        T, gap = _pad_once(spec, A, B, order, target)
        if best is None or gap < best[1]:
            best = (T, gap)
        if target is not None and gap < target:
            break
    return best[0]


# -- amalgamation ----------------------------------------------------------------

def amalgam(spec: AlphaSpec, M: FinStructure, A: Iterable[str], B: FinStructure,
            rename_private: bool = False) -> Certificate:
    """Free join M (+)_A B for A <= B."""
    A = frozenset(A)
    if rename_private:
        B = _relabel_private(B, A, set(M.universe), "n")
    if set(M.universe) & set(B.universe) != set(A):
        raise ValueError("M and B must meet exactly in A")
    if induced(M, A) != induced(B, A):
        raise ValueError("M and B disagree on A")
    if not is_strong(spec, B, A):
        raise BaseNotStrong("A is not strong in B")
    R = free_join([M, B], A)
    claims = [claim("in_kalpha"), claim("strong", set=_ids(M.universe)),
              claim("extends", structure=M.to_json()), claim("extends", structure=B.to_json()),
              claim("rank_equals", value=_w(delta(spec, R)))]
    return Certificate("amalgam", spec, R, frozenset(M.universe), claims)


# -- essential minimal pairs ---------------------------------------------------------

def essential_minimal_pair(spec: AlphaSpec, A: FinStructure, epsilon=None, min_new: int = 3,
                           variant_seed: int = 0, pad: str = "tight", symbol: str | None = None,
                           strict_epsilon: bool = False, absorb=None) -> Certificate:
    """An essential minimal pair (A, D) with a small negative relative rank.

    Rational weights give delta(D/A) = -1/c exactly.  Otherwise a symbol with
    irrational weight is used and -epsilon < delta(D/A) < 0, with epsilon
    clamped to min(delta(A), Gr(2)).  With absorb set, the pair is picked to
    keep floor(absorb/gamma) copies of the result small (as in omit_extension).
    """
    A.check(spec)
    dA = delta(spec, A)
    if not dA > 0:
        raise ValueError("A must have positive rank")
    if not in_kalpha(spec, A):
        raise NotInKalpha("A is not in K_alpha")
    rat, c = is_rational(spec)
    info: dict = {}
    if rat:
        mode = "unit_c" if c == 1 else "rational"
        eps = None
    else:
        irr = [e for e in spec.names if not spec.alpha(e).is_rational]
        if symbol is None:
            if not irr:
                raise NoIrrationalSymbol("no symbol with irrational weight")
        elif spec.alpha(symbol).is_rational:
            raise NoIrrationalSymbol(f"weight of {symbol} is rational")
        mode = "irrational"
        limit = min(dA, granularity(spec, 2))
        asked = Weight.from_json(epsilon) if epsilon is not None else limit
        if not asked > 0:
            raise EpsilonTooLarge("epsilon must be positive")
        if asked > limit and strict_epsilon:
            raise EpsilonTooLarge(f"epsilon {asked} exceeds min(delta(A), Gr(2)) = {limit}")
        eps = min(asked, limit)
        info.update(epsilon_requested=_w(asked), epsilon_used=_w(eps), clamped=bool(asked > limit))
    # base of the template
    target = Weight(Fraction(1, c)) if rat else None
    B = pad_base(spec, A, target=target, seed=variant_seed, style=pad)
    dBA = rel_rank(spec, B, B.universe, A.universe)
    if rat:
        pair = next(gen_good_pairs(spec, B, mode, min_n=max(3, min_new)))
    else:
        # smallest estimated result over the irrational symbols and the first few pairs
        best = None
        for sym in ([symbol] if symbol is not None else irr):
            for pr in islice(gen_good_pairs(spec, B, mode, min_n=max(3, min_new), epsilon=eps, symbol=sym), 4):
                size = (math.floor(dBA / -pr.w) + 1) * pr.n
                if absorb is not None:
                    size *= max(1, math.floor(Weight.of(absorb) / -pr.w))
                if best is None or size < best[0]:
                    best = (size, pr)
        pair = best[1]
    theta, rels = greedy_template(spec, B, pair)
    C = extend_by_template(spec, B, theta, covering=True, variant_seed=variant_seed)
    gamma = -pair.w
    k = math.floor(dBA / gamma)
    D = C if k == 0 else join_copies(C, B.universe, k + 1, tag="c")
    if len(D) > RESULT_CAP:
        raise ConstructionInfeasible(f"result would have {len(D)} vertices")
    info.update(pair=pair.to_json(), template=theta.to_json(), padded=len(B) - len(A),
                pad_gap=_w(dBA), copies=k + 1)
    claims = [claim("extends", structure=A.to_json()), claim("in_kalpha"),
              claim("essential_minimal_pair", base=_ids(A.universe)),
              claim("rank_equals", value=_w(delta(spec, D)))]
    if rat:
        claims.append(claim("rank_equals", over=_ids(A.universe), value=_w(Fraction(-1, c))))
    else:
        claims.append(claim("rank_between", over=_ids(A.universe), lo=_w(-eps), hi=_w(0),
                            lo_strict=True, hi_strict=True))
    if len(B) == len(A):
        claims.append(claim("covers", base=_ids(A.universe)))
    return Certificate("essential_minimal_pair", spec, D, frozenset(A.universe), claims, info)


def absorb_join(spec: AlphaSpec, C: FinStructure, B: Iterable[str], A: Iterable[str]) -> Certificate:
    """Free join of k = floor(delta(B/A)/gamma) copies of C over B, gamma = -delta(C/B).

    A <= D, 0 <= delta(D/A) < gamma, and no set G over B with |G| < |C| and
    delta(G) < delta(B) sits inside D.
    """
    B = frozenset(B)
    A = frozenset(A)
    if not A <= B:
        raise ValueError("A must lie inside B")
    SB = induced(C, B)
    if not is_strong(spec, SB, A):
        raise BaseNotStrong("A is not strong in B")
    if not is_essential_minimal_pair(spec, C, B):
        raise NotEssentialPair("(B, C) is not an essential minimal pair")
    gamma = -rel_rank(spec, C, C.universe, B)
    dBA = rel_rank(spec, SB, B, A)
    k = math.floor(dBA / gamma)
    D = join_copies(C, B, k, tag="k")
    claims = [claim("extends", structure=SB.to_json()), claim("in_kalpha"),
              claim("strong", set=_ids(A)),
              claim("rank_between", over=_ids(A), lo=_w(0), hi=_w(gamma), lo_strict=False, hi_strict=True),
              claim("rank_equals", value=_w(delta(spec, D))),
              claim("no_small_minimal_pair", base=_ids(B), max_new=len(C) - len(B) - 1)]
    return Certificate("absorb_join", spec, D, A, claims, {"copies": k, "gamma": _w(gamma)})


def _minimal_pair_inside(spec: AlphaSpec, C: FinStructure, B: frozenset) -> FinStructure:
    """A smallest G with B < G <= C and delta(G) < delta(B)."""
    dB = delta(spec, C, B)
    rest = [v for v in C.universe if v not in B]
    for k in range(1, len(rest) + 1):
        for extra in combinations(rest, k):
            G = B | set(extra)
            if delta(spec, C, G) < dB:
                return induced(C, G)
    raise PhiMemberStrong("B is strong in C")


def omit_extension(spec: AlphaSpec, B: FinStructure, A: Iterable[str], phi: Sequence[FinStructure],
                   m: int = 2, variant_seed: int = 0) -> Certificate:
    """D* over B with A <= D*, 0 <= delta(D*/A) < Gr(m), into which no C in phi embeds over B."""
    A = frozenset(A)
    Bset = frozenset(B.universe)
    if not is_strong(spec, B, A):
        raise BaseNotStrong("A is not strong in B")
    if not in_kalpha(spec, B):
        raise NotInKalpha("B is not in K_alpha")
    reduced = []
    for C in phi:
        if not Bset <= set(C.universe) or induced(C, Bset) != B:
            raise ValueError("every member of phi must contain B")
        if is_strong(spec, C, Bset):
            raise PhiMemberStrong("B is strong in a member of phi")
        reduced.append(_minimal_pair_inside(spec, C, Bset))
    gr = granularity(spec, m)
    rat, c = is_rational(spec)
    dBA = rel_rank(spec, B, Bset, A)
    info: dict = {"granularity": _w(gr)}
    if dBA == 0:
        D = B
        info["case"] = "already strong"
    else:
        u = max((len(G) for G in reduced), default=len(B))
        min_new = max(3, u - len(B) + 1)
        eps = None if rat else min(gr, dBA)
        emp = essential_minimal_pair(spec, B, epsilon=eps, min_new=min_new, variant_seed=variant_seed, absorb=dBA)
        E = emp.result
        gamma = -rel_rank(spec, E, E.universe, Bset)
        k = math.floor(dBA / gamma)
        D = join_copies(E, Bset, k, tag="k")
        info.update(case="absorbed", copies=k, gamma=_w(gamma), pair_size=len(E))
    claims = [claim("extends", structure=B.to_json()), claim("in_kalpha"), claim("strong", set=_ids(A)),
              claim("rank_between", over=_ids(A), lo=_w(0), hi=_w(gr), lo_strict=False, hi_strict=True),
              claim("rank_equals", value=_w(delta(spec, D)))]
    if rat:
        claims.append(claim("rank_equals", over=_ids(A), value=_w(0)))
    for C in phi:
        claims.append(claim("omits", over=_ids(Bset), structure=C.to_json()))
    return Certificate("omit_extension", spec, D, A, claims, info)


# -- rank-zero extensions --------------------------------------------------------------

def _acceptable_pair_for(spec: AlphaSpec, B: FinStructure, gamma: Weight, witness: dict[str, int], start: int = 1):
    """Stream pairs (n, s) with w(n, s) = -gamma built from a coherence witness.

    With q = sum witness(E) alpha(E) rational and N_E the relation counts of B,
    s(E) = k*witness(E) - N_E and n = k*q - |B| give n - sum alpha s = -delta(B).
    """
    q = sum((spec.alpha(e) * witness[e] for e in spec.names), Weight(0))
    assert q.is_rational
    q = q.a
    k = max(start, 1)
    while True:
        n = k * q - len(B)
        s = {e: k * witness[e] - B.count(e) for e in spec.names}
        if n.denominator == 1 and n >= 3 and all(v >= 0 for v in s.values()):
            pr = classify_pair(spec, B, int(n), s)
            if pr.classification != "none" and pr.w == -gamma:
                yield k, pr
        k += 1


def _drop_pairs(spec: AlphaSpec, B: FinStructure, bound: Weight, max_size: int = 12, below=None):
    """Acceptable pairs over B with 0 < -w <= bound (and -w < below), largest drop first."""
    names = list(spec.names)
    found = []

    def vectors(i, left):
        if i == len(names):
            yield ()
            return
        for k in range(left + 1):
            for rest in vectors(i + 1, left - k):
                yield (k,) + rest

    for vec in vectors(0, max_size):
        tot = sum(vec)
        if tot == 0:
            continue
        sw = sum((spec.alpha(e) * k for e, k in zip(names, vec) if k), Weight(0))
        n = max(3, math.ceil(sw - bound))       # largest drop sw - n not above bound
        if below is not None and not sw - n < below:
            n += 1
        if n < 1 or n > tot or not sw - n > 0:
            continue
        found.append((-(sw - n), n + tot, n, dict((e, k) for e, k in zip(names, vec) if k)))
    found.sort(key=lambda t: (t[0], t[1], t[2], sorted(t[3].items())))
    seen = set()
    for negdrop, _, n, sv in found:
        key = (n, tuple(sorted(sv.items())))
        if key in seen:
            continue
        seen.add(key)
        pr = classify_pair(spec, B, n, sv)
        if pr.classification != "none":
            yield pr


def _least_rank_above(spec: AlphaSpec, S: FinStructure, Z: frozenset):
    """(gamma, B): least delta over Z < B <= S, smallest such B among the first found."""
    best = None
    for v in S.universe:
        if v in Z:
            continue
        val, X = min_rank(spec, S, forced_in=Z | {v}, tie=1)
        if best is None or val < best[0] or (val == best[0] and len(X) < len(best[1])):
            best = (val, X)
    return best


def _steered_extension(spec, SB: FinStructure, pairs, choices, variant_seed):
    """First K_alpha template extension over SB from pairs, with a relation on some b in choices."""
    for pr in pairs:
        try:
            theta, _ = greedy_template(spec, SB, pr)
        except (ValueError, AssertionError):
            continue
        for b in choices:
            try:
                Dx = extend_by_template(spec, SB, theta, covering=False, variant_seed=variant_seed, steer=b)
            except (BStarInfeasible, ValueError, AssertionError):
                continue
            if in_kalpha(spec, Dx):
                return Dx, pr
    return None


def zero_extension(spec: AlphaSpec, A: FinStructure, variant_seed: int = 0, max_rounds: int = 400,
                   log: list | None = None) -> Certificate:
    """D containing A with delta(D) = 0 (needs coherent weights).

    Rational weights: c*delta(A) copies of an essential minimal pair of
    rank -1/c, freely joined over A.  Coherent irrational weights: each round
    takes B of least rank gamma strictly above the zero set (so B is strong
    and every B' inside B lies in the zero set or has rank >= gamma) and
    joins on a template extension of B steered through some b* outside the
    zero set.  While the rank is at least beta the drop is the largest
    acceptable value <= min(gamma, Gr(2)); below beta the drop is gamma
    itself, built from a coherence witness, and the part outside the zero
    set shrinks every round.
    """
    ok, witness = is_coherent(spec)
    if not ok:
        raise NotCoherent("the weights are not coherent")
    A.check(spec)
    if not in_kalpha(spec, A):
        raise NotInKalpha("A is not in K_alpha")
    dA = delta(spec, A)
    rat, c = is_rational(spec)
    info: dict = {}
    if dA == 0:
        D = A
    elif rat:
        emp = essential_minimal_pair(spec, A, variant_seed=variant_seed)
        k = int(dA.a * c)
        D = join_copies(emp.result, A.universe, k, tag="y")
        info.update(copies=k, pair_size=len(emp.result))
    else:
        beta = beta_lower_bound(spec)
        gr2 = granularity(spec, 2)
        info["beta_lb"] = _w(beta)
        cur = A
        rnd = reductions = 0
        counters: list[int] = []
        while True:
            left = delta(spec, cur)
            if left == 0:
                break
            rnd += 1
            if rnd > max_rounds:
                raise ConstructionInfeasible("rank-zero loop did not finish")
            Z = zero_set(spec, cur)
            small = left < beta
            if small:
                counters.append(len(cur) - len(Z))
            gamma, Bset = _least_rank_above(spec, cur, Z)
            SB = induced(cur, Bset)
            choices = [b for b in sort_ids(Bset) if b not in Z]
            built = None
            if gamma <= gr2 and (small or gamma < left) and len(SB) >= coarse_bounds(spec).m_suff:
                pairs = (pr for _, pr in islice(_acceptable_pair_for(spec, SB, gamma, witness), 8))
                built = _steered_extension(spec, SB, pairs, choices, variant_seed)
            if built is None and small:
                raise BStarInfeasible("no steered extension of rank -gamma over the least-rank base")
            if built is None and len(SB) >= coarse_bounds(spec).m_suff:
                bound = min(gamma, gr2)
                pairs = (p for size in (12, 24) for p in _drop_pairs(spec, SB, bound, size, below=left))
                built = _steered_extension(spec, SB, islice(pairs, 12), choices, variant_seed)
            if not small:
                reductions += 1
            if built is None:
                # an essential minimal pair over B is always safe to join on
                emp = essential_minimal_pair(spec, SB, epsilon=min(gamma, gr2, left), variant_seed=variant_seed)
                built = (emp.result, None)
            ext = _relabel_private(built[0], Bset, set(cur.universe), f"r{rnd}_")
            nxt = free_join([cur, ext], Bset)
            if log is not None:
                log.append({"round": rnd, "rank": str(left), "gamma": str(gamma), "base": len(Bset),
                            "added": len(ext) - len(Bset), "outside_zero": len(cur) - len(Z)})
            cur = nxt
            if len(cur) > RESULT_CAP:
                raise ConstructionInfeasible(f"result would exceed {RESULT_CAP} vertices")
        counters.append(0)
        for x, y in zip(counters, counters[1:]):
            if not y < x:
                raise ConstructionInfeasible("part outside the zero set did not shrink")
        D = cur
        info.update(rounds=rnd, reductions=reductions, outside_zero=counters)
    if len(D) > RESULT_CAP:
        raise ConstructionInfeasible(f"result would have {len(D)} vertices")
    claims = [claim("extends", structure=A.to_json()), claim("in_kalpha"), claim("zero_rank"),
              claim("zero_set_equals", set=_ids(D.universe))]
    return Certificate("zero_extension", spec, D, frozenset(A.universe), claims, info)


# -- tents ----------------------------------------------------------------------------

def tent(spec: AlphaSpec, k: int, budget, variant_seed: int = 0) -> Certificate:
    """k relation-free base points; each pair {a, b} carries its own essential
    minimal pair with drop in (0, budget).  Singletons stay closed when
    s - C(s,2)*drop >= 1 for 2 <= s <= k, i.e. drop <= 2/k."""
    budget = Weight.from_json(budget)
    base = [f"a{i}" for i in range(1, k + 1)]
    M = FinStructure(base)
    rat, c = is_rational(spec)
    if rat:
        drop = Weight(Fraction(1, c))
        if not drop < budget:
            raise BudgetInfeasible(f"rational weights only drop by multiples of 1/{c}, not below {budget}")
        if k >= 2 and drop > Weight(Fraction(2, k)):
            raise BudgetInfeasible(f"drop 1/{c} exceeds 2/{k}: singletons would not stay closed")
        eps = None
    else:
        eps = min(budget, Weight(Fraction(2, max(k, 2))))
    parts = [M]
    claims = [claim("extends", structure=M.to_json())]
    pieces = {}
    for idx, (a, b) in enumerate(combinations(base, 2)):
        P = FinStructure([a, b])
        cert = essential_minimal_pair(spec, P, epsilon=eps, variant_seed=variant_seed + idx)
        F = _relabel_private(cert.result, {a, b}, set().union(*(set(x.universe) for x in parts)), f"f{a}{b}_")
        parts.append(F)
        pieces[(a, b)] = F
    N = union(parts)
    if len(N) > RESULT_CAP:
        raise ConstructionInfeasible(f"result would have {len(N)} vertices")
    claims += [claim("in_kalpha"), claim("rank_equals", value=_w(delta(spec, N)))]
    for a in base:
        claims.append(claim("icl_equals", set=[a], closure=[a]))
        claims.append(claim("strong", set=[a]))
    for (a, b), F in pieces.items():
        claims.append(claim("icl_contains", set=[a, b], part=_ids(F.universe)))
        lo = -budget
        claims.append(claim("rank_between", set=_ids(F.universe), over=[a, b], lo=_w(lo), hi=_w(0),
                            lo_strict=True, hi_strict=True))
    return Certificate("tent", spec, N, frozenset(base), claims,
                       {"pairs": len(pieces), "budget": _w(budget)})
