"""Number theory of the weights: coarse bounds, granularity, continued fractions,
Diophantine solutions and the rank floor used by rank-0 constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

from .weights import AlphaSpec, Weight, is_coherent, is_rational


class RationalInput(ValueError):
    pass


class NoSolution(ValueError):
    pass


class NotCoherentIrrational(ValueError):
    pass


@dataclass(frozen=True)
class Bounds:
    m_pt: int
    m_suff: int
    ar_L: int


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def coarse_bounds(spec: AlphaSpec) -> Bounds:
    """m_pt: least m with 1 - m*alpha(E) < 0 for every E; m_suff = m_pt * max arity."""
    m_pt = 1
    for s in spec:
        m = math.floor(Weight(1) / s.alpha) + 1
        m_pt = max(m_pt, m)
    ar = spec.max_arity()
    return Bounds(m_pt, m_pt * ar, ar)


def _symbols(spec: AlphaSpec, L0) -> list[str]:
    if L0 is None:
        return list(spec.names)
    names = [n for n in spec.names if n in set(L0)]
    if not names:
        raise ValueError("empty symbol set")
    return names


def _surd_sign(p: int, q: int, d: int) -> int:
    """Sign of p + q*sqrt(d) for integers."""
    if q == 0 or d == 0:
        return (p > 0) - (p < 0)
    if p == 0 or (p > 0) == (q > 0):
        return 1 if (p > 0 or (p == 0 and q > 0)) else -1
    big = p * p > q * q * d
    return (1 if p > 0 else -1) if big else (1 if q > 0 else -1)


def _floor_scaled(p: int, q: int, d: int, L: int) -> int:
    """floor((p + q sqrt d) / L) for L > 0."""
    if q == 0 or d == 0:
        return p // L
    r = math.isqrt(q * q * d)
    return (p + (r if q > 0 else -r - 1)) // L


def granularity(spec: AlphaSpec, m: int, L0: Iterable[str] | None = None) -> Weight:
    """Least positive value of sum alpha(E) n_E - k over 0 < k < m and n_E >= 0.

    The minimum never exceeds 1, so sums above m cannot attain it and the
    search is over count vectors of weight at most m.  The scan runs on
    integer pairs (p, q) meaning (p + q sqrt d) / L.
    """
    if m < 2:
        raise ValueError("granularity needs m >= 2")
    names = _symbols(spec, L0)
    L, scaled = spec.scaled()
    d = spec.d
    steps = [scaled[n] for n in names]
    best = None

    def visit(p, q):
        nonlocal best
        if q == 0 or d == 0:
            k = min(m - 1, (p - 1) // L)       # ceil(s) - 1 for rational s
        else:
            k = min(m - 1, _floor_scaled(p, q, d, L))
        if k < 1:
            return
        vp = p - k * L
        if best is None or _surd_sign(vp - best[0], q - best[1], d) < 0:
            best = (vp, q)

    def rec(i, p, q):
        if i == len(steps):
            visit(p, q)
            return
        sp, sq = steps[i]
        while _surd_sign(m * L - p, -q, d) >= 0:
            rec(i + 1, p, q)
            p += sp
            q += sq

    rec(0, 0, 0)
    if best is None:
        return None
    return Weight(Fraction(best[0], L), Fraction(best[1], L), d)


def partial_quotients(x: Weight) -> Iterator[int]:
    """Partial quotients a0, a1, ... of a quadratic irrational (endless stream)."""
    x = Weight.of(x)
    if x.is_rational:
        raise RationalInput(f"{x} is rational")
    # write x = (P + sqrt D) / Q with Q | D - P^2
    den = math.lcm(x.a.denominator, x.b.denominator)
    P = int(x.a * den)
    c = int(x.b * den)
    Q = den
    D = c * c * x.d
    if c < 0:
        P, Q = -P, -Q
    if (D - P * P) % Q:
        P, Q, D = P * abs(Q), Q * abs(Q), D * Q * Q
    r = math.isqrt(D)
    while True:
        # floor((P + sqrt D)/Q); sqrt D is irrational so r + 1 handles Q < 0
        a = (P + r) // Q if Q > 0 else (P + r + 1) // Q
        yield a
        P = a * Q - P
        Q = (D - P * P) // Q


def cf_expansion(x: Weight, k: int) -> list[int]:
    """[a0; a1, ..., ak]."""
    it = partial_quotients(x)
    return [next(it) for _ in range(k + 1)]


def cf_convergents(x, k: int, start: int = 1) -> list[Convergent]:
    """Convergents p_i/q_i of x for index i = start..k, with p_0/q_0 = a_0/1."""
    a = cf_expansion(Weight.of(x), k)
    out = []
    p0, q0, p1, q1 = 1, 0, a[0], 1
    if start <= 0:
        out.append(Convergent(p1, q1, 0))
    for i in range(1, k + 1):
        p0, q0, p1, q1 = p1, q1, a[i] * p1 + p0, a[i] * q1 + q0
        if i >= start:
            out.append(Convergent(p1, q1, i))
    return out


def lower_approximations(x) -> Iterator[tuple[int, int]]:
    """Fractions p/q below x, increasing in q, each strictly closer than the last.

    The even convergents together with the intermediate fractions between
    consecutive ones; q*x - p decreases strictly along the stream.
    """
    it = partial_quotients(Weight.of(x))
    a = [next(it), next(it)]
    pe, qe = a[0], 1                     # even convergent
    po, qo = a[1] * a[0] + 1, a[1]       # the odd convergent after it
    yield pe, qe
    while True:
        nxt = next(it)
        for j in range(1, nxt + 1):
            yield pe + j * po, qe + j * qo
        pe, qe = pe + nxt * po, qe + nxt * qo
        a_odd = next(it)
        po, qo = a_odd * pe + po, a_odd * qe + qo


def _rational_form(spec: AlphaSpec, names: list[str]) -> tuple[int, dict[str, int]]:
    ok, _ = is_rational(spec)
    if not ok:
        raise NoSolution("Diophantine form needs rational weights")
    c = 1
    for n in names:
        c = math.lcm(c, spec.alpha(n).a.denominator)
    return c, {n: int(spec.alpha(n).a * c) for n in names}


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _max_count(coins: list[int], total: int) -> list[int] | None:
    """Counts, each at least one, with sum coins[i]*k_i == total and sum k_i maximal."""
    base = sum(coins)
    rest = total - base
    if rest < 0:
        return None
    NEG = -1
    best = [NEG] * (rest + 1)
    choice = [-1] * (rest + 1)
    best[0] = 0
    for r in range(1, rest + 1):
        for i, c in enumerate(coins):
            if c <= r and best[r - c] != NEG and best[r - c] + 1 > best[r]:
                best[r] = best[r - c] + 1
                choice[r] = i
    if best[rest] == NEG:
        return None
    ks = [1] * len(coins)
    r = rest
    while r:
        i = choice[r]
        ks[i] += 1
        r -= coins[i]
    return ks


def solve_diophantine(spec: AlphaSpec, target, min_n: int = 1, symbols: Iterable[str] | None = None,
                      max_n: int | None = None) -> Iterator[tuple[int, dict[str, int]]]:
    """Stream (n, m) with n - sum alpha(E) m_E = target, n >= min_n and every m_E > 0.

    Denominators are cleared to c*n - sum beta_E m_E = c*target with integer
    beta.  The extended gcd fixes the residue class of admissible n; for each
    admissible n the counts maximise sum m_E (ties: lexicographically least
    in signature order).  One solution per admissible n, in increasing n.
    """
    names = _symbols(spec, symbols)
    c, beta = _rational_form(spec, names)
    t = Fraction(target) * c
    if t.denominator != 1:
        raise NoSolution(f"target {target} is not a multiple of 1/{c}")
    t = int(t)
    g = 0
    for n_ in names:
        g = math.gcd(g, beta[n_])
    # c*n = t (mod g)
    g2, u, _ = _ext_gcd(c % g if g else 0, g)
    if g == 1:
        n0, step = 0, 1
    else:
        if t % g2:
            raise NoSolution("no admissible n: gcd obstruction")
        step = g // g2
        n0 = (u * (t // g2)) % step
    coins = [beta[n_] for n_ in names]
    n = max(min_n, 1)
    n += (n0 - n) % step
    misses = 0
    while max_n is None or n <= max_n:
        ks = _max_count(coins, c * n - t)
        if ks is None:
            misses += 1
            if misses > 10000:
                raise NoSolution("no positive solutions found")
        else:
            misses = 0
            yield n, dict(zip(names, ks))
        n += step


def beta_lower_bound(spec: AlphaSpec, exact: bool = False, max_size: int = 4) -> Weight:
    """Positive lower bound for the least positive rank of small structures.

    min of Gr(2) and every positive n - sum m_E alpha(E) with 1 <= n < m_suff and
    0 <= m_E <= C(n, arity(E)).  With exact=True the minimum runs over actual
    structures of size <= max_size in K_alpha (a true minimum only once
    max_size >= m_suff - 1).
    """
    ok, _ = is_coherent(spec)
    rat, _ = is_rational(spec)
    if not ok or rat:
        raise NotCoherentIrrational("needs a coherent signature with an irrational weight")
    best = granularity(spec, 2)
    if exact:
        from .rank import delta, in_kalpha
        for n in range(1, max_size + 1):
            for S in _all_structures(spec, n):
                v = delta(spec, S)
                if v > 0 and v < best and in_kalpha(spec, S):
                    best = v
        return best
    m_suff = coarse_bounds(spec).m_suff
    names = list(spec.names)
    for n in range(1, m_suff):
        caps = [math.comb(n, spec.arity(e)) for e in names]
        for ms in product(*(range(k + 1) for k in caps)):
            v = Weight(n)
            for e, k in zip(names, ms):
                if k:
                    v = v - spec.alpha(e) * k
            if v > 0 and v < best:
                best = v
    return best


def _all_structures(spec: AlphaSpec, n: int):
    from itertools import combinations
    from .structures import FinStructure
    V = [f"x{i}" for i in range(n)]
    slots = [(e, t) for e in spec.names for t in combinations(V, spec.arity(e))]
    for bits in product((0, 1), repeat=len(slots)):
        rels: dict[str, list] = {}
        for b, (e, t) in zip(bits, slots):
            if b:
                rels.setdefault(e, []).append(t)
        yield FinStructure(V, rels)
