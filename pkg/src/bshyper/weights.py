"""Exact edge weights and rank values in Q(sqrt d).

A weight is a + b*sqrt(d) with rational a, b and a square-free integer d > 1.
Rational weights carry d = 0.  All comparisons are decided exactly.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Mapping

import numpy as np


class MixedSurdBase(ValueError):
    pass


class SignatureError(ValueError):
    pass


@lru_cache(maxsize=None)
def _is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _floor_sqrt_mul(q: int, d: int) -> int:
    """floor(q * sqrt(d)) for integer q and square-free d > 1."""
    r = math.isqrt(q * q * d)
    if q >= 0:
        return r
    # q*q*d is never a perfect square here, so -r is not attained
    return -r - 1


def _sign(a: Fraction, b: Fraction, d: int) -> int:
    """Sign of a + b sqrt(d)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: compare a^2 with b^2 d
    big = a * a > b * b * d
    return (1 if a > 0 else -1) if big else (1 if b > 0 else -1)


def _make(a: Fraction, b: Fraction, d: int) -> "Weight":
    """Trusted constructor for results of field arithmetic (no re-validation)."""
    w = object.__new__(Weight)
    object.__setattr__(w, "a", a)
    object.__setattr__(w, "b", b)
    object.__setattr__(w, "d", d if b else 0)
    return w


@total_ordering
class Weight:
    """An element a + b*sqrt(d) of a real quadratic field (or of Q when b = 0)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if b == 0:
            d = 0
        elif d == 1:
            a, b, d = a + b, Fraction(0), 0
        elif not _is_squarefree(d):
            raise ValueError(f"surd base {d} is not square-free")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("Weight is immutable")

    @classmethod
    def of(cls, x) -> "Weight":
        if isinstance(x, Weight):
            return x
        return cls(Fraction(x))

    @classmethod
    def sqrt(cls, d: int, coeff=1) -> "Weight":
        """coeff * sqrt(d), pulling out square factors of d."""
        d = int(d)
        if d < 0:
            raise ValueError("negative radicand")
        k = 1
        f = 2
        while f * f <= d:
            while d % (f * f) == 0:
                d //= f * f
                k *= f
            f += 1
        return cls(0, Fraction(coeff) * k, d)

    # -- structure ---------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def _base(self, other: "Weight") -> int:
        if self.d and other.d and self.d != other.d:
            raise MixedSurdBase(f"cannot combine sqrt({self.d}) with sqrt({other.d})")
        return self.d or other.d

    def conjugate(self) -> "Weight":
        return Weight(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def sign(self) -> int:
        return _sign(self.a, self.b, self.d)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Weight):
            if isinstance(other, (int, Fraction)):
                return _make(self.a + other, self.b, self.d)
            return NotImplemented
        d = self._base(other)
        return _make(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return _make(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Weight):
            if isinstance(other, (int, Fraction)):
                return _make(self.a - other, self.b, self.d)
            return NotImplemented
        d = self._base(other)
        return _make(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return Weight.of(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Weight(self.a * other, self.b * other, self.d)
        if not isinstance(other, Weight):
            return NotImplemented
        d = self._base(other)
        return Weight(self.a * other.a + self.b * other.b * d,
                      self.a * other.b + self.b * other.a, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero weight")
            return Weight(self.a / other, self.b / other, self.d)
        if not isinstance(other, Weight):
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by zero weight")
        self._base(other)
        return self * other.conjugate() / other.norm()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return Weight.of(other) / self

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        den = math.lcm(self.a.denominator, self.b.denominator)
        p = self.a.numerator * (den // self.a.denominator)
        q = self.b.numerator * (den // self.b.denominator)
        # floor((p + q sqrt d)/den) == floor((p + floor(q sqrt d))/den)
        return (p + _floor_sqrt_mul(q, self.d)) // den

    def __ceil__(self) -> int:
        return -math.floor(-self)

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, Weight):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __lt__(self, other):
        if isinstance(other, Weight):
            d = self._base(other)
            return _sign(self.a - other.a, self.b - other.b, d) < 0
        if isinstance(other, (int, Fraction)):
            return _sign(self.a - other, self.b, self.d) < 0
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Weight({self})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        surd = f"sqrt({self.d})" if self.b == 1 else f"{self.b}*sqrt({self.d})"
        if self.a == 0:
            return surd if self.b != -1 else f"-sqrt({self.d})"
        sign = "+" if self.b > 0 else "-"
        mag = -self.b if self.b < 0 else self.b
        surd = f"sqrt({self.d})" if mag == 1 else f"{mag}*sqrt({self.d})"
        return f"{self.a} {sign} {surd}"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.b == 0:
            return {"num": self.a.numerator, "den": self.a.denominator}
        return {"a": _frac_json(self.a), "b": _frac_json(self.b), "d": self.d}

    @classmethod
    def from_json(cls, obj) -> "Weight":
        if isinstance(obj, Weight):
            return obj
        if isinstance(obj, (int, Fraction)):
            return cls(obj)
        if isinstance(obj, str):
            return parse_weight(obj)
        if isinstance(obj, Mapping):
            if "num" in obj:
                return cls(Fraction(int(obj["num"]), int(obj.get("den", 1))))
            if "d" in obj:
                return cls(_frac_from(obj.get("a", 0)), _frac_from(obj.get("b", 0)), int(obj["d"]))
        raise ValueError(f"unreadable weight: {obj!r}")


def _frac_json(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _frac_from(x) -> Fraction:
    if isinstance(x, Mapping):
        return Fraction(int(x["num"]), int(x.get("den", 1)))
    return Fraction(x)


_TERM = re.compile(r"\s*([+-]?)\s*([0-9/]*)\s*(\*?\s*sqrt\(\s*(\d+)\s*\))?\s*(/\s*\d+)?")


def parse_weight(text: str) -> Weight:
    """Parse forms like '1/2', 'sqrt(2)/2', '1 - sqrt(2)/2', '3/4*sqrt(5)'."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty weight")
    total = Weight(0)
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unreadable weight: {text!r}")
        sign, coeff, surd, radicand, div = m.groups()
        if not coeff and not surd:
            raise ValueError(f"unreadable weight: {text!r}")
        c = Fraction(coeff) if coeff else Fraction(1)
        if div:
            c /= int(div[1:])
        if sign == "-":
            c = -c
        total = total + (Weight.sqrt(int(radicand), c) if surd else Weight(c))
        pos = m.end()
    return total


def weight_compare(x, y) -> str:
    """'LT', 'EQ' or 'GT' for x against y."""
    s = (Weight.of(x) - Weight.of(y)).sign()
    return "LT" if s < 0 else ("GT" if s > 0 else "EQ")


# -- vectorized exact signs -------------------------------------------------

_SAFE = 1 << 30


def surd_sign(p, q, d: int):
    """Exact sign of p + q*sqrt(d) for integer arrays p, q."""
    p = np.asarray(p)
    q = np.asarray(q)
    sp = np.sign(p)
    if d == 0 or not q.any():
        return sp
    sq = np.sign(q)
    if p.dtype != object and (np.abs(p).max(initial=0) >= _SAFE or np.abs(q).max(initial=0) * math.isqrt(d) >= _SAFE):
        p = p.astype(object)
        q = q.astype(object)
    cmp = np.sign(p * p - q * q * d)
    # opposite signs: whichever side has the bigger square wins
    mixed = np.where(cmp > 0, sp, sq)
    out = np.where(sq == 0, sp, np.where(sp == 0, sq, np.where(sp == sq, sp, mixed)))
    return out.astype(np.int64) if out.dtype == object else out


# -- signatures ---------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    alpha: Weight


class AlphaSpec:
    """A finite relational signature with a weight in (0, 1] for each symbol."""

    def __init__(self, symbols: Iterable[Symbol | tuple]):
        syms = []
        for s in symbols:
            if not isinstance(s, Symbol):
                name, arity, alpha = s
                s = Symbol(str(name), int(arity), Weight.from_json(alpha))
            syms.append(s)
        if not syms:
            raise SignatureError("empty signature")
        names = [s.name for s in syms]
        if len(set(names)) != len(names):
            raise SignatureError("duplicate symbol names")
        bases = {s.alpha.d for s in syms if s.alpha.d}
        if len(bases) > 1:
            raise MixedSurdBase(f"weights use several surd bases: {sorted(bases)}")
        for s in syms:
            if s.arity < 2:
                raise SignatureError(f"symbol {s.name} has arity {s.arity} < 2")
            if not (Weight(0) < s.alpha <= Weight(1)):
                raise SignatureError(f"weight of {s.name} is outside (0, 1]")
        if all(s.arity == 2 and s.alpha == 1 for s in syms):
            raise SignatureError("all-binary signature with every weight 1 is excluded")
        self.symbols = tuple(syms)
        self.d = bases.pop() if bases else 0
        self._by_name = {s.name: s for s in syms}

    @classmethod
    def of(cls, mapping: Mapping, arity: int = 2) -> "AlphaSpec":
        """Shorthand: {'E': '1/2'} or {'E': ('1/2', 3)}."""
        syms = []
        for name, val in mapping.items():
            if isinstance(val, tuple):
                syms.append(Symbol(name, int(val[1]), Weight.from_json(val[0])))
            else:
                syms.append(Symbol(name, arity, Weight.from_json(val)))
        return cls(syms)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name):
        return name in self._by_name

    def __eq__(self, other):
        return isinstance(other, AlphaSpec) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        inner = ", ".join(f"{s.name}/{s.arity}: {s.alpha}" for s in self.symbols)
        return f"AlphaSpec({inner})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def symbol(self, name: str) -> Symbol:
        return self._by_name[name]

    def alpha(self, name: str) -> Weight:
        return self._by_name[name].alpha

    def arity(self, name: str) -> int:
        return self._by_name[name].arity

    def max_arity(self, names: Iterable[str] | None = None) -> int:
        names = self.names if names is None else names
        return max(self._by_name[n].arity for n in names)

    def scaled(self) -> tuple[int, dict[str, tuple[int, int]]]:
        """Common denominator L and integer pairs (P, Q) with alpha = (P + Q sqrt d)/L."""
        L = 1
        for s in self.symbols:
            L = math.lcm(L, s.alpha.a.denominator, s.alpha.b.denominator)
        out = {}
        for s in self.symbols:
            out[s.name] = (int(s.alpha.a * L), int(s.alpha.b * L))
        return L, out

    def to_json(self) -> dict:
        return {"symbols": [{"name": s.name, "arity": s.arity, "alpha": s.alpha.to_json()}
                            for s in self.symbols]}

    @classmethod
    def from_json(cls, obj) -> "AlphaSpec":
        if isinstance(obj, Mapping) and "symbols" in obj:
            items = obj["symbols"]
        elif isinstance(obj, list):
            items = obj
        else:
            raise SignatureError("signature JSON needs a 'symbols' list")
        syms = []
        for it in items:
            try:
                syms.append(Symbol(str(it["name"]), int(it.get("arity", 2)), Weight.from_json(it["alpha"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise SignatureError(f"bad symbol entry {it!r}: {exc}") from exc
        return cls(syms)


def is_rational(spec: AlphaSpec) -> tuple[bool, int | None]:
    """Whether every weight is rational, with the lcm c of the reduced denominators."""
    if any(not s.alpha.is_rational for s in spec):
        return False, None
    c = 1
    for s in spec:
        c = math.lcm(c, s.alpha.a.denominator)
    return True, c


def is_coherent(spec: AlphaSpec) -> tuple[bool, dict[str, int] | None]:
    """Whether some positive integer combination of the weights is rational.

    The witness maps each symbol to a positive integer multiplier.
    """
    pos = [s for s in spec if s.alpha.b > 0]
    neg = [s for s in spec if s.alpha.b < 0]
    if pos and not neg or neg and not pos:
        return False, None
    if not pos:
        return True, {s.name: 1 for s in spec}
    sp = sum(s.alpha.b for s in pos)
    sn = -sum(s.alpha.b for s in neg)
    # every positive symbol gets sn, every negative one sp: the surd parts cancel
    raw = {}
    for s in spec:
        raw[s.name] = sn if s.alpha.b > 0 else (sp if s.alpha.b < 0 else Fraction(1))
    den = 1
    for v in raw.values():
        den = math.lcm(den, v.denominator)
    ints = {k: int(v * den) for k, v in raw.items()}
    # scale zero-surd symbols to keep them positive but small
    g = 0
    for v in ints.values():
        g = math.gcd(g, v)
    return True, {k: v // g for k, v in ints.items()}


def combination(spec: AlphaSpec, counts: Mapping[str, int]) -> Weight:
    """sum of counts[E] * alpha(E)."""
    total = Weight(0)
    for name, k in counts.items():
        if k:
            total = total + spec.alpha(name) * k
    return total
