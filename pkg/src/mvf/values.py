"""Exact positive reals of the form prod p**e_p with rational exponents.

These serve both as value-group elements (the valuation of a nonzero series)
and as metric distances.  The zero distance is the separate marker ``ZERO``,
which sits below every :class:`Value`.

:class:`Surd` holds rational linear combinations of values.  Formula
connectives such as ``1 - x`` leave the multiplicative group, so formula
values are carried as surds and compared exactly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Iterable, Mapping, Union

import gmpy2

__all__ = [
    "Value",
    "ZERO",
    "Zero",
    "Surd",
    "ONE",
    "compare",
    "max_value",
    "min_value",
    "from_rational",
    "parse_value",
    "is_prime",
]

Rational = Union[int, Fraction]


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n))


def _factor(n: int) -> dict[int, int]:
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


_UNSET = object()
_INTERN: dict = {}
_INTERN_LIMIT = 1 << 18


@total_ordering
class Value:
    """An element prod p**e_p of the positive reals, kept in canonical form.

    Exponents are stored as a sorted tuple of ``(prime, Fraction)`` pairs with
    no zero exponents, so structural equality is numeric equality.
    """

    __slots__ = ("_key", "_fx", "_hash", "_q")

    def __new__(cls, exponents: Mapping[int, Rational] | Iterable = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        exps = {}
        for p, e in items:
            p = int(p)
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            e = _as_fraction(e)
            if e:
                exps[p] = exps.get(p, 0) + e
        return cls._raw(tuple(sorted((p, e) for p, e in exps.items() if e)))

    @classmethod
    def _from_key(cls, key: tuple) -> Value:
        # key: sorted (prime, numerator, denominator) integer triples in lowest terms.
        # Equal values are interned so dictionary lookups succeed on identity.
        v = _INTERN.get(key)
        if v is None:
            if len(_INTERN) >= _INTERN_LIMIT:
                _INTERN.clear()
            v = object.__new__(cls)
            v._key = key
            v._fx = None
            v._hash = hash(key)
            v._q = _UNSET
            _INTERN[key] = v
        return v

    @property
    def _exps(self) -> tuple:
        if self._fx is None:
            self._fx = tuple((p, Fraction(n, d)) for p, n, d in self._key)
        return self._fx

    @property
    def _pair(self) -> tuple[int, int] | None:
        """``(numerator, denominator)`` when all exponents are integers, else None (computed once)."""
        if self._q is _UNSET:
            if all(d == 1 for _, _, d in self._key):
                num = den = 1
                for p, n, _ in self._key:
                    if n > 0:
                        num *= p**n
                    else:
                        den *= p ** (-n)
                self._q = (num, den)
            else:
                self._q = None
        return self._q

    @property
    def _rat(self) -> Fraction | None:
        q = self._pair
        return None if q is None else Fraction(*q)

    @classmethod
    def _raw(cls, exps: tuple) -> Value:
        v = cls._from_key(tuple((p, e.numerator, e.denominator) for p, e in exps))
        if v._fx is None:
            v._fx = exps
        return v

    # construction -------------------------------------------------------

    @classmethod
    def from_rational(cls, q: Rational | str) -> Value:
        q = _as_fraction(q)
        if q <= 0:
            raise ValueError(f"a Value must be positive, got {q}")
        exps = dict(_factor(q.numerator)) if q.numerator > 1 else {}
        if q.denominator > 1:
            for p, e in _factor(q.denominator).items():
                exps[p] = -e
        return cls._raw(tuple(sorted((p, Fraction(e)) for p, e in exps.items())))

    @classmethod
    def parse(cls, text: str) -> Value:
        return parse_value(text)

    # accessors ----------------------------------------------------------

    @property
    def exponents(self) -> dict[int, Fraction]:
        return dict(self._exps)

    def is_rational(self) -> bool:
        return self._rat is not None

    def to_fraction(self) -> Fraction:
        q = self._rat
        if q is None:
            raise ValueError(f"{self} is not rational")
        return q

    def is_one(self) -> bool:
        return not self._key

    def denominator_lcm(self) -> int:
        n = 1
        for _, e in self._exps:
            n = n * e.denominator // math.gcd(n, e.denominator)
        return n

    def split(self) -> tuple[Fraction, tuple]:
        """Return ``(q, rad)`` with ``self = q * prod p**f`` and each f in (0, 1)."""
        if self._rat is not None:
            return self._rat, ()
        return _split(self._exps)

    # group operations ---------------------------------------------------

    def __mul__(self, other):
        if type(other) is Value or isinstance(other, Value):
            return _mul(self, other)
        if other is ZERO:
            return ZERO
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: Value) -> Value:
        if not isinstance(other, Value):
            return NotImplemented
        return _mul(self, other.inverse())

    def inverse(self) -> Value:
        return _inverse(self)

    def __pow__(self, k: Rational) -> Value:
        k = _as_fraction(k)
        if not k:
            return ONE
        return Value._raw(tuple((p, e * k) for p, e in self._exps))

    # order --------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if isinstance(other, Value):
            return self._hash == other._hash and self._key == other._key
        return False

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other) -> bool:
        if other is ZERO:
            return False
        if not isinstance(other, Value):
            return NotImplemented
        return compare(self, other) < 0

    def __float__(self) -> float:
        if self._rat is not None:
            return float(self._rat)
        return math.exp(sum(float(e) * math.log(p) for p, e in self._exps))

    def __str__(self) -> str:
        if not self._exps:
            return "1"
        return " * ".join(f"{p}^{_fmt(e)}" for p, e in self._exps)

    def __repr__(self) -> str:
        return f"Value({str(self)!r})"

    def __reduce__(self):
        return (parse_value, (str(self),))


def _fmt(e: Fraction) -> str:
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


@lru_cache(maxsize=1 << 16)
def _mul(a: Value, b: Value) -> Value:
    ka, kb = a._key, b._key
    if not ka:
        return b
    if not kb:
        return a
    # merge two sorted (prime, num, den) tuples with integer arithmetic
    out = []
    i = j = 0
    while i < len(ka) and j < len(kb):
        pa, pb = ka[i][0], kb[j][0]
        if pa < pb:
            out.append(ka[i])
            i += 1
        elif pb < pa:
            out.append(kb[j])
            j += 1
        else:
            _, n1, d1 = ka[i]
            _, n2, d2 = kb[j]
            n, d = n1 * d2 + n2 * d1, d1 * d2
            if n:
                g = math.gcd(n, d)
                out.append((pa, n // g, d // g))
            i += 1
            j += 1
    out.extend(ka[i:])
    out.extend(kb[j:])
    return Value._from_key(tuple(out))


@lru_cache(maxsize=1 << 14)
def _inverse(a: Value) -> Value:
    return Value._from_key(tuple((p, -n, d) for p, n, d in a._key))


@lru_cache(maxsize=1 << 14)
def _split(exps: tuple) -> tuple[Fraction, tuple]:
    q = Fraction(1)
    rad = []
    for p, e in exps:
        fl = e.numerator // e.denominator
        q *= Fraction(p) ** fl
        f = e - fl
        if f:
            rad.append((p, f))
    return q, tuple(rad)


@lru_cache(maxsize=1 << 16)
def _compare(a: Value, b: Value) -> int:
    ratio = _mul(a, _inverse(b))
    if not ratio._key:
        return 0
    n = ratio.denominator_lcm()
    num = den = 1
    for p, e in ratio._exps:
        k = int(e * n)
        if k > 0:
            num *= p**k
        else:
            den *= p ** (-k)
    return (num > den) - (num < den)


def compare(a, b) -> int:
    """Exact three-way comparison of two values (either may be ``ZERO``)."""
    if a is ZERO or b is ZERO:
        return (a is not ZERO) - (b is not ZERO)
    qa, qb = a._pair, b._pair
    if qa is not None and qb is not None:
        x, y = qa[0] * qb[1], qb[0] * qa[1]
        return (x > y) - (x < y)
    return _compare(a, b)


def max_value(a, b):
    return a if compare(a, b) >= 0 else b


def min_value(a, b):
    return a if compare(a, b) <= 0 else b


def from_rational(q: Rational | str) -> Value:
    return Value.from_rational(q)


@total_ordering
class Zero:
    """The valuation of 0: below every positive value, absorbing under products."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("mvf.ZERO")

    def __lt__(self, other) -> bool:
        return isinstance(other, Value)

    def __float__(self) -> float:
        return 0.0

    def __str__(self) -> str:
        return "0"

    def __repr__(self) -> str:
        return "ZERO"

    def __reduce__(self):
        return (Zero, ())


ZERO = Zero()
ONE = Value()

_TERM = re.compile(r"^\s*(\d+)\s*\^\s*([+-]?\d+(?:\s*/\s*\d+)?)\s*$")


def parse_value(text: str) -> Value:
    """Read ``2^1/2 * 3^-1`` style products, or a plain positive rational."""
    text = text.strip()
    if not text:
        raise ValueError("empty value literal")
    if "^" not in text:
        return Value.from_rational(Fraction(text.replace(" ", "")))
    exps: dict[int, Fraction] = {}
    for part in text.split("*"):
        m = _TERM.match(part)
        if not m:
            if re.fullmatch(r"\s*\d+\s*", part):
                for p, e in _factor(int(part)).items() if int(part) > 1 else ():
                    exps[p] = exps.get(p, 0) + e
                continue
            raise ValueError(f"bad value term {part!r}")
        base = int(m.group(1))
        if base < 2:
            raise ValueError(f"base {base} has no valuation in value literal {text!r}")
        e = Fraction(m.group(2).replace(" ", ""))
        for p, k in _factor(base).items():
            exps[p] = exps.get(p, 0) + k * e
    return Value(exps)


# ---------------------------------------------------------------------------
# rational linear combinations of values


def _rad_bounds(rad: tuple, bits: int) -> tuple[int, int]:
    """Integers lo, hi with lo <= rad * 2**bits <= hi."""
    n = 1
    for _, f in rad:
        n = n * f.denominator // math.gcd(n, f.denominator)
    m = 1
    for p, f in rad:
        m *= p ** int(f * n)
    root, exact = gmpy2.iroot(gmpy2.mpz(m) << (bits * n), n)
    root = int(root)
    return root, root if exact else root + 1


class Surd:
    """A finite sum of rational multiples of values, with exact sign.

    Terms are keyed by the radical part ``prod p**f`` (0 < f < 1).  Distinct
    radicals of this shape are linearly independent over the rationals, so a
    surd is zero exactly when every coefficient is, and otherwise its sign is
    found by refining integer root bounds until they separate from zero.
    """

    __slots__ = ("_terms",)

    def __init__(self, value=0):
        if isinstance(value, dict):
            self._terms = {k: c for k, c in value.items() if c}
        elif isinstance(value, Value):
            q, rad = value.split()
            self._terms = {rad: q}
        elif value is ZERO:
            self._terms = {}
        else:
            q = _as_fraction(value)
            self._terms = {(): q} if q else {}

    @classmethod
    def coerce(cls, x) -> Surd:
        return x if isinstance(x, Surd) else cls(x)

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {()}

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self._terms.get((), Fraction(0))

    def to_value(self):
        """Back to a Value (or ZERO) when the surd is a single positive term."""
        if not self._terms:
            return ZERO
        if len(self._terms) == 1:
            (rad, c), = self._terms.items()
            if c > 0:
                return Value.from_rational(c) * Value(rad) if rad else Value.from_rational(c)
        raise ValueError(f"{self} is not a single positive value")

    def __add__(self, other):
        other = Surd.coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        other = Surd.coerce(other)
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                if not k1:
                    k, q = k2, Fraction(1)
                elif not k2:
                    k, q = k1, Fraction(1)
                else:
                    q, k = _split(_mul(Value._raw(k1), Value._raw(k2))._exps)
                out[k] = out.get(k, 0) + c1 * c2 * q
        return Surd(out)

    __rmul__ = __mul__

    def sign(self) -> int:
        terms = self._terms
        if not terms:
            return 0
        if len(terms) == 1:
            return 1 if next(iter(terms.values())) > 0 else -1
        bits = 64
        while True:
            lo = hi = Fraction(0)
            for rad, c in terms.items():
                if rad:
                    a, b = _rad_bounds(rad, bits)
                    a, b = Fraction(a, 1 << bits) * c, Fraction(b, 1 << bits) * c
                    lo += min(a, b)
                    hi += max(a, b)
                else:
                    lo += c
                    hi += c
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def _cmp(self, other) -> int:
        return (self - Surd.coerce(other)).sign()

    def __eq__(self, other) -> bool:
        try:
            other = Surd.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        total = 0.0
        for rad, c in self._terms.items():
            total += float(c) * (float(Value._raw(rad)) if rad else 1.0)
        return total

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for rad, c in sorted(self._terms.items()):
            if not rad:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"({Value._raw(rad)})")
            else:
                parts.append(f"{c}*({Value._raw(rad)})")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Surd({str(self)!r})"
