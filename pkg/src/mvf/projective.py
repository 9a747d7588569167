"""Points of the projective line over a valued field, distance, and predicate norms.

A point is a pair ``[x : y]`` scaled by a monomial so that ``max(|x|, |y|) = 1``.
The distance of two points is ``|x1*y2 - y1*x2|``; it is an ultrametric
bounded by 1.  Coordinates may be any ring elements exposing ``valuation()``
and ordinary arithmetic with monomial Hahn series.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .hahn import HahnSeries
from .values import ONE, ZERO, Value, max_value

__all__ = [
    "PPoint",
    "distance",
    "IntPoly",
    "HomPoly",
    "homogenize",
    "predicate",
    "predicate_pairs",
]


def _monomial(v: Value) -> HahnSeries:
    return HahnSeries({v: 1})


class PPoint:
    """A normalized point ``[x : y]`` of the projective line."""

    __slots__ = ("x", "y")

    def __init__(self, x, y, normalized: bool = False):
        if not normalized:
            vx, vy = x.valuation(), y.valuation()
            if vx is ZERO and vy is ZERO:
                raise ValueError("[0 : 0] is not a point of the projective line")
            m = max_value(vx, vy)
            if not m.is_one():
                s = _monomial(m.inverse())
                x, y = x * s, y * s
        self.x = x
        self.y = y

    @classmethod
    def affine(cls, u) -> PPoint:
        """The point ``[u : 1]``."""
        return cls(u, u * 0 + 1)

    @classmethod
    def infinity(cls, like=None) -> PPoint:
        one = HahnSeries({ONE: 1}) if like is None else like * 0 + 1
        return cls(one, one * 0, normalized=True)

    @property
    def circ(self):
        return self.x

    @property
    def star(self):
        return self.y

    num = circ
    den = star

    def is_infinity(self) -> bool:
        return self.y.valuation() is ZERO

    def map(self, f) -> PPoint:
        """Apply a ring map coordinatewise; isometries keep the point normalized."""
        return PPoint(f(self.x), f(self.y))

    def key(self):
        """Exact hashable form, invariant under rescaling."""
        if self.is_infinity():
            return ("inf",)
        return ("aff", _exact(self.x), _exact(self.y))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PPoint):
            return NotImplemented
        diff = self.x * other.y - self.y * other.x
        return diff.valuation() is ZERO

    def __hash__(self) -> int:
        # normalization fixes the pair up to a residue-unit; hash only the support shape
        return hash((self.is_infinity(), self.x.valuation() if not self.is_infinity() else None))

    def __str__(self) -> str:
        if self.is_infinity():
            return "inf"
        return f"[{self.x} : {self.y}]"

    __repr__ = __str__


def _exact(c):
    return c.exact() if hasattr(c, "exact") else c


def distance(a: PPoint, b: PPoint):
    """``|a.x*b.y - a.y*b.x|``: a Value in (0, 1] or ZERO."""
    return (a.x * b.y - a.y * b.x).valuation()


# ---------------------------------------------------------------------------
# integer polynomials and their homogenization


@dataclass(frozen=True)
class IntPoly:
    """``sum c * prod X_i^e_i`` with integer coefficients; keys are exponent tuples."""

    nvars: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping[tuple[int, ...], int]) -> IntPoly:
        clean = {}
        for e, c in terms.items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has the wrong length for {nvars} variables")
            if any(k < 0 for k in e):
                raise ValueError("negative exponents are not allowed")
            if int(c) != c:
                raise ValueError("coefficients must be integers")
            if c:
                clean[tuple(e)] = clean.get(tuple(e), 0) + int(c)
        return cls(nvars, tuple(sorted((e, c) for e, c in clean.items() if c)))

    def degrees(self) -> tuple[int, ...]:
        """Per-variable degrees ``r_i``."""
        out = [0] * self.nvars
        for e, _ in self.terms:
            for i, k in enumerate(e):
                out[i] = max(out[i], k)
        return tuple(out)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: IntPoly) -> IntPoly:
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return IntPoly.from_dict(self.nvars, d)

    def __neg__(self) -> IntPoly:
        return IntPoly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: IntPoly) -> IntPoly:
        return self + (-other)

    def __mul__(self, other: IntPoly) -> IntPoly:
        d: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return IntPoly.from_dict(self.nvars, d)

    def __pow__(self, k: int) -> IntPoly:
        out = IntPoly.from_dict(self.nvars, {(0,) * self.nvars: 1})
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, values: Sequence):
        acc = None
        for e, c in self.terms:
            t = values[0] * 0 + c
            for v, k in zip(values, e):
                for _ in range(k):
                    t = t * v
            acc = t if acc is None else acc + t
        return acc if acc is not None else values[0] * 0

    def __str__(self) -> str:
        return _poly_text([(e, c) for e, c in self.terms], [f"X{i + 1}" for i in range(self.nvars)])


@dataclass(frozen=True)
class HomPoly:
    """Homogenized form: ``sum c * prod U_i^e_i V_i^(r_i - e_i)``."""

    degrees: tuple[int, ...]
    terms: tuple[tuple[tuple[int, ...], int], ...]

    def monomials(self):
        for e, c in self.terms:
            yield c, tuple(zip(e, (r - k for r, k in zip(self.degrees, e))))

    def evaluate(self, pairs: Sequence[tuple]):
        """Evaluate at coordinate pairs ``(u_i, v_i)`` without normalizing them."""
        zero = pairs[0][0] * 0
        one = zero + 1
        cache: dict = {}

        def power(i: int, which: int, k: int):
            # powers of each coordinate are shared between monomials
            key = (i, which, k)
            if key not in cache:
                base = pairs[i][which]
                cache[key] = one if k == 0 else power(i, which, k - 1) * base
            return cache[key]

        factors: dict = {}

        def factor(i: int, a: int, b: int):
            key = (i, a, b)
            if key not in factors:
                factors[key] = power(i, 0, a) * power(i, 1, b) if a and b else power(i, 0, a) if a else power(i, 1, b)
            return factors[key]

        acc = zero
        for c, powers in self.monomials():
            t = None
            for i, (a, b) in enumerate(powers):
                f = factor(i, a, b)
                t = f if t is None else t * f
            acc = acc + (t * c if t is not None else one * c)
        return acc

    def __str__(self) -> str:
        n = len(self.degrees)
        names = [f"U{i + 1}" for i in range(n)] + [f"V{i + 1}" for i in range(n)]
        rows = [(tuple(e) + tuple(r - k for r, k in zip(self.degrees, e)), c) for e, c in self.terms]
        return _poly_text(rows, names)


def _poly_text(rows, names) -> str:
    parts = []
    for e, c in rows:
        factors = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
        mono = "*".join(factors)
        body = str(abs(c)) if not mono else (mono if abs(c) == 1 else f"{abs(c)}*{mono}")
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        text += f" {s} {b}"
    return text


def homogenize(p: IntPoly) -> HomPoly:
    return HomPoly(p.degrees(), p.terms)


def predicate_pairs(p: IntPoly | HomPoly, pairs: Sequence[tuple]):
    """The predicate norm at arbitrary representatives ``(u_i, v_i)``.

    Divides out ``prod max(|u_i|, |v_i|)^r_i`` so the answer does not depend
    on the representatives chosen.
    """
    h = p if isinstance(p, HomPoly) else homogenize(p)
    if len(pairs) != len(h.degrees):
        raise ValueError(f"expected {len(h.degrees)} points, got {len(pairs)}")
    val = h.evaluate(pairs).valuation()
    if val is ZERO:
        return ZERO
    for (u, v), r in zip(pairs, h.degrees):
        if r:
            m = max_value(u.valuation(), v.valuation())
            if m is ZERO:
                raise ValueError("[0 : 0] is not a point of the projective line")
            val = val / (m ** r)
    return val


def predicate(p: IntPoly | HomPoly, points: Sequence[PPoint]):
    """``|P^h(a.x, a.y)|`` at normalized points; a Value in (0, 1] or ZERO."""
    h = p if isinstance(p, HomPoly) else homogenize(p)
    if len(points) != len(h.degrees):
        raise ValueError(f"expected {len(h.degrees)} points, got {len(points)}")
    return h.evaluate([(a.x, a.y) for a in points]).valuation()


def all_pairs(points: Sequence[PPoint]):
    return itertools.combinations(points, 2)
