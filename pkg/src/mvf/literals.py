"""Text syntax for series, points and polynomials.

Series: ``2 + 3*t^(1/2) - t^(2^1/2 * 3^-1)``; the exponent inside ``t^(...)``
is a value literal or a positive rational.  ``X`` is the Gauss variable and
``O(t^(v))`` sets a precision floor.  Points: ``[u : v]`` or ``inf``.
Polynomials for root finding: ``[c0, c1, ...]``, lowest degree first.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .difference import GaussElement
from .hahn import FieldHandle, HahnSeries
from .projective import PPoint
from .values import ONE, Value, parse_value

__all__ = ["LiteralError", "parse_series", "parse_point", "parse_points", "parse_coeff_list", "split_top"]


class LiteralError(ValueError):
    pass


_TOK = re.compile(r"\s*(\d+|t\^\(|O\(|[tX^()*/+\-])")


def _raw_group(text: str, pos: int) -> tuple[str, int]:
    depth = 1
    start = pos
    while pos < len(text):
        ch = text[pos]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return text[start:pos], pos + 1
        pos += 1
    raise LiteralError(f"unbalanced parenthesis in {text!r}")


def _exponent(raw: str) -> Value:
    raw = raw.strip()
    try:
        return parse_value(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralError(f"bad exponent {raw!r}: {exc}") from None


class _SeriesParser:
    def __init__(self, text: str, field: FieldHandle | None, gauss: bool):
        self.text = text
        self.pos = 0
        self.field = field
        self.gauss = gauss

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self._skip()
        m = _TOK.match(self.text, self.pos)
        if not m:
            if self.pos >= len(self.text):
                return None
            raise LiteralError(f"unexpected {self.text[self.pos]!r} in series {self.text!r}")
        return m.group(1)

    def take(self, expect: str | None = None) -> str:
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise LiteralError(f"expected {expect or 'more input'} in series {self.text!r}")
        self._skip()
        self.pos += len(t)
        return t

    def one(self):
        s = HahnSeries({ONE: 1}, field=self.field)
        return GaussElement.lift(s, self.field) if self.gauss else s

    def expr(self):
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            if op == "*":
                acc = acc * self.unary()
            else:
                n = self.take()
                if not n.isdigit():
                    raise LiteralError("only division by integers is supported")
                acc = acc * Fraction(1, int(n))
        return acc

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            k = int(self.take())
            return base**k
        return base

    def atom(self):
        t = self.take()
        if t.isdigit():
            return self.one() * int(t)
        if t == "t^(":
            raw, self.pos = _raw_group(self.text, self.pos)
            s = HahnSeries({_exponent(raw): 1}, field=self.field)
            return GaussElement.lift(s, self.field) if self.gauss else s
        if t == "t":
            raise LiteralError("write monomials as t^(exponent); bare t is ambiguous")
        if t == "X":
            if not self.gauss:
                raise LiteralError("X is only available in a Gauss extension")
            return GaussElement.variable(self.field)
        if t == "O(":
            inner, self.pos = _raw_group(self.text, self.pos)
            m = re.fullmatch(r"\s*t\^\((.*)\)\s*", inner)
            if not m:
                raise LiteralError(f"precision must be written O(t^(v)), got O({inner})")
            z = HahnSeries({}, precision=_exponent(m.group(1)), field=self.field)
            return GaussElement.lift(z, self.field) if self.gauss else z
        if t == "(":
            v = self.expr()
            self.take(")")
            return v
        raise LiteralError(f"unexpected {t!r} in series {self.text!r}")


def parse_series(text: str, field: FieldHandle | None = None, gauss: bool = False):
    p = _SeriesParser(text, field, gauss)
    v = p.expr()
    if p.peek() is not None:
        raise LiteralError(f"trailing input in series {text!r}")
    return v


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def parse_point(text: str, structure) -> PPoint:
    text = text.strip()
    if text == "inf":
        return structure.infinity()
    if not (text.startswith("[") and text.endswith("]")):
        raise LiteralError(f"points are written [u : v] or inf, got {text!r}")
    parts = split_top(text[1:-1], ":")
    if len(parts) != 2:
        raise LiteralError(f"a point needs exactly two coordinates: {text!r}")
    u, v = (structure.lift(parse_series(p, structure.field, structure.gauss)) for p in parts)
    return PPoint(u, v)


def parse_points(text: str, structure) -> list[PPoint]:
    return [parse_point(p, structure) for p in split_top(text)]


def parse_coeff_list(text: str, field: FieldHandle | None = None) -> list[HahnSeries]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise LiteralError(f"coefficient lists are written [c0, c1, ...], got {text!r}")
    return [parse_series(c, field) for c in split_top(text[1:-1])]
