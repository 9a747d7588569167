"""Finitely supported Hahn series over Q with multiplicatively written exponents.

A series is ``sum c_g t^g`` with ``g`` a :class:`~mvf.values.Value`.  Exponents
multiply (``t^g * t^h = t^(g*h)``) and ``t^1`` is the unit monomial, so the
absolute value of a nonzero series is its *largest* exponent and the
valuation ring is ``{|x| <= 1}``.

A series may carry a precision floor ``pi``: every term with exponent below
``pi`` has been discarded.  Floors propagate through arithmetic so that no
operation reports digits it does not know.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq

from .groups import ConcreteGroup
from .values import ONE, ZERO, Value, _mul, compare, max_value

__all__ = [
    "FieldHandle",
    "HahnSeries",
    "ExponentError",
    "PrecisionError",
    "NotInValuationRing",
    "NewtonError",
    "NonSimpleRoot",
    "NonConvergence",
    "NewtonResult",
    "valuation",
    "residue",
    "res2",
    "invert",
    "newton_root",
    "newton_solve",
    "discreteness_gap",
    "eval_poly",
]

Scalar = Union[int, Fraction]

# coefficients are stored as gmpy2 rationals, which are much faster than Fraction;
# they compare and hash equal to the matching Fraction
MPQ = type(mpq())
SCALARS = (int, Fraction, MPQ)


def _frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class ExponentError(ValueError):
    """An exponent falls outside the group declared for the field."""


class PrecisionError(ArithmeticError):
    """The requested coefficient lies below a series' precision floor."""


class NotInValuationRing(ValueError):
    pass


@dataclass(frozen=True)
class FieldHandle:
    """The field Q((t^G)) for a concrete group G, optionally with roots of exponents."""

    group: ConcreteGroup
    allow_roots: bool = False

    def admits(self, v: Value) -> bool:
        return self.group.contains(v, hull=self.allow_roots)

    def check(self, exps: Iterable[Value]) -> None:
        for v in exps:
            if not self.admits(v):
                where = "divisible hull of " if self.allow_roots else ""
                raise ExponentError(f"exponent {v} is not in the {where}group {self.group}")

    def monomial(self, exponent: Value | Scalar | str = ONE, coef: Scalar = 1) -> HahnSeries:
        if not isinstance(exponent, Value):
            exponent = Value.from_rational(exponent)
        return HahnSeries({exponent: coef}, field=self)

    def constant(self, c: Scalar) -> HahnSeries:
        return HahnSeries({ONE: c}, field=self)

    def zero(self) -> HahnSeries:
        return HahnSeries({}, field=self)

    def __str__(self) -> str:
        return f"Q((t^{self.group}))" + (" with roots" if self.allow_roots else "")


def _coarser(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max_value(a, b)


class HahnSeries:
    """An immutable element of Q((t^G)), stored as ``{exponent: coefficient}``."""

    __slots__ = ("terms", "precision", "field", "_val")

    def __init__(
        self,
        terms: Mapping[Value, Scalar] | None = None,
        precision: Value | None = None,
        field: FieldHandle | None = None,
        _checked: bool = False,
    ):
        clean = {}
        for e, c in (terms or {}).items():
            if c:
                if precision is not None and compare(e, precision) < 0:
                    continue
                clean[e] = c if type(c) is MPQ else mpq(c)
        if field is not None and not _checked:
            field.check(clean)
        self.terms = clean
        self.precision = precision
        self.field = field
        self._val = None

    # constructors ---------------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar, field: FieldHandle | None = None) -> HahnSeries:
        return cls({ONE: c}, field=field)

    @classmethod
    def monomial(cls, exponent: Value, coef: Scalar = 1, field: FieldHandle | None = None) -> HahnSeries:
        return cls({exponent: coef}, field=field)

    def _make(self, terms, precision, field, checked=False) -> HahnSeries:
        return HahnSeries(terms, precision, field, _checked=checked)

    @staticmethod
    def _clean(terms: dict, precision, field) -> HahnSeries:
        # terms already hold nonzero mpq coefficients in the field; only the floor is applied
        if precision is not None:
            terms = {e: c for e, c in terms.items() if compare(e, precision) >= 0}
        out = object.__new__(HahnSeries)
        out.terms = terms
        out.precision = precision
        out.field = field
        out._val = None
        return out

    # basic queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def valuation(self):
        if self._val is None:
            v = ZERO
            for e in self.terms:
                if v is ZERO or compare(e, v) > 0:
                    v = e
            self._val = v
        return self._val

    def leading(self) -> tuple[Value, Fraction]:
        if not self.terms:
            raise ValueError("the zero series has no leading term")
        v = self.valuation()
        return v, _frac(self.terms[v])

    def coefficient(self, exponent: Value) -> Fraction:
        if self.precision is not None and compare(exponent, self.precision) < 0:
            raise PrecisionError(f"coefficient at t^({exponent}) lies below precision {self.precision}")
        return _frac(self.terms.get(exponent, 0))

    def exact(self) -> HahnSeries:
        """The same finite series with its precision floor forgotten."""
        return self._clean(self.terms, None, self.field)

    def truncate(self, floor: Value) -> HahnSeries:
        return self._clean(self.terms, _coarser(self.precision, floor), self.field)

    def sorted_terms(self) -> list[tuple[Value, Fraction]]:
        import functools

        items = sorted(self.terms.items(), key=functools.cmp_to_key(lambda a, b: compare(b[0], a[0])))
        return [(e, _frac(c)) for e, c in items]

    # arithmetic -----------------------------------------------------------

    def _field_of(self, other: HahnSeries) -> FieldHandle | None:
        if self.field is None:
            return other.field
        if other.field is not None and other.field is not self.field and other.field != self.field:
            raise ExponentError(f"series from different fields: {self.field} and {other.field}")
        return self.field

    def _coerce(self, other) -> HahnSeries | None:
        if isinstance(other, HahnSeries):
            return other
        if isinstance(other, SCALARS):
            return HahnSeries({ONE: other}, field=self.field)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        field = self._field_of(o)
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return self._clean(out, _coarser(self.precision, o.precision), field)

    __radd__ = __add__

    def __neg__(self) -> HahnSeries:
        return self._clean({e: -c for e, c in self.terms.items()}, self.precision, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, SCALARS):
            if not other:
                return self._clean({}, self.precision, self.field)
            q = mpq(other)
            return self._clean({e: c * q for e, c in self.terms.items()}, self.precision, self.field)
        if not isinstance(other, HahnSeries):
            return NotImplemented
        field = self._field_of(other)
        prec = None
        if self.precision is not None:
            prec = self.precision * max_value(ONE, other.valuation())
        if other.precision is not None:
            prec = _coarser(prec, other.precision * max_value(ONE, self.valuation()))
        if prec is ZERO:
            prec = None
        right = list(other.terms.items())
        acc: dict = {}
        get = acc.get
        for e1, q1 in self.terms.items():
            if e1 is ONE:
                for e2, q2 in right:
                    acc[e2] = get(e2, 0) + q1 * q2
                continue
            for e2, q2 in right:
                e = e1 if e2 is ONE else _mul(e1, e2)
                acc[e] = get(e, 0) + q1 * q2
        out = {e: c for e, c in acc.items() if c}
        if field is None or ((self.field is field or self.field == field) and (other.field is field or other.field == field)):
            return self._clean(out, prec, field)
        return self._make(out, prec, field)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> HahnSeries:
        if k < 0:
            raise ValueError("use invert() for negative powers")
        out = HahnSeries({ONE: 1}, field=self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, SCALARS):
            return self * (1 / mpq(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, SCALARS):
            other = HahnSeries({ONE: other})
        if not isinstance(other, HahnSeries):
            return NotImplemented
        return self.terms == other.terms and self.precision == other.precision

    def __hash__(self) -> int:
        return hash((frozenset(self.terms.items()), self.precision))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        parts = []
        for e, c in self.sorted_terms():
            mono = "" if e.is_one() else f"t^({_exp_text(e)})"
            if not mono:
                body = _coef_text(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{_coef_text(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        if self.precision is not None:
            parts.append(("+", f"O(t^({_exp_text(self.precision)}))"))
        if not parts:
            return "0"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"HahnSeries({str(self)!r})"


def _coef_text(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"({c})"


def _exp_text(e: Value) -> str:
    return str(e.to_fraction()) if e.is_rational() else str(e)


# ---------------------------------------------------------------------------
# valuation, residue, Res


def valuation(a: HahnSeries):
    return a.valuation()


def residue(a: HahnSeries) -> Fraction:
    v = a.valuation()
    if compare(v, ONE) > 0:
        raise NotInValuationRing(f"|{a}| = {v} > 1 has no residue")
    return a.coefficient(ONE)


def res2(x: HahnSeries, y: HahnSeries) -> Fraction:
    """``res(x/y)`` when ``0 < |x| <= |y|``, and 0 otherwise."""
    vx, vy = x.valuation(), y.valuation()
    if vx is ZERO or compare(vx, vy) > 0:
        return Fraction(0)
    # rescale so that |y| = 1; then an inverse good to floor 1 suffices
    m = HahnSeries({vy.inverse(): 1})
    xs, ys = (x * m).exact(), (y * m).exact()
    return residue(xs * invert(ys, ONE))


def invert(a: HahnSeries, floor: Value) -> HahnSeries:
    """Truncated inverse ``b`` with ``|a*b - 1| < floor``.

    ``a = c t^g (1 - eps)`` with ``|eps| < 1``; the geometric series in
    ``eps`` is summed until its terms fall below ``floor``.  The result keeps
    every term of ``1/a`` with exponent at least ``floor/|a|``.
    """
    if a.is_zero():
        raise ZeroDivisionError("inverse of the zero series")
    g, c = a.leading()
    lead_inv = HahnSeries({g.inverse(): 1 / c}, field=a.field)
    if a.is_monomial() and a.precision is None:
        return lead_inv
    eps = 1 - a * lead_inv
    s = HahnSeries({ONE: 1}, field=a.field)
    term = s
    while True:
        term = (term * eps).truncate(floor)
        if term.is_zero():
            break
        s = s + term.exact()
    out = (s.exact() * lead_inv).exact()
    prec = floor / g
    if a.precision is not None:
        prec = max_value(prec, a.precision / (g * g))
    return out.truncate(prec)


# ---------------------------------------------------------------------------
# polynomials with series coefficients


def _as_series(c, field: FieldHandle | None) -> HahnSeries:
    if isinstance(c, HahnSeries):
        return c
    return HahnSeries({ONE: c}, field=field)


def eval_poly(coeffs: Sequence[HahnSeries], x: HahnSeries, floor: Value | None = None) -> HahnSeries:
    """Horner evaluation of ``sum coeffs[i] X^i`` (lowest degree first)."""
    acc = _as_series(coeffs[-1], x.field)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + _as_series(c, x.field)
        if floor is not None:
            acc = acc.truncate(floor)
    return acc


def _derivative(coeffs: Sequence) -> list:
    return [c * i for i, c in enumerate(coeffs)][1:] or [0]


class NewtonError(ArithmeticError):
    pass


class NonSimpleRoot(NewtonError):
    """The seed's residue is not a simple root of the residue polynomial."""


class NonConvergence(NewtonError):
    """The residual valuation stopped decreasing."""


@dataclass(frozen=True)
class NewtonResult:
    root: HahnSeries
    residual: object  # Value or ZERO: exact |P(root)| of the returned finite series
    steps: int
    step_bound: int


def _ln(v: Value) -> float:
    return sum(float(e) * math.log(p) for p, e in v.exponents.items())


def newton_solve(
    coeffs: Sequence[HahnSeries | Scalar],
    seed: HahnSeries,
    floor: Value,
    max_steps: int | None = None,
) -> NewtonResult:
    """Hensel lifting of a simple residue root by Newton's iteration.

    Each step truncates at ``max(floor, |P(x)|^2)``, which is all the
    precision quadratic convergence can use.  The returned root satisfies
    ``|P(root)| <= floor`` unless ``max_steps`` stopped it early.
    """
    field = seed.field
    for c in coeffs:
        if isinstance(c, HahnSeries) and field is None:
            field = c.field
    coeffs = [_as_series(c, field) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValueError("newton_root needs a polynomial of degree at least 1")
    for c in coeffs:
        if compare(c.valuation(), ONE) > 0:
            raise NotInValuationRing(f"coefficient {c} lies outside the valuation ring")
    deriv = _derivative(coeffs)
    r0 = residue(seed)
    bar = [residue(c) for c in coeffs]
    p_bar = sum(c * r0**i for i, c in enumerate(bar))
    dp_bar = sum(i * c * r0 ** (i - 1) for i, c in enumerate(bar) if i)
    if p_bar:
        raise NonSimpleRoot(f"residue {r0} of the seed is not a root of the residue polynomial")
    if not dp_bar:
        raise NonSimpleRoot(f"residue {r0} is a multiple root of the residue polynomial")

    x = seed
    res = eval_poly(coeffs, x.exact())
    rho = res.valuation()
    if rho is ZERO or compare(rho, floor) <= 0:
        return NewtonResult(x, rho, 0, 0)
    step_bound = max(1, math.ceil(math.log2(_ln(floor) / _ln(rho)))) + 2
    limit = step_bound if max_steps is None else min(max_steps, step_bound)
    steps = 0
    while steps < limit:
        work = max_value(floor, rho * rho)
        d = eval_poly(deriv, x.exact(), work)
        x = (x.exact() - res * invert(d, work)).truncate(work)
        steps += 1
        res = eval_poly(coeffs, x.exact())
        new = res.valuation()
        if new is not ZERO and compare(new, rho) >= 0:
            raise NonConvergence(f"residual stalled at {new} after {steps} steps")
        rho = new
        if rho is ZERO or compare(rho, floor) <= 0:
            break
    else:
        if max_steps is None:
            raise NonConvergence(f"residual {rho} above {floor} after the bound of {step_bound} steps")
    if max_steps is None:
        assert rho is ZERO or compare(rho, floor) <= 0
    return NewtonResult(x, rho, steps, step_bound)


def newton_root(coeffs, seed: HahnSeries, floor: Value, max_steps: int | None = None) -> HahnSeries:
    return newton_solve(coeffs, seed, floor, max_steps).root


def discreteness_gap(f: FieldHandle):
    """``sup{|x| : |x| < 1}``: ZERO when trivial, the largest element below 1
    when discrete, 1 when dense."""
    g = f.group
    if g.rank == 0:
        return ZERO
    if g.rank == 1:
        b = g.basis[0]
        return b if compare(b, ONE) < 0 else b.inverse()
    return ONE
