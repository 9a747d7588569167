"""Isometric automorphisms of Hahn fields, the Gauss extension, and axiom checks.

``K[X]`` carries the Gauss norm ``|sum c_i X^i| = max |c_i|``.  Lifting an
automorphism ``s`` of ``K`` with a unit ``a`` gives
``s~(sum c_i X^i) = sum s(c_i) a^i X^i``, so ``s~(X) / X = a``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .groups import ConcreteGroup
from .hahn import SCALARS, ExponentError, FieldHandle, HahnSeries, invert
from .projective import IntPoly, PPoint, distance, predicate
from .values import ONE, ZERO, Value, compare, max_value

__all__ = [
    "GaussElement",
    "Automorphism",
    "Identity",
    "Twist",
    "GaussLift",
    "DifferenceStructure",
    "AxiomReport",
    "Violation",
    "apply",
    "gauss_norm",
    "gauss_extend",
    "check_axioms",
]


class GaussElement:
    """A polynomial ``sum c_i X^i`` over a Hahn field, normed by its largest coefficient."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs=None, field: FieldHandle | None = None):
        clean = {}
        items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs or ())
        for i, c in items:
            if not isinstance(c, HahnSeries):
                c = HahnSeries({ONE: c}, field=field)
            if not c.is_zero() or c.precision is not None:
                clean[int(i)] = c
        self.coeffs = clean
        self.field = field

    @classmethod
    def variable(cls, field: FieldHandle | None = None) -> GaussElement:
        return cls({1: HahnSeries({ONE: 1}, field=field)}, field)

    @classmethod
    def lift(cls, c, field: FieldHandle | None = None) -> GaussElement:
        return cls({0: c}, field)

    def degree(self) -> int:
        nz = [i for i, c in self.coeffs.items() if not c.is_zero()]
        return max(nz) if nz else -1

    def valuation(self):
        v = ZERO
        for c in self.coeffs.values():
            v = max_value(v, c.valuation())
        return v

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def exact(self) -> GaussElement:
        return GaussElement({i: c.exact() for i, c in self.coeffs.items()}, self.field)

    def _coerce(self, other):
        if isinstance(other, GaussElement):
            return other
        if isinstance(other, (HahnSeries, *SCALARS)):
            return GaussElement({0: other}, self.field)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for i, c in o.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return GaussElement(out, self.field or o.field)

    __radd__ = __add__

    def __neg__(self) -> GaussElement:
        return GaussElement({i: -c for i, c in self.coeffs.items()}, self.field)

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
        if isinstance(other, (*SCALARS, HahnSeries)):
            return GaussElement({i: c * other for i, c in self.coeffs.items()}, self.field)
        if not isinstance(other, GaussElement):
            return NotImplemented
        out: dict = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                p = a * b
                out[i + j] = out[i + j] + p if i + j in out else p
        return GaussElement(out, self.field or other.field)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GaussElement:
        out = GaussElement({0: 1}, self.field)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self) -> int:
        return hash(frozenset((i, c) for i, c in self.coeffs.items() if not c.is_zero()))

    def __str__(self) -> str:
        parts = []
        for i in sorted(self.coeffs, reverse=True):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            x = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            cs = str(c)
            if not x:
                parts.append(cs)
            elif cs == "1":
                parts.append(x)
            elif cs == "-1":
                parts.append("-" + x)
            else:
                parts.append(f"({cs})*{x}")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def gauss_norm(p: GaussElement):
    return p.valuation()


# ---------------------------------------------------------------------------
# automorphisms


class Automorphism:
    """Base class; subclasses implement ``apply`` and, when exact, ``inverse``."""

    label = "sigma"

    def apply(self, x):
        raise NotImplementedError

    def inverse(self) -> Automorphism | None:
        return None

    def __call__(self, x):
        return self.apply(x)


@dataclass(frozen=True)
class Identity(Automorphism):
    label: str = "id"

    def apply(self, x):
        return x

    def inverse(self) -> Automorphism:
        return self


@dataclass(frozen=True)
class Twist(Automorphism):
    """``c t^g -> c u(g) t^g`` for a character ``u`` of the exponent lattice into Q^x."""

    group: ConcreteGroup
    values: tuple[tuple[Value, Fraction], ...]
    label: str = "twist"

    def __post_init__(self):
        given = {Value.from_rational(g) if not isinstance(g, Value) else g: Fraction(c) for g, c in self.values}
        if set(given) != set(self.group.generators):
            missing = [str(g) for g in self.group.generators if g not in given]
            raise ValueError(f"twist must assign every generator; missing {missing}")
        if any(c == 0 for c in given.values()):
            raise ValueError("twist values must be nonzero")
        gens = self.group.generators
        for rel in self.group.relations:
            prod = Fraction(1)
            for g, k in zip(gens, rel):
                prod *= given[g] ** k
            if prod != 1:
                raise ValueError(f"twist does not respect the relation {rel} among the generators")
        object.__setattr__(self, "values", tuple((g, given[g]) for g in gens))

    @classmethod
    def of(cls, group: ConcreteGroup, mapping, label: str = "twist") -> Twist:
        return cls(group, tuple(mapping.items()), label)

    def character(self, gamma: Value) -> Fraction:
        coords = self.group.coordinates(gamma)
        if coords is None:
            raise ExponentError(f"exponent {gamma} is outside the twist's lattice {self.group}")
        gens = [c for _, c in self.values]
        out = Fraction(1)
        for row, k in zip(self.group.basis_in_generators, coords):
            ub = Fraction(1)
            for u, m in zip(gens, row):
                ub *= u**m
            out *= ub ** int(k)
        return out

    def apply(self, x):
        if isinstance(x, GaussElement):
            raise TypeError("a twist acts on the base field; lift it with gauss_extend first")
        return HahnSeries(
            {e: c * self.character(e) for e, c in x.terms.items()},
            x.precision,
            x.field,
            _checked=True,
        )

    def inverse(self) -> Twist:
        return Twist(self.group, tuple((g, 1 / c) for g, c in self.values), self.label + "^-1")


@dataclass(frozen=True)
class GaussLift(Automorphism):
    base: Automorphism
    a: HahnSeries
    label: str = "gauss"

    def __post_init__(self):
        if self.a.valuation() is ZERO or not self.a.valuation().is_one():
            raise ValueError(f"the Gauss lift needs |a| = 1, got |a| = {self.a.valuation()}")

    def apply(self, x):
        if isinstance(x, HahnSeries):
            return self.base.apply(x)
        out = {}
        power = HahnSeries({ONE: 1}, field=self.a.field)
        for i in range(max(x.coeffs, default=-1) + 1):
            if i in x.coeffs:
                out[i] = self.base.apply(x.coeffs[i]) * power
            power = power * self.a
        return GaussElement(out, x.field)

    def inverse(self) -> Automorphism | None:
        binv = self.base.inverse()
        if binv is None:
            return None
        b = binv.apply(self.a)
        if not b.is_monomial() or b.precision is not None:
            return None
        return GaussLift(binv, invert(b, ONE), self.label + "^-1")

    def approximate_preimage(self, y, floor: Value):
        """``x`` with ``|s~(x) - y| < floor``, using a truncated inverse of ``a``."""
        binv = self.base.inverse()
        if binv is None:
            raise ValueError("base automorphism has no exact inverse")
        if isinstance(y, HahnSeries):
            return binv.apply(y)
        ainv = invert(binv.apply(self.a), floor).exact()
        out = {}
        power = HahnSeries({ONE: 1}, field=self.a.field)
        for i in range(max(y.coeffs, default=-1) + 1):
            if i in y.coeffs:
                out[i] = binv.apply(y.coeffs[i]) * power
            power = (power * ainv).truncate(floor).exact()
        return GaussElement(out, y.field)


def apply(sigma: Automorphism, x):
    return sigma.apply(x)


# ---------------------------------------------------------------------------
# structures


@dataclass
class DifferenceStructure:
    """A field (Hahn or Gauss) with a chosen automorphism, acting on projective points."""

    field: FieldHandle
    sigma: Automorphism
    gauss: bool = False
    name: str = "M"

    def apply_point(self, p: PPoint, k: int = 1) -> PPoint:
        if k == 0:
            return p
        f = self.sigma if k > 0 else self.sigma.inverse()
        if f is None:
            raise ValueError(f"{self.sigma.label} has no exact inverse")
        for _ in range(abs(k)):
            p = PPoint(f.apply(p.x), f.apply(p.y), normalized=True)
        return p

    def variable(self) -> GaussElement:
        if not self.gauss:
            raise ValueError("only Gauss extensions have the variable X")
        return GaussElement.variable(self.field)

    def lift(self, c):
        if self.gauss and not isinstance(c, GaussElement):
            return GaussElement.lift(c, self.field)
        return c

    def point(self, x, y) -> PPoint:
        return PPoint(self.lift(x), self.lift(y))

    def infinity(self) -> PPoint:
        return PPoint(self.lift(HahnSeries({ONE: 1}, field=self.field)), self.lift(HahnSeries({}, field=self.field)), True)

    def is_dense(self) -> bool:
        return self.field.group.rank >= 2


def gauss_extend(base: DifferenceStructure | FieldHandle, sigma: Automorphism | None = None, a: HahnSeries | None = None) -> DifferenceStructure:
    if isinstance(base, DifferenceStructure):
        field_ = base.field
        sigma = base.sigma if sigma is None else sigma
    else:
        field_ = base
    if sigma is None:
        sigma = Identity()
    if a is None:
        raise ValueError("gauss_extend needs the unit a")
    lift = GaussLift(sigma, a)
    s = DifferenceStructure(field_, lift, gauss=True, name="F")
    x = s.variable()
    assert lift.apply(x) == x * a
    return s


# ---------------------------------------------------------------------------
# axiom checks


@dataclass(frozen=True)
class Violation:
    axiom: str
    detail: str
    witness: tuple


@dataclass
class AxiomReport:
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def failed_axioms(self) -> set:
        return {v.axiom for v in self.violations}

    def summary(self) -> str:
        status = "pass" if self.passed else "fail"
        counts = ", ".join(f"{k}:{v}" for k, v in self.checked.items())
        return f"{status} ({counts}; {len(self.violations)} violations)"


def _sigma_point(structure: DifferenceStructure, sigma, p: PPoint) -> PPoint:
    return PPoint(sigma.apply(p.x), sigma.apply(p.y))


def check_axioms(
    structure: DifferenceStructure,
    sigma: Automorphism | None = None,
    polys: Sequence[IntPoly] = (),
    points: Sequence[PPoint] = (),
    samples: int = 100,
    seed: int = 0,
    floor: Value | None = None,
) -> AxiomReport:
    """Check predicate preservation, the fixed point at infinity, and surjectivity.

    Every sampled tuple of points is drawn with a seeded generator so the
    report is reproducible.  Surjectivity is certified by exhibiting an exact
    preimage; when only an approximate one exists the measured distance is
    compared against ``floor``.
    """
    sigma = structure.sigma if sigma is None else sigma
    rng = random.Random(seed)
    rep = AxiomReport()
    pts = list(points)
    if not pts:
        raise ValueError("check_axioms needs at least one sample point")

    n2 = 0
    for poly in polys:
        for _ in range(samples):
            args = [pts[rng.randrange(len(pts))] for _ in range(poly.nvars)]
            moved = [_sigma_point(structure, sigma, a) for a in args]
            before, after = predicate(poly, args), predicate(poly, moved)
            n2 += 1
            if compare(before, after) != 0:
                rep.violations.append(
                    Violation("II", f"||{poly}|| changed from {before} to {after}", tuple(args))
                )
    rep.checked["II"] = n2

    inf = structure.infinity()
    d = distance(inf, _sigma_point(structure, sigma, inf))
    rep.checked["III"] = 1
    if d is not ZERO:
        rep.violations.append(Violation("III", f"d(inf, s(inf)) = {d}", (inf,)))

    inv = sigma.inverse()
    n4 = 0
    for y in pts[:samples]:
        n4 += 1
        if inv is not None:
            x = PPoint(inv.apply(y.x), inv.apply(y.y))
            d = distance(_sigma_point(structure, sigma, x), y)
            if d is not ZERO:
                rep.violations.append(Violation("IV", f"d(s(x), y) = {d} for the inverse witness", (x, y)))
        elif isinstance(sigma, GaussLift):
            fl = floor if floor is not None else Value.from_rational(Fraction(1, 2**20))
            x = PPoint(sigma.approximate_preimage(y.x, fl), sigma.approximate_preimage(y.y, fl))
            d = distance(_sigma_point(structure, sigma, x), y)
            if d is not ZERO and compare(d, fl) > 0:
                rep.violations.append(Violation("IV", f"d(s(x), y) = {d} above {fl}", (x, y)))
        else:
            rep.violations.append(Violation("IV", "no inverse available to certify surjectivity", (y,)))
    if inv is None and isinstance(sigma, GaussLift):
        rep.notes.append("IV certified up to the truncation floor: the lift's inverse needs 1/a")
    rep.checked["IV"] = n4
    return rep
