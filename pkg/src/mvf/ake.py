"""Symbolic classification of dense metric valued fields up to elementary equivalence.

Field theories are expressions over a closed catalog of base theories and
Hahn layers ``hahn(l, G)``.  Every decision returns yes, no or unknown, and
only answers backed by a catalogued fact are decisive.

Facts used:

* AKE: ``l((t^G)) == l'((t^G'))`` whenever ``l == l'`` and ``G == G'``.
* Divisible absorption: ``k((t^G)) == k((t^G))((t^R+))`` for regular
  nontrivial ``G``.
* For dense regular ``G, G'``: ``k((t^G)) == k'((t^G'))`` iff ``G == G'``
  and ``k == k'``, or ``k' == k((t^G))`` with ``G'`` divisible, or the mirror
  case.
* Largeness, algebraic and real closedness, formal reality and PAC are
  first-order, so a known disagreement in any of them separates theories.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union

from .groups import GroupKind, GroupTheory, R_PLUS, equiv_groups, is_divisible
from .values import compare

__all__ = [
    "Verdict",
    "Flags",
    "Base",
    "Hahn",
    "ACF0",
    "RCF",
    "padic_closed",
    "laurent_over",
    "number_field",
    "PSEUDOFINITE",
    "custom",
    "Q",
    "canonicalize",
    "equiv_fields",
    "is_generating_pair",
    "MVFDescriptor",
    "ClassDescriptor",
    "class_of",
    "same_class",
    "equivalent",
    "residue_shift",
    "lring_equiv",
    "VerdictConflict",
    "MixedDensity",
    "flags_of",
]


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def of(cls, b: bool | None) -> Verdict:
        if b is None:
            return cls.UNKNOWN
        return cls.YES if b else cls.NO

    def __and__(self, other: Verdict) -> Verdict:
        if Verdict.NO in (self, other):
            return Verdict.NO
        if self is Verdict.YES and other is Verdict.YES:
            return Verdict.YES
        return Verdict.UNKNOWN

    def __or__(self, other: Verdict) -> Verdict:
        if Verdict.YES in (self, other):
            return Verdict.YES
        if self is Verdict.NO and other is Verdict.NO:
            return Verdict.NO
        return Verdict.UNKNOWN

    @property
    def decisive(self) -> bool:
        return self is not Verdict.UNKNOWN


Tri = Union[bool, None]


@dataclass(frozen=True)
class Flags:
    """First-order properties of a field theory; ``None`` means unknown.

    ``fixed_point``: ``l == l((t^R+))``.  ``generating``: ``(R+, l)`` is a
    generating pair.
    """

    large: Tri = None
    ac: Tri = None
    rc: Tri = None
    formally_real: Tri = None
    pac: Tri = None
    fixed_point: Tri = None
    generating: Tri = None

    SEPARATING = ("large", "ac", "rc", "formally_real", "pac")


@dataclass(frozen=True)
class Base:
    tag: str
    params: tuple = ()
    flags: Flags = field(default_factory=Flags, compare=False)

    def __str__(self) -> str:
        if self.tag == "padic":
            return f"padic({self.params[0]})"
        if self.tag == "laurent":
            return f"laurent({self.params[0]})"
        if self.tag == "numberfield":
            return str(self.params[0])
        return self.tag


@dataclass(frozen=True)
class Hahn:
    inner: Union[Base, "Hahn"]
    group: GroupTheory

    def __post_init__(self):
        if self.group.kind is GroupKind.TRIVIAL:
            raise ValueError("Hahn layers need a nontrivial value group")

    def __str__(self) -> str:
        return f"hahn({self.inner}, {self.group})"


Expr = Union[Base, Hahn]

ACF0 = Base("ACF0", (), Flags(True, True, False, False, True, True, True))
RCF = Base("RCF", (), Flags(True, False, True, True, False, True, True))
PSEUDOFINITE = Base("PF", (), Flags(True, False, False, False, True, False, True))


def padic_closed(p: int) -> Base:
    return Base("padic", (int(p),), Flags(True, False, False, False, False, True, True))


def laurent_over(k: Expr) -> Base:
    return Base("laurent", (k,), Flags(True, False, False, flags_of(k).formally_real, False, True, True))


def number_field(name: str = "Q") -> Base:
    # Q is formally real; other named number fields may or may not be
    real = True if name == "Q" else None
    return Base("numberfield", (name,), Flags(False, False, False, real, False, False, True))


Q = number_field("Q")


def custom(name: str, **flags: Tri) -> Base:
    return Base(name, ("custom",), Flags(**flags))


def flags_of(e: Expr) -> Flags:
    if isinstance(e, Base):
        return e.flags
    inner = flags_of(e.inner)
    div = is_divisible(e.group)

    def closed(x: Tri) -> Tri:
        if x is False or not div:
            return False
        return True if x else None

    ac = closed(inner.ac)
    return Flags(
        large=True,
        ac=ac,
        rc=closed(inner.rc),
        formally_real=inner.formally_real,
        # a henselian nontrivially valued field is PAC only when separably closed
        pac=ac,
        fixed_point=True,
        generating=None,
    )


# ---------------------------------------------------------------------------
# canonical forms


def canonicalize(e: Expr, trace: list | None = None) -> Expr:
    """Apply absorption rewrites bottom-up until nothing changes.

    R1: ``hahn(hahn(l, G), D) -> hahn(l, G)`` for divisible dense ``D``.
    R2: ``hahn(b, D) -> b`` for a base ``b`` known to be a fixed point.
    """
    if isinstance(e, Base):
        if e.tag == "laurent":
            inner = canonicalize(e.params[0], trace)
            if inner != e.params[0]:
                return laurent_over(inner)
        return e
    inner = canonicalize(e.inner, trace)
    out = Hahn(inner, e.group)
    if e.group.is_dense and is_divisible(e.group):
        if isinstance(inner, Hahn):
            if trace is not None:
                trace.append(f"R1: {out} -> {inner}")
            return inner
        if inner.flags.fixed_point is True:
            if trace is not None:
                trace.append(f"R2: {out} -> {inner}")
            return inner
    return out


def _size(e: Expr) -> int:
    if isinstance(e, Hahn):
        return 1 + _size(e.inner)
    if e.tag == "laurent":
        return 1 + _size(e.params[0])
    return 1


def _same(a: Expr, b: Expr) -> bool:
    if isinstance(a, Base) and isinstance(b, Base):
        return a == b
    if isinstance(a, Hahn) and isinstance(b, Hahn):
        return equiv_groups(a.group, b.group) and _same(a.inner, b.inner)
    return False


def _flag_conflict(a: Expr, b: Expr) -> str | None:
    fa, fb = flags_of(a), flags_of(b)
    for name in Flags.SEPARATING:
        x, y = getattr(fa, name), getattr(fb, name)
        if x is not None and y is not None and x != y:
            return name
    return None


def equiv_fields(a: Expr, b: Expr, trace: list | None = None) -> Verdict:
    """Is ``a == b`` in the ring language?"""
    a, b = canonicalize(a, trace), canonicalize(b, trace)
    return _equiv(a, b, trace)


def _note(trace, msg):
    if trace is not None:
        trace.append(msg)


def _equiv(a: Expr, b: Expr, trace) -> Verdict:
    if _same(a, b):
        _note(trace, f"{a} and {b} coincide")
        return Verdict.YES
    flag = _flag_conflict(a, b)
    if flag:
        _note(trace, f"{a} and {b} differ in '{flag}'")
        return Verdict.NO
    if isinstance(a, Base) and isinstance(b, Base):
        return _equiv_bases(a, b, trace)
    if isinstance(a, Base):
        a, b = b, a
    if isinstance(b, Base):
        return _equiv_hahn_base(a, b, trace)
    return _equiv_hahn_hahn(a, b, trace)


def _equiv_bases(a: Base, b: Base, trace) -> Verdict:
    if a.tag == b.tag == "padic":
        _note(trace, f"p-adically closed fields for different primes: {a} vs {b}")
        return Verdict.NO
    if a.tag == b.tag == "laurent":
        v = _equiv(canonicalize(a.params[0]), canonicalize(b.params[0]), trace)
        if v is Verdict.YES:
            _note(trace, f"AKE: {a} == {b} from equal residue theories")
            return v
    _note(trace, f"no catalog fact relates {a} and {b}")
    return Verdict.UNKNOWN


def _equiv_hahn_base(h: Hahn, b: Base, trace) -> Verdict:
    g, l = h.group, h.inner
    gen = b.flags.generating
    if not g.is_dense:
        _note(trace, f"{h} has a discrete value group; no dense-case rule applies to {b}")
        return Verdict.UNKNOWN
    if not is_divisible(g):
        if gen is True:
            _note(trace, f"(R+, {b}) is generating, so {b} is no Hahn field over a non-divisible group")
            return Verdict.NO
        return Verdict.UNKNOWN
    # hahn(l, D) with D divisible
    v = _equiv(l, b, trace)
    if v is Verdict.YES:
        fp = b.flags.fixed_point
        _note(trace, f"{h} == hahn({b}, R+), which equals {b} iff it is a fixed point ({Verdict.of(fp)})")
        return Verdict.of(fp)
    if v is Verdict.NO and gen is True:
        _note(trace, f"(R+, {b}) is generating and {l} differs from {b}")
        return Verdict.NO
    return Verdict.UNKNOWN


def _equiv_hahn_hahn(a: Hahn, b: Hahn, trace) -> Verdict:
    g1, g2 = a.group, b.group
    if not (g1.is_dense and g2.is_dense):
        if equiv_groups(g1, g2) and _equiv(a.inner, b.inner, None) is Verdict.YES:
            _note(trace, f"AKE: {a} == {b}")
            return Verdict.YES
        _note(trace, f"discrete layers: only the AKE direction is available for {a} vs {b}")
        return Verdict.UNKNOWN
    case1 = Verdict.of(equiv_groups(g1, g2)) & _equiv(a.inner, b.inner, None)
    case2 = Verdict.of(is_divisible(g2))
    if case2 is Verdict.YES:
        case2 = case2 & _equiv(b.inner, a, None)
    case3 = Verdict.of(is_divisible(g1))
    if case3 is Verdict.YES:
        case3 = case3 & _equiv(a.inner, b, None)
    out = case1 | case2 | case3
    _note(trace, f"simplification cases for {a} vs {b}: (i) {case1}, (ii) {case2}, (iii) {case3} -> {out}")
    return out


# ---------------------------------------------------------------------------
# generating pairs and classes


def _require_dense(g: GroupTheory) -> None:
    if not g.is_dense:
        raise ValueError(f"expected a dense group theory, got {g}")


def is_generating_pair(delta: GroupTheory, l: Expr, trace: list | None = None) -> Verdict:
    _require_dense(delta)
    if not is_divisible(delta):
        _note(trace, f"{delta} is not divisible")
        return Verdict.YES
    c = canonicalize(l, trace)
    if isinstance(c, Hahn):
        if c.group.is_dense and not is_divisible(c.group):
            _note(trace, f"{l} decomposes as {c} over the non-divisible {c.group}")
            return Verdict.NO
        if c.group.is_dense:
            v = _equiv(c.inner, c, None)
            if v is Verdict.NO:
                _note(trace, f"{l} decomposes as {c} with inner theory not equivalent to it")
                return Verdict.NO
            return Verdict.UNKNOWN
        # discrete layer: behaves like a Laurent series field
        _note(trace, f"{c} is a Laurent-type field, generating with a divisible group")
        return Verdict.YES
    gen = c.flags.generating
    _note(trace, f"catalog: (R+, {c}) generating = {Verdict.of(gen)}")
    return Verdict.of(gen)


@dataclass(frozen=True)
class MVFDescriptor:
    """Value group theory and residue theory of a metric valued field, or ``dg``
    for discrete and trivial value groups."""

    residue: Expr
    group: GroupTheory | None = None
    dg: object = None  # Value, ZERO or None
    name: str = ""

    def __post_init__(self):
        if (self.group is None) == (self.dg is None):
            raise ValueError("give exactly one of group (dense) or dg (discrete/trivial)")
        if self.group is not None and not self.group.is_dense:
            raise ValueError("descriptors with a group must be dense; use dg for discrete ones")

    @property
    def dense(self) -> bool:
        return self.group is not None

    def __str__(self) -> str:
        if self.dense:
            return f"({self.group}, {self.residue})"
        return f"(dg={self.dg}, {self.residue})"


@dataclass(frozen=True)
class ClassDescriptor:
    group: GroupTheory
    residue: Expr
    shifted: bool = False
    verdict: Verdict = Verdict.YES
    trace: tuple = field(default=(), compare=False)

    @property
    def pair(self) -> tuple:
        return (self.group, self.residue)

    def label(self) -> str:
        return f"({self.group},{self.residue})"

    def __str__(self) -> str:
        return f"C{self.label()}" + (" shifted" if self.shifted else " unshifted")


def class_of(k: MVFDescriptor) -> ClassDescriptor:
    if not k.dense:
        raise MixedDensity("class_of needs a dense descriptor; compare discrete ones with equivalent()")
    trace: list = []
    g, res = k.group, k.residue
    if not is_divisible(g):
        trace.append(f"{g} is not divisible: unshifted")
        return ClassDescriptor(g, res, False, Verdict.YES, tuple(trace))
    c = canonicalize(res, trace)
    if isinstance(c, Hahn) and c.group.is_dense:
        gen = is_generating_pair(c.group, c.inner, trace)
        if gen is Verdict.YES:
            if not is_divisible(c.group):
                trace.append(f"residue decomposes over non-divisible {c.group}: shifted")
                return ClassDescriptor(c.group, c.inner, True, Verdict.YES, tuple(trace))
            v = _equiv(c.inner, c, trace)
            if v is Verdict.NO:
                trace.append(f"residue is hahn({c.inner}, R+) and differs from {c.inner}: shifted")
                return ClassDescriptor(R_PLUS, c.inner, True, Verdict.YES, tuple(trace))
            if v is Verdict.UNKNOWN:
                return ClassDescriptor(R_PLUS, c.inner, True, Verdict.UNKNOWN, tuple(trace))
        elif gen is Verdict.UNKNOWN:
            trace.append("decomposition of the residue is not known to be generating")
            return ClassDescriptor(c.group, c.inner, True, Verdict.UNKNOWN, tuple(trace))
    gen = is_generating_pair(R_PLUS, c, trace)
    if gen is Verdict.YES:
        trace.append("unshifted with divisible value group")
        return ClassDescriptor(R_PLUS, c, False, Verdict.YES, tuple(trace))
    trace.append(f"(R+, {c}) generating = {gen}; class not determined")
    return ClassDescriptor(R_PLUS, c, False, Verdict.UNKNOWN, tuple(trace))


def same_class(a: ClassDescriptor, b: ClassDescriptor, trace: list | None = None) -> Verdict:
    if not (a.verdict.decisive and b.verdict.decisive):
        return Verdict.UNKNOWN
    return Verdict.of(equiv_groups(a.group, b.group)) & equiv_fields(a.residue, b.residue, trace)


class MixedDensity(ValueError):
    pass


class VerdictConflict(AssertionError):
    pass


def equivalent(k1: MVFDescriptor, k2: MVFDescriptor, trace: list | None = None) -> Verdict:
    if k1.dense != k2.dense:
        raise MixedDensity("cannot compare a dense descriptor with a discrete or trivial one")
    if k1.dense:
        c1, c2 = class_of(k1), class_of(k2)
        if trace is not None:
            trace.append(f"{k1} in {c1}")
            trace.append(f"{k2} in {c2}")
        return same_class(c1, c2, trace)
    from .values import ZERO

    if k1.dg is ZERO or k2.dg is ZERO:
        _note(trace, "trivially valued fields are outside the scope of this classifier")
        return Verdict.UNKNOWN
    if compare(k1.dg, k2.dg) != 0:
        _note(trace, f"discreteness gaps differ: {k1.dg} vs {k2.dg}")
        return Verdict.NO
    _note(trace, "equal discreteness gaps; comparing residue theories")
    return equiv_fields(k1.residue, k2.residue, trace)


def residue_shift(c: ClassDescriptor) -> MVFDescriptor:
    return MVFDescriptor(Hahn(c.residue, c.group), group=R_PLUS)


def lring_equiv(k1: MVFDescriptor, k2: MVFDescriptor, trace: list | None = None) -> Verdict:
    """Ring-language equivalence via Hahn models, cross-checked against ``equivalent``."""
    if not (k1.dense and k2.dense):
        raise MixedDensity("ring-language comparison is implemented for dense descriptors")
    v = equiv_fields(Hahn(k1.residue, k1.group), Hahn(k2.residue, k2.group), trace)
    e = equivalent(k1, k2)
    if v.decisive and e.decisive and v is not e:
        raise VerdictConflict(f"ring verdict {v} disagrees with class verdict {e} for {k1} vs {k2}")
    return v
