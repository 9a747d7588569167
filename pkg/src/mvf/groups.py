"""Finitely generated subgroups of the positive rationals and theories of
regular ordered abelian groups.

A :class:`ConcreteGroup` is given by generators; its prime-exponent lattice is
put in Hermite normal form.  A :class:`GroupTheory` is the symbolic side: the
trivial theory, the theory of ``(Z, +, <)`` shared by every regular discrete
group, or a regular dense theory described by the sizes ``|G/pG| = p**k``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .values import ONE, Surd, Value, is_prime

__all__ = [
    "ConcreteGroup",
    "GroupKind",
    "GroupTheory",
    "INFINITE",
    "R_PLUS",
    "WitnessNotFound",
    "hermite_normal_form",
    "rank",
    "classify_group",
    "equiv_groups",
    "is_divisible",
    "dense_witness",
    "interval_hits",
]

INFINITE = math.inf


class WitnessNotFound(LookupError):
    """No group element in the searched exponent box meets the constraint."""


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], int]:
    """Row-style Hermite normal form.

    Returns ``(H, U, r)`` with ``U @ rows == H``, ``U`` unimodular, the first
    ``r`` rows of ``H`` an echelon basis with positive pivots and reduced
    entries above each pivot, and the remaining rows of ``U`` spanning the
    integer relations among the input rows.
    """
    a = [list(map(int, row)) for row in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    pivots = []
    for j in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][j]]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(a[i][j]))
            a[r], a[k] = a[k], a[r]
            u[r], u[k] = u[k], u[r]
            done = True
            for i in range(r + 1, m):
                if a[i][j]:
                    q = a[i][j] // a[r][j]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][j]:
                        done = False
            if done:
                break
        if r < m and a[r][j]:
            if a[r][j] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = a[i][j] // a[r][j]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            pivots.append(j)
            r += 1
    return a, u, r


@dataclass(frozen=True)
class ConcreteGroup:
    """The subgroup of (Q^+, *) generated by ``generators``."""

    generators: tuple[Value, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        gens = tuple(g if isinstance(g, Value) else Value.from_rational(g) for g in self.generators)
        if not gens:
            raise ValueError("a concrete group needs at least one generator")
        for g in gens:
            if not g.is_rational():
                raise ValueError(f"generator {g} has non-integer exponents")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, *gens, name: str | None = None) -> ConcreteGroup:
        return cls(tuple(Value.from_rational(g) if not isinstance(g, Value) else g for g in gens), name)

    @cached_property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({p for g in self.generators for p in g.exponents}))

    def vector(self, v: Value) -> tuple[Fraction, ...] | None:
        exps = v.exponents
        if any(p not in self.primes for p in exps):
            return None
        return tuple(exps.get(p, Fraction(0)) for p in self.primes)

    @cached_property
    def _hnf(self):
        rows = [[int(e) for e in self.vector(g)] for g in self.generators]
        if not self.primes:
            return [], [[int(i == j) for j in range(len(rows))] for i in range(len(rows))], 0
        return hermite_normal_form(rows)

    @property
    def rank(self) -> int:
        return self._hnf[2]

    @cached_property
    def basis_vectors(self) -> tuple[tuple[int, ...], ...]:
        h, _, r = self._hnf
        return tuple(tuple(row) for row in h[:r])

    @cached_property
    def basis(self) -> tuple[Value, ...]:
        return tuple(Value(dict(zip(self.primes, row))) for row in self.basis_vectors)

    @cached_property
    def basis_in_generators(self) -> tuple[tuple[int, ...], ...]:
        """Row k gives basis[k] as an integer combination of the generators."""
        _, u, r = self._hnf
        return tuple(tuple(row) for row in u[:r])

    @cached_property
    def relations(self) -> tuple[tuple[int, ...], ...]:
        """Integer relations among the generators (a lattice basis)."""
        _, u, r = self._hnf
        return tuple(tuple(row) for row in u[r:])

    def coordinates(self, v: Value, hull: bool = False) -> tuple[Fraction, ...] | None:
        """Coordinates of ``v`` in the HNF basis, or None when ``v`` lies outside.

        With ``hull=True`` rational coordinates are accepted (divisible hull).
        """
        return _coordinates(self, v, hull)

    def contains(self, v: Value, hull: bool = False) -> bool:
        return self.coordinates(v, hull) is not None

    def element(self, coords: Iterable) -> Value:
        out = ONE
        for b, c in zip(self.basis, coords):
            if c:
                out = out * b ** c
        return out

    @cached_property
    def basis_rationals(self) -> tuple[Fraction, ...]:
        return tuple(b.to_fraction() for b in self.basis)

    def label(self) -> str:
        if self.name:
            return self.name
        return "<" + ", ".join(str(g.to_fraction()) for g in self.generators) + ">"

    def __str__(self) -> str:
        return self.label()


_coord_cache: dict = {}


def _coordinates(g: ConcreteGroup, v: Value, hull: bool):
    key = (g, v, hull)
    if key in _coord_cache:
        return _coord_cache[key]
    vec = g.vector(v)
    out = None
    if vec is not None and (hull or all(e.denominator == 1 for e in vec)):
        w = list(vec)
        coords = []
        ok = True
        for row in g.basis_vectors:
            j = next(i for i, x in enumerate(row) if x)
            c = Fraction(w[j], row[j])
            if c.denominator != 1 and not hull:
                ok = False
                break
            coords.append(c)
            if c:
                w = [x - c * y for x, y in zip(w, row)]
        if ok and not any(w):
            out = tuple(coords)
    if len(_coord_cache) > 200_000:
        _coord_cache.clear()
    _coord_cache[key] = out
    return out


def rank(g: ConcreteGroup) -> int:
    return g.rank


class GroupKind(enum.Enum):
    TRIVIAL = "trivial"
    DISCRETE = "discrete"
    DENSE = "dense"


@dataclass(frozen=True)
class GroupTheory:
    """Elementary theory of a regular ordered abelian group.

    For dense theories ``invariant(p) = k`` means ``|G/pG| = p**k`` (``k`` may
    be ``INFINITE``).  The map is stored as a default plus finitely many
    exceptions, which keeps equality decidable.
    """

    kind: GroupKind
    default: int | float = 0
    exceptions: tuple[tuple[int, int | float], ...] = ()
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind is not GroupKind.DENSE:
            if self.default or self.exceptions:
                raise ValueError(f"{self.kind.value} theories carry no invariants")
            return
        for k in (self.default, *(k for _, k in self.exceptions)):
            if not (k == INFINITE or (isinstance(k, int) and k >= 0)):
                raise ValueError(f"invariant exponent must be a natural number or infinite, got {k!r}")
        for p, _ in self.exceptions:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        exc = tuple(sorted((p, k) for p, k in dict(self.exceptions).items() if k != self.default))
        object.__setattr__(self, "exceptions", exc)

    @classmethod
    def trivial(cls) -> GroupTheory:
        return cls(GroupKind.TRIVIAL, label="1")

    @classmethod
    def discrete(cls) -> GroupTheory:
        return cls(GroupKind.DISCRETE, label="Z")

    @classmethod
    def dense(cls, default=0, exceptions=(), label: str | None = None) -> GroupTheory:
        if isinstance(exceptions, dict):
            exceptions = tuple(exceptions.items())
        return cls(GroupKind.DENSE, default, tuple(exceptions), label)

    def invariant(self, p: int) -> int | float:
        if self.kind is not GroupKind.DENSE:
            raise ValueError("only dense theories carry |G/pG| invariants")
        return dict(self.exceptions).get(p, self.default)

    @property
    def is_dense(self) -> bool:
        return self.kind is GroupKind.DENSE

    def with_label(self, label: str) -> GroupTheory:
        return GroupTheory(self.kind, self.default, self.exceptions, label)

    def __str__(self) -> str:
        if self.label:
            return self.label
        if self.kind is not GroupKind.DENSE:
            return {GroupKind.TRIVIAL: "1", GroupKind.DISCRETE: "Z"}[self.kind]
        if not self.default and not self.exceptions:
            return "R+"
        d = "inf" if self.default == INFINITE else str(self.default)
        exc = ",".join(f"{p}:{'inf' if k == INFINITE else k}" for p, k in self.exceptions)
        return f"dense(default={d}" + (f",except={exc})" if exc else ")")


R_PLUS = GroupTheory.dense(0, label="R+")


def classify_group(g: ConcreteGroup) -> GroupTheory:
    r = g.rank
    if r == 0:
        return GroupTheory.trivial()
    if r == 1:
        return GroupTheory.discrete()
    return GroupTheory.dense(r, label=f"Th{g.label()}")


def equiv_groups(a: GroupTheory, b: GroupTheory) -> bool:
    """Elementary equivalence of two regular group theories."""
    return a.kind is b.kind and a.default == b.default and a.exceptions == b.exceptions


def is_divisible(t: GroupTheory) -> bool:
    if t.kind is GroupKind.TRIVIAL:
        raise ValueError("divisibility is not asked of the trivial group")
    return t.kind is GroupKind.DENSE and t.default == 0 and not t.exceptions


# ---------------------------------------------------------------------------
# searching the exponent box


def _as_bound(x):
    if x is None:
        return None
    if isinstance(x, Value):
        return x.to_fraction() if x.is_rational() else Surd(x)
    if isinstance(x, Surd):
        return x.to_fraction() if x.is_rational() else x
    return Fraction(x)


def _le(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a <= b
    return Surd.coerce(a) <= Surd.coerce(b)


def _lt(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a < b
    return Surd.coerce(a) < Surd.coerce(b)


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def interval_hits(g: ConcreteGroup, lo, hi, bound: int, hi_open: bool = False, first: bool = False):
    """Exponent vectors c in [-bound, bound]^rank with lo <= element(c) <= hi.

    ``lo`` may be ``None`` (no lower constraint); ``hi_open`` makes the upper
    end strict.  Vectors are produced in lexicographic order, each with its
    element as a Fraction.  With ``first=True`` only the first hit is kept.
    """
    r = g.rank
    if r == 0:
        raise ValueError("the trivial group has no exponent box to search")
    lo, hi = _as_bound(lo), _as_bound(hi)
    if lo is not None and _le(lo, Fraction(0)):
        lo = None
    basis = g.basis_rationals
    last = basis[-1]
    ln_last = _log(last)
    ln_lo = math.log(float(lo)) if lo is not None else None
    ln_hi = math.log(float(hi)) if _lt(Fraction(0), hi) else None
    if ln_hi is None:
        return []
    hits = []
    for prefix in itertools.product(range(-bound, bound + 1), repeat=r - 1):
        base = Fraction(1)
        for b, c in zip(basis, prefix):
            if c:
                base *= b**c
        ln_base = _log(base)
        ends = [(ln_hi - ln_base) / ln_last]
        ends.append((ln_lo - ln_base) / ln_last if ln_lo is not None else (-math.inf if ln_last > 0 else math.inf))
        j_lo, j_hi = min(ends), max(ends)
        start = -bound if j_lo == -math.inf else max(-bound, math.floor(j_lo) - 2)
        stop = bound if j_hi == math.inf else min(bound, math.ceil(j_hi) + 2)
        for j in range(start, stop + 1):
            x = base * last**j
            if lo is not None and not _le(lo, x):
                continue
            if (_lt(x, hi) if hi_open else _le(x, hi)):
                hits.append((prefix + (j,), x))
                if first:
                    return hits
    return hits


def dense_witness(g: ConcreteGroup, target: Value, tolerance, bound: int) -> Value:
    """A group element within ``tolerance`` of ``target``.

    The exponent box ``[-bound, bound]^rank`` is searched and the
    lexicographically smallest hit is returned.  ``tolerance`` is a Value or
    0.  Failure raises :class:`WitnessNotFound`, which only says the box was
    too small.
    """
    if g.rank < 2:
        raise ValueError(f"group {g} is not dense (rank {g.rank})")
    t = Surd(target)
    tol = Surd(tolerance) if tolerance else Surd(0)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    hits = interval_hits(g, t - tol, t + tol, bound, first=True)
    if not hits:
        raise WitnessNotFound(f"no element of {g} within {tolerance} of {target} for exponent bound {bound}")
    coords, _ = hits[0]
    return g.element(coords)
