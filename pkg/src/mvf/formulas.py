"""Continuous-logic formulas over the projective line, evaluated over finite witness sets.

Formulas take values in [0, 1].  Quantifier-free formulas are evaluated
exactly.  ``inf`` and ``sup`` range over an explicit finite witness set, so
their values are one-sided bounds of the true extrema; every result records
which side it errs on.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .groups import WitnessNotFound, interval_hits
from .hahn import HahnSeries
from .projective import IntPoly, PPoint, distance, predicate
from .values import ONE, Surd, Value

__all__ = [
    "Var",
    "Infinity",
    "PointLit",
    "Pred",
    "Dist",
    "Const",
    "Neg",
    "TruncSub",
    "Max",
    "Min",
    "Prod",
    "ClampAdd",
    "Sup",
    "Inf",
    "WitnessSet",
    "EvalResult",
    "EvalError",
    "FormulaSyntaxError",
    "evaluate",
    "parse_formula",
    "free_vars",
    "phi",
    "phi_formula",
    "phi_bracket",
    "PiWitness",
    "pi_witness",
    "grid_witnesses",
    "EXACT",
    "UPPER",
    "LOWER",
    "MIXED",
]

EXACT = "exact"
UPPER = "upper_bound_of_inf"
LOWER = "lower_bound_of_sup"
MIXED = "mixed"


# ---------------------------------------------------------------------------
# syntax


@dataclass(frozen=True)
class Var:
    name: str
    shift: int = 0  # power of sigma applied

    def __str__(self) -> str:
        if not self.shift:
            return self.name
        return f"s({self.name})" if self.shift == 1 else f"s^{self.shift}({self.name})"


@dataclass(frozen=True)
class Infinity:
    def __str__(self) -> str:
        return "inf"


@dataclass(frozen=True)
class PointLit:
    """A point written out in the formula, ``[u : v]``; read against the structure."""

    text: str

    def __str__(self) -> str:
        return self.text


Term = Union[Var, Infinity, PointLit]


@dataclass(frozen=True)
class Pred:
    poly: IntPoly
    args: tuple

    def __str__(self) -> str:
        names = [str(a) for a in self.args]
        text = str(self.poly)
        for i in reversed(range(len(names))):
            text = text.replace(f"X{i + 1}", names[i])
        return f"||{text}||"


@dataclass(frozen=True)
class Dist:
    left: Term
    right: Term

    def __str__(self) -> str:
        return f"d({self.left}, {self.right})"


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise ValueError(f"constant {v} outside [0, 1]")
        object.__setattr__(self, "value", v)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Neg:
    body: object

    def __str__(self) -> str:
        return f"1 - {_wrap(self.body)}"


@dataclass(frozen=True)
class TruncSub:
    left: object
    right: object

    def __str__(self) -> str:
        return f"{_wrap(self.left)} - {_wrap(self.right)}"


@dataclass(frozen=True)
class Max:
    left: object
    right: object

    def __str__(self) -> str:
        return f"max({self.left}, {self.right})"


@dataclass(frozen=True)
class Min:
    left: object
    right: object

    def __str__(self) -> str:
        return f"min({self.left}, {self.right})"


@dataclass(frozen=True)
class Prod:
    left: object
    right: object

    def __str__(self) -> str:
        return f"{_wrap(self.left)} * {_wrap(self.right)}"


@dataclass(frozen=True)
class ClampAdd:
    left: object
    right: object

    def __str__(self) -> str:
        return f"min(1, {self.left} + {self.right})"


@dataclass(frozen=True)
class Sup:
    var: str
    body: object

    def __str__(self) -> str:
        return f"sup {self.var} . {self.body}"


@dataclass(frozen=True)
class Inf:
    var: str
    body: object

    def __str__(self) -> str:
        return f"inf {self.var} . {self.body}"


def _wrap(f) -> str:
    if isinstance(f, (Neg, TruncSub, Prod, Sup, Inf)):
        return f"({f})"
    return str(f)


def free_vars(f) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, (Infinity, PointLit, Const)):
        return set()
    if isinstance(f, Pred):
        return set().union(*(free_vars(a) for a in f.args)) if f.args else set()
    if isinstance(f, Dist):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Neg):
        return free_vars(f.body)
    if isinstance(f, (Sup, Inf)):
        return free_vars(f.body) - {f.var}
    return free_vars(f.left) | free_vars(f.right)


# ---------------------------------------------------------------------------
# witness sets and results


@dataclass(frozen=True)
class WitnessSet:
    points: tuple
    provenance: str = "explicit"

    def __post_init__(self):
        if not self.points:
            raise ValueError("a witness set must be nonempty")
        object.__setattr__(self, "points", tuple(self.points))

    def take(self, n: int) -> WitnessSet:
        return WitnessSet(self.points[:n], f"{self.provenance}[:{n}]")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass
class EvalResult:
    value: Surd
    bound_direction: str
    witness: dict = field(default_factory=dict)
    samples: list | None = None

    def __float__(self) -> float:
        return float(self.value)


class EvalError(ValueError):
    pass


def _flip(d: str) -> str:
    return {UPPER: LOWER, LOWER: UPPER}.get(d, d)


def _join(a: str, b: str) -> str:
    if a == EXACT:
        return b
    if b == EXACT or a == b:
        return a
    return MIXED


def _as_surd(v) -> Surd:
    return Surd(v)


class _Evaluator:
    def __init__(self, structure, witnesses, top_samples: bool):
        self.structure = structure
        self.witnesses = witnesses
        self.top_samples = top_samples

    def witnesses_for(self, var: str) -> WitnessSet:
        w = self.witnesses
        if isinstance(w, Mapping):
            if var in w:
                w = w[var]
            elif "*" in w:
                w = w["*"]
            else:
                raise EvalError(f"no witness set for quantified variable {var}")
        if w is None:
            raise EvalError(f"no witness set for quantified variable {var}")
        if not isinstance(w, WitnessSet):
            w = WitnessSet(tuple(w))
        return w

    def term(self, t, env) -> PPoint:
        if isinstance(t, Infinity):
            if self.structure is not None:
                return self.structure.infinity()
            return PPoint.infinity()
        if isinstance(t, PointLit):
            if self.structure is None:
                raise EvalError(f"point literal {t} needs a structure")
            from .literals import parse_point

            return parse_point(t.text, self.structure)
        if t.name not in env:
            raise EvalError(f"unbound variable {t.name}")
        p = env[t.name]
        if t.shift:
            if self.structure is None:
                raise EvalError("sigma needs a structure with an automorphism")
            p = self.structure.apply_point(p, t.shift)
        return p

    def run(self, f, env, samples=None) -> tuple[Surd, str, dict]:
        if isinstance(f, Const):
            return Surd(f.value), EXACT, {}
        if isinstance(f, Pred):
            return _as_surd(predicate(f.poly, [self.term(a, env) for a in f.args])), EXACT, {}
        if isinstance(f, Dist):
            return _as_surd(distance(self.term(f.left, env), self.term(f.right, env))), EXACT, {}
        if isinstance(f, Neg):
            v, d, w = self.run(f.body, env)
            return 1 - v, _flip(d), w
        if isinstance(f, (Sup, Inf)):
            best = None
            lower = isinstance(f, Inf)
            for p in self.witnesses_for(f.var):
                v, d, w = self.run(f.body, {**env, f.var: p})
                if samples is not None:
                    samples.append((p, v))
                if best is None or (v < best[0] if lower else v > best[0]):
                    best = (v, d, {f.var: p, **w})
                elif best[1] != d:
                    best = (best[0], _join(best[1], d), best[2])
            v, d, w = best
            if lower:
                return v, (UPPER if d in (EXACT, UPPER) else MIXED), w
            return v, (LOWER if d in (EXACT, LOWER) else MIXED), w
        a, da, wa = self.run(f.left, env)
        b, db, wb = self.run(f.right, env)
        w = {**wa, **wb}
        if isinstance(f, TruncSub):
            diff = a - b
            return (diff if diff.sign() > 0 else Surd(0)), _join(da, _flip(db)), w
        d = _join(da, db)
        if isinstance(f, Max):
            return (a if a >= b else b), d, w
        if isinstance(f, Min):
            return (a if a <= b else b), d, w
        if isinstance(f, Prod):
            return a * b, d, w
        if isinstance(f, ClampAdd):
            s = a + b
            return (s if s <= 1 else Surd(1)), d, w
        raise EvalError(f"not a formula: {f!r}")


def evaluate(f, assignment: Mapping[str, PPoint] | None = None, witnesses=None, structure=None, keep_samples: bool = False) -> EvalResult:
    """Evaluate ``f`` under ``assignment``; quantifiers range over ``witnesses``.

    ``witnesses`` is a WitnessSet used for every quantifier, or a mapping from
    variable names to WitnessSets (key ``"*"`` acts as a default).
    """
    env = dict(assignment or {})
    missing = free_vars(f) - set(env)
    if missing:
        raise EvalError(f"unbound variables: {', '.join(sorted(missing))}")
    ev = _Evaluator(structure, witnesses, keep_samples)
    samples = [] if keep_samples and isinstance(f, (Sup, Inf)) else None
    v, d, w = ev.run(f, env, samples)
    return EvalResult(v, d, w, samples)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(\|\||\[[^\]]*\]|\d+|[A-Za-z_][A-Za-z_0-9]*|[-+*/^().,])")


class FormulaSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r} at {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self, expect: str | None = None) -> str:
        t = self.peek()
        if t is None or (expect is not None and t != expect):
            raise FormulaSyntaxError(f"expected {expect or 'a token'}, got {t!r}")
        self.i += 1
        return t

    def done(self) -> bool:
        return self.i >= len(self.toks)

    # formulas
    def formula(self):
        if self.peek() in ("inf", "sup") and _is_ident(self.peek(1)) and self.peek(2) == ".":
            q = self.take()
            var = self.take()
            self.take(".")
            body = self.formula()
            return Inf(var, body) if q == "inf" else Sup(var, body)
        return self.additive()

    def additive(self):
        left = self.multiplicative()
        while self.peek() in ("+", "-"):
            op = self.take()
            right = self.multiplicative()
            if op == "+":
                left = ClampAdd(left, right)
            elif isinstance(left, Const) and left.value == 1:
                left = Neg(right)
            else:
                left = TruncSub(left, right)
        return left

    def multiplicative(self):
        left = self.atom()
        while self.peek() == "*":
            self.take()
            left = Prod(left, self.atom())
        return left

    def atom(self):
        t = self.peek()
        if t is None:
            raise FormulaSyntaxError("unexpected end of formula")
        if t.isdigit():
            return Const(self.number())
        if t == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if t in ("min", "max") and self.peek(1) == "(":
            self.take()
            self.take("(")
            a = self.formula()
            self.take(",")
            b = self.formula()
            self.take(")")
            if t == "min" and isinstance(a, Const) and a.value == 1 and isinstance(b, ClampAdd):
                return b
            return Min(a, b) if t == "min" else Max(a, b)
        if t in ("d", "dist") and self.peek(1) == "(":
            self.take()
            self.take("(")
            a = self.term()
            self.take(",")
            b = self.term()
            self.take(")")
            return Dist(a, b)
        if t == "||":
            return self.norm()
        if t in ("inf", "sup") and _is_ident(self.peek(1)) and self.peek(2) == ".":
            return self.formula()
        raise FormulaSyntaxError(f"unexpected token {t!r}")

    def number(self) -> Fraction:
        n = Fraction(int(self.take()))
        if self.peek() == "/" and self.peek(1) and self.peek(1).isdigit():
            self.take()
            n /= int(self.take())
        return n

    def term(self) -> Term:
        t = self.take()
        if t == "inf":
            return Infinity()
        if t.startswith("["):
            return PointLit(t)
        if t == "s":
            k = 1
            if self.peek() == "^":
                self.take()
                sign = -1 if self.peek() == "-" else 1
                if sign < 0:
                    self.take()
                k = sign * int(self.take())
            self.take("(")
            inner = self.term()
            self.take(")")
            if not isinstance(inner, Var):
                raise FormulaSyntaxError("sigma applies to variables only")
            return Var(inner.name, inner.shift + k)
        if not _is_ident(t):
            raise FormulaSyntaxError(f"expected a variable, got {t!r}")
        return Var(t)

    def norm(self):
        self.take("||")
        # ||y^*|| is the distance to infinity
        if _is_ident(self.peek()) and self.peek(1) == "^" and self.peek(2) == "*" and self.peek(3) == "||":
            v = self.term()
            self.take("^")
            self.take("*")
            self.take("||")
            return Dist(v, Infinity())
        atoms: list = []
        poly = self.poly_sum(atoms)
        self.take("||")
        n = len(atoms)
        terms = {}
        for mono, c in poly.items():
            e = [0] * n
            for idx, k in mono:
                e[idx] += k
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        if n == 0:
            raise FormulaSyntaxError("a predicate needs at least one variable")
        return Pred(IntPoly.from_dict(n, terms), tuple(atoms))

    # polynomials as {frozenset-ish monomial tuple: int}
    def poly_sum(self, atoms):
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        acc = _pscale(self.poly_prod(atoms), sign)
        while self.peek() in ("+", "-"):
            op = self.take()
            acc = _padd(acc, _pscale(self.poly_prod(atoms), 1 if op == "+" else -1))
        return acc

    def poly_prod(self, atoms):
        acc = self.poly_power(atoms)
        while self.peek() == "*":
            self.take()
            acc = _pmul(acc, self.poly_power(atoms))
        return acc

    def poly_power(self, atoms):
        base = self.poly_atom(atoms)
        if self.peek() == "^":
            self.take()
            k = int(self.take())
            out = {(): 1}
            for _ in range(k):
                out = _pmul(out, base)
            return out
        return base

    def poly_atom(self, atoms):
        t = self.peek()
        if t is not None and t.isdigit():
            return {(): int(self.take())}
        if t == "(":
            self.take()
            p = self.poly_sum(atoms)
            self.take(")")
            return p
        term = self.term()
        if term not in atoms:
            atoms.append(term)
        return {((atoms.index(term), 1),): 1}


def _is_ident(t) -> bool:
    return t is not None and bool(re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", t))


def _norm_mono(m):
    d: dict = {}
    for i, k in m:
        d[i] = d.get(i, 0) + k
    return tuple(sorted(d.items()))


def _padd(a, b):
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c}


def _pscale(a, s):
    return {m: c * s for m, c in a.items()}


def _pmul(a, b):
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _norm_mono(m1 + m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def parse_formula(text: str):
    p = _Parser(text)
    f = p.formula()
    if not p.done():
        raise FormulaSyntaxError(f"trailing input at {p.peek()!r}")
    return f


# ---------------------------------------------------------------------------
# the formula phi and the type pi

PHI_TEXT = "inf y . min(1, ||y*x - s(y)|| + max(1 - ||y||, 1 - ||y^*||))"


def phi_formula():
    return parse_formula(PHI_TEXT)


def phi_bracket(structure, a: PPoint, y: PPoint) -> Surd:
    """``min(1, ||y a - s(y)|| + max(1 - ||y||, 1 - ||y*||))`` at one witness."""
    body = phi_formula().body
    return evaluate(body, {"x": a, "y": y}, structure=structure).value


def phi(structure, a: PPoint, witnesses: WitnessSet, keep_samples: bool = True) -> EvalResult:
    return evaluate(phi_formula(), {"x": a}, witnesses, structure=structure, keep_samples=keep_samples)


@dataclass(frozen=True)
class PiWitness:
    point: PPoint
    exponent: Value
    n: int
    phi: EvalResult | None = None


def pi_witness(structure, n: int, bound: int, witnesses: WitnessSet | None = None) -> PiWitness:
    """A point ``[t^c : 1]`` with ``1 - 1/n <= c < 1`` and ``c`` in the value group.

    Among the group elements in the window with exponent vectors inside the
    box, the one of smallest max-norm is chosen, ties going to the value
    closest to 1.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    g = structure.field.group
    if g.rank < 2:
        raise ValueError("pi witnesses need a dense value group")
    lo = 1 - Fraction(1, n)
    hits = interval_hits(g, lo, Fraction(1), bound, hi_open=True)
    if not hits:
        raise WitnessNotFound(f"no element of {g} in [{lo}, 1) with exponents bounded by {bound}")
    best = min(hits, key=lambda h: (max(abs(int(c)) for c in h[0]), -h[1]))
    c = g.element(best[0])
    p = structure.point(HahnSeries({c: 1}, field=structure.field), HahnSeries({ONE: 1}, field=structure.field))
    res = phi(structure, p, witnesses) if witnesses is not None else None
    return PiWitness(p, c, n, res)


# ---------------------------------------------------------------------------
# grid witnesses


def _grid_coefficients(height: int) -> list[Fraction]:
    seen = set()
    out = []
    for q in range(1, height + 1):
        for p in range(1, height + 1):
            for s in (1, -1):
                c = Fraction(s * p, q)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
    out.sort(key=lambda c: (max(abs(c.numerator), c.denominator), -c if c < 0 else c, c < 0))
    return out


def _grid_exponents(group, depth: int) -> list[Value]:
    r = group.rank
    vecs = list(itertools.product(range(-depth, depth + 1), repeat=r))
    vecs.sort(key=lambda v: (max((abs(x) for x in v), default=0), v))
    return [group.element(v) for v in vecs]


def grid_witnesses(structure, depth: int, height: int, terms: int = 2) -> WitnessSet:
    """Normalized points ``[u : 1]`` (``|u| <= 1``) and ``[1 : w]`` (``|w| < 1``).

    ``u`` and ``w`` run over series with at most ``terms`` terms, exponents
    from the lattice box of radius ``depth`` and coefficients ``p/q`` with
    ``|p|, q <= height``.  Every projective point has exactly one such
    representative, so no two listed points coincide.  The order is fixed:
    smaller boxes and heights first, monomials before binomials, so a grid is
    a prefix of the grid of the same height and larger depth.  Gauss structures also get
    ``[X : 1]`` and ``[1 : X]`` up front.
    """
    from .values import compare

    fld = structure.field
    exps = _grid_exponents(fld.group, depth)
    coefs = _grid_coefficients(height)

    def level_e(e: Value) -> int:
        coords = fld.group.coordinates(e)
        return max((abs(int(x)) for x in coords), default=0)

    def level_c(c: Fraction) -> int:
        return max(abs(c.numerator), c.denominator)

    series = []
    for k in range(1, terms + 1):
        for es in itertools.combinations(exps, k):
            for cs in itertools.product(coefs, repeat=k):
                lev = (max(level_e(e) for e in es), max(level_c(c) for c in cs), k)
                series.append((lev, HahnSeries(dict(zip(es, cs)), field=fld)))
    series.sort(key=lambda s: s[0])

    zero = HahnSeries({}, field=fld)
    one = HahnSeries({ONE: 1}, field=fld)
    pts = [((0, 0, 0), structure.point(zero, one)), ((0, 0, 0), structure.point(one, zero))]
    for lev, s in series:
        v = s.valuation()
        if compare(v, ONE) <= 0:
            pts.append((lev, PPoint(structure.lift(s), structure.lift(one), normalized=True)))
        if compare(v, ONE) < 0:
            pts.append((lev, PPoint(structure.lift(one), structure.lift(s), normalized=True)))
    pts.sort(key=lambda p: p[0])
    out = [p for _, p in pts]
    if structure.gauss:
        x = structure.variable()
        out = [PPoint(x, structure.lift(one), True), PPoint(structure.lift(one), x, True)] + out
    return WitnessSet(tuple(out), f"grid({depth},{height})")
