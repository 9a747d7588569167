from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mvf.difference import DifferenceStructure, Identity
from mvf.formulas import grid_witnesses
from mvf.groups import ConcreteGroup
from mvf.hahn import FieldHandle, HahnSeries
from mvf.projective import IntPoly, PPoint, distance, homogenize, predicate, predicate_pairs
from mvf.values import ONE, ZERO, Value, compare, max_value

G = ConcreteGroup.of(2, 3)
K = FieldHandle(G)
M = DifferenceStructure(K, Identity("id"))
GRID = list(grid_witnesses(M, 1, 1).points)


def v(q) -> Value:
    return Value.from_rational(Fraction(q))


def t(q, c=1) -> HahnSeries:
    return HahnSeries({v(q): c}, field=K)


def c(k) -> HahnSeries:
    return HahnSeries.constant(k, K)


points = st.sampled_from(GRID)
units = st.sampled_from([c(1), c(-2), c(Fraction(3, 5)), 1 + t(Fraction(1, 2)), 2 - t(Fraction(1, 3), 7)])
monomials = st.sampled_from([t(1), t(2), t(Fraction(1, 6)), t(Fraction(27, 8), -5)])


def test_normalize_examples():
    p = PPoint(t(Fraction(1, 2)), t(Fraction(1, 4)))
    assert p.num == c(1) and p.den == t(Fraction(1, 2))
    assert PPoint(c(5), c(0)).is_infinity()
    assert PPoint(c(5), c(0)) == PPoint.infinity()
    q = PPoint(c(0), c(3))
    assert q.num.is_zero() and q.den == c(3)
    assert q == PPoint(c(0), c(1))
    with pytest.raises(ValueError):
        PPoint(c(0), c(0))


def test_normalize_scales_by_reciprocal_monomial():
    # the scaling monomial exponent is the reciprocal of max(|x|, |y|)
    p = PPoint(t(Fraction(1, 3)), t(Fraction(1, 9), 4))
    assert p.num == t(1) and p.den == t(Fraction(1, 3), 4)
    p = PPoint(t(6), t(2))
    assert p.num == c(1) and p.den == t(Fraction(1, 3))


@given(points, monomials)
def test_normalized_and_scaling_invariant(p, m):
    assert max_value(p.num.valuation(), p.den.valuation()) == ONE
    assert PPoint(p.num * m, p.den * m) == p


def test_distance_examples():
    assert distance(PPoint.infinity(), PPoint(c(0), c(1))) == ONE
    a = PPoint(1 + t(Fraction(1, 2)), c(1))
    assert distance(a, a) is ZERO
    b = PPoint(c(1), t(Fraction(1, 2)))
    assert distance(b, PPoint.infinity()) == v(Fraction(1, 2))


@given(points, points, points)
def test_ultrametric(a, b, d):
    assert compare(distance(a, d), max_value(distance(a, b), distance(b, d))) <= 0


@given(points, points)
def test_distance_symmetric_and_bounded(a, b):
    assert distance(a, b) == distance(b, a)
    assert compare(distance(a, b), ONE) <= 0
    assert (distance(a, b) is ZERO) == (a == b)


def test_homogenize_examples():
    h = homogenize(IntPoly.from_dict(1, {(2,): 1, (0,): 1}))
    assert h.degrees == (2,)
    assert sorted(h.monomials()) == sorted([(1, ((2, 0),)), (1, ((0, 2),))])
    assert str(h) == "V1^2 + U1^2"
    h = homogenize(IntPoly.from_dict(2, {(1, 1): 1, (0, 0): -1}))
    assert str(h) == "-V1*V2 + U1*U2"
    assert str(homogenize(IntPoly.from_dict(1, {(1,): 1}))) == "U1"


int_polys = st.integers(1, 3).flatmap(
    lambda n: st.dictionaries(st.tuples(*[st.integers(0, 3)] * n), st.integers(-4, 4), min_size=1, max_size=5).map(
        lambda d: IntPoly.from_dict(n, d)
    )
).filter(lambda p: p.terms)


@given(int_polys)
def test_homogenize_against_sympy(p):
    n = p.nvars
    xs = sympy.symbols(f"x1:{n + 1}")
    ys = sympy.symbols(f"y1:{n + 1}")
    expr = sum(cf * sympy.prod([x**k for x, k in zip(xs, e)]) for e, cf in p.terms)
    expected = expr
    for x, y, r in zip(xs, ys, p.degrees()):
        expected = expected.subs(x, x / y) * y**r
    expected = sympy.expand(expected)
    h = homogenize(p)
    got = sum(cf * sympy.prod([x**a * y**b for (x, y), (a, b) in zip(zip(xs, ys), pw)]) for cf, pw in h.monomials())
    assert sympy.expand(got - expected) == 0
    # setting every V to 1 gives the original polynomial back
    assert sympy.expand(got.subs({y: 1 for y in ys}) - expr) == 0
    for _, pw in h.monomials():
        assert all(a + b == r for (a, b), r in zip(pw, h.degrees))


def test_predicate_examples():
    X = IntPoly.from_dict(1, {(1,): 1})
    assert predicate(X, [PPoint(c(1), t(Fraction(1, 2)))]) == ONE
    assert predicate(X, [PPoint(t(Fraction(1, 2)), c(1))]) == v(Fraction(1, 2))
    with pytest.raises(ValueError):
        predicate(X, [])


@given(points, points, st.sampled_from(GRID[:40]))
def test_predicate_reproduces_twisted_cross_difference(b, a, sb):
    # XY - Z on (b, a, s(b)) equals |b° a° s(b)* - s(b)° b* a*|
    p = IntPoly.from_dict(3, {(1, 1, 0): 1, (0, 0, 1): -1})
    direct = (b.num * a.num * sb.den - sb.num * b.den * a.den).valuation()
    assert predicate(p, [b, a, sb]) == direct


@given(int_polys, st.data())
def test_representative_invariance_and_bound(p, data):
    pts = [data.draw(points) for _ in range(p.nvars)]
    us = [data.draw(units) for _ in range(p.nvars)]
    base = predicate(p, pts)
    assert base is ZERO or compare(base, ONE) <= 0
    scaled = [(a.num * u, a.den * u) for a, u in zip(pts, us)]
    assert predicate_pairs(p, scaled) == base
    ms = [data.draw(monomials) for _ in range(p.nvars)]
    assert predicate_pairs(p, [(a.num * m, a.den * m) for a, m in zip(pts, ms)]) == base


def _real(x) -> float:
    return 0.0 if x is ZERO else float(x)


def test_uniform_continuity_modulus():
    polys = [
        IntPoly.from_dict(1, {(1,): 1}),
        IntPoly.from_dict(1, {(2,): 1, (0,): 1}),
        IntPoly.from_dict(2, {(1, 1): 1, (0, 0): -1}),
        IntPoly.from_dict(2, {(1, 0): 1, (0, 1): -1}),
    ]
    pool = GRID[:60]
    findings = []
    for p in polys:
        for args_a in itertools.product(pool[:12], repeat=p.nvars):
            for args_b in itertools.product(pool[:12], repeat=p.nvars):
                lhs = abs(_real(predicate(p, args_a)) - _real(predicate(p, args_b)))
                rhs = max(_real(distance(x, y)) for x, y in zip(args_a, args_b))
                if lhs > rhs + 1e-12:
                    findings.append((str(p), args_a, args_b, lhs, rhs))
    if findings:
        print(f"modulus findings: {len(findings)}, first: {findings[0]}")
    assert not findings


def test_hom_poly_evaluate_matches_direct():
    h = homogenize(IntPoly.from_dict(1, {(2,): 1, (0,): 1}))
    x, y = 1 + t(Fraction(1, 2)), t(Fraction(1, 3))
    assert h.evaluate([(x, y)]) == x * x + y * y
