from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvf.values import ONE, ZERO, Surd, Value, compare, from_rational, max_value, min_value, parse_value

PRIMES = [2, 3, 5, 7]


def trial_factor(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


exps = st.fractions(min_value=-4, max_value=4, max_denominator=6)
values = st.dictionaries(st.sampled_from(PRIMES), exps, max_size=3).map(Value)


def as_mp(v: Value):
    with mpmath.workdps(60):
        out = mpmath.mpf(1)
        for p, e in v.exponents.items():
            out *= mpmath.power(p, mpmath.mpf(e.numerator) / e.denominator)
        return out


def test_mul_examples():
    assert Value({2: 1}) * Value({2: -1}) == ONE
    assert Value({2: 1}) * Value({3: 1}) == Value({2: 1, 3: 1})
    assert Value({2: Fraction(1, 2)}) * Value({2: Fraction(1, 2)}) == Value({2: 1})


def test_compare_examples():
    sqrt6 = Value({2: Fraction(1, 2), 3: Fraction(1, 2)})
    assert compare(Value({2: 1}), sqrt6) == -1
    assert compare(sqrt6, sqrt6) == 0
    assert compare(Value({2: -1}), ONE) == -1


def test_from_rational_examples():
    assert from_rational(12).exponents == {2: 2, 3: 1}
    assert from_rational(1) == ONE
    assert from_rational(Fraction(3, 4)).exponents == {3: 1, 2: -2}
    for bad in (0, -3, Fraction(-1, 2)):
        with pytest.raises(ValueError):
            from_rational(bad)


def test_max_min_examples():
    half, quarter = from_rational(Fraction(1, 2)), from_rational(Fraction(1, 4))
    assert max_value(half, quarter) == half
    assert max_value(half, half) == half
    assert min_value(Value({2: 1}), Value({3: 1})) == Value({2: 1})


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_factorization_matches_trial_division(n, d):
    q = Fraction(n, d)
    expected = trial_factor(q.numerator)
    for p, k in trial_factor(q.denominator).items():
        expected[p] = expected.get(p, 0) - k
    assert from_rational(q).exponents == {p: k for p, k in expected.items() if k}


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000), st.fractions(min_value=Fraction(1, 1000), max_value=1000))
def test_from_rational_homomorphism(a, b):
    assert from_rational(a * b) == from_rational(a) * from_rational(b)


@given(values, values, values)
def test_order_compatible_with_mul(a, b, c):
    if compare(a, b) < 0:
        assert compare(a * c, b * c) < 0
    assert compare(a, b) == -compare(b, a)


@given(values, values)
def test_compare_agrees_with_high_precision(a, b):
    x, y = as_mp(a), as_mp(b)
    if abs(x - y) > mpmath.mpf(10) ** -30:
        assert compare(a, b) == (1 if x > y else -1)
    if abs(float(a) - float(b)) > 1e-6:
        assert compare(a, b) == (1 if float(a) > float(b) else -1)


def test_zero_marker_below_everything():
    tiny = Value({2: -10**6})
    assert compare(ZERO, tiny) == -1
    assert compare(tiny, ZERO) == 1
    assert compare(ZERO, ZERO) == 0
    assert ZERO * tiny is ZERO


def test_text_round_trip():
    for text in ("1", "2^1/2 * 3^-1", "5^-7/3"):
        assert str(parse_value(text)) == text
    assert parse_value("3/4") == from_rational(Fraction(3, 4))
    assert parse_value("2^2/4") == Value({2: Fraction(1, 2)})


def test_canonical_exponents():
    v = Value({2: Fraction(2, 4), 3: 0})
    assert v.exponents == {2: Fraction(1, 2)}
    with pytest.raises(ValueError):
        Value({4: 1})


@given(st.lists(st.tuples(st.fractions(min_value=-5, max_value=5, max_denominator=7), values), max_size=4))
def test_surd_sign_matches_high_precision(terms):
    s = Surd(0)
    with mpmath.workdps(80):
        ref = mpmath.mpf(0)
        for c, v in terms:
            s = s + Surd(v) * c
            ref += mpmath.mpf(c.numerator) / c.denominator * as_mp(v)
        if abs(ref) > mpmath.mpf(10) ** -50:
            assert s.sign() == (1 if ref > 0 else -1)
        elif not terms:
            assert s.sign() == 0


def test_surd_exact_cancellation():
    r2 = Surd(Value({2: Fraction(1, 2)}))
    r8 = Surd(Value({2: Fraction(3, 2)}))
    assert (r8 - r2 * 2).sign() == 0
    assert (r2 * r2) == Surd(2)
    assert (Surd(Value({2: Fraction(1, 2), 3: Fraction(1, 2)})) - 2).sign() == 1
    assert math.isclose(float(r2 + 1), math.sqrt(2) + 1)
