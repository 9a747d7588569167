from __future__ import annotations

import itertools

import pytest

from mvf import ake
from mvf.ake import (
    ACF0,
    PSEUDOFINITE,
    Q,
    RCF,
    ClassDescriptor,
    Hahn,
    MixedDensity,
    MVFDescriptor,
    Verdict,
    canonicalize,
    class_of,
    equiv_fields,
    equivalent,
    is_generating_pair,
    lring_equiv,
    residue_shift,
)
from mvf.groups import R_PLUS, ConcreteGroup, GroupTheory, classify_group
from mvf.values import Value

YES, NO, UNKNOWN = Verdict.YES, Verdict.NO, Verdict.UNKNOWN
TH23 = classify_group(ConcreteGroup.of(2, 3))
TH57 = classify_group(ConcreteGroup.of(5, 7))
TH235 = classify_group(ConcreteGroup.of(2, 3, 5))
TH4_6 = classify_group(ConcreteGroup.of(4, 6))

BASES = [
    Q,
    ACF0,
    RCF,
    PSEUDOFINITE,
    ake.padic_closed(3),
    ake.padic_closed(5),
    ake.laurent_over(Q),
    ake.laurent_over(RCF),
    ake.number_field("Q(i)"),
    ake.custom("mystery"),
]
GROUPS = [R_PLUS, TH23, TH57, TH235, TH4_6]


def test_verdict_logic():
    assert (YES & UNKNOWN) is UNKNOWN and (NO & UNKNOWN) is NO
    assert (YES | UNKNOWN) is YES and (NO | UNKNOWN) is UNKNOWN
    assert Verdict.of(None) is UNKNOWN and not UNKNOWN.decisive


def test_canonicalize_examples():
    assert canonicalize(Hahn(Hahn(Q, TH23), R_PLUS)) == Hahn(Q, TH23)
    assert canonicalize(Hahn(ACF0, R_PLUS)) == ACF0
    assert canonicalize(Hahn(Q, TH23)) == Hahn(Q, TH23)
    assert canonicalize(Hahn(Q, R_PLUS)) == Hahn(Q, R_PLUS)
    trace = []
    canonicalize(Hahn(Hahn(Hahn(RCF, R_PLUS), TH23), R_PLUS), trace)
    assert [s[:2] for s in trace] == ["R2", "R1"]


def test_hahn_rejects_trivial_groups():
    with pytest.raises(ValueError):
        Hahn(Q, GroupTheory.trivial())


def _nested(depth: int):
    for combo in itertools.product(GROUPS, repeat=depth):
        for b in BASES:
            e = b
            for g in combo:
                e = Hahn(e, g)
            yield e


def test_canonicalize_terminates_and_shrinks():
    for depth in range(4):
        for e in _nested(depth):
            c = canonicalize(e)
            assert ake._size(c) <= ake._size(e)
            assert canonicalize(c) == c


def test_rewrites_preserve_verdicts():
    # each rewrite step keeps the verdict against every catalog expression
    for e in _nested(2):
        trace = []
        c = canonicalize(e, trace)
        if not trace:
            continue
        for other in itertools.chain(_nested(0), _nested(1)):
            assert equiv_fields(e, other) is equiv_fields(c, other)


GOLDEN = [
    (Hahn(Q, TH23), Hahn(Q, TH57), YES),
    (Hahn(Q, R_PLUS), Q, NO),
    (Hahn(ACF0, R_PLUS), ACF0, YES),
    (Hahn(RCF, R_PLUS), RCF, YES),
    (Hahn(ake.padic_closed(3), R_PLUS), ake.padic_closed(3), YES),
    (Hahn(ake.laurent_over(Q), R_PLUS), ake.laurent_over(Q), YES),
    (Hahn(PSEUDOFINITE, R_PLUS), PSEUDOFINITE, NO),
    (Hahn(ake.number_field("Q(i)"), R_PLUS), ake.number_field("Q(i)"), NO),
    (Q, PSEUDOFINITE, NO),
    (ACF0, RCF, NO),
    (Hahn(Q, TH23), Hahn(Q, TH235), NO),
    (Hahn(Q, TH23), Hahn(Q, TH4_6), YES),
    (Hahn(Q, TH23), Hahn(RCF, TH23), NO),
    (Q, Q, YES),
    (ake.custom("mystery"), Q, UNKNOWN),
]


@pytest.mark.parametrize("a,b,expected", GOLDEN, ids=[f"{a}~{b}" for a, b, _ in GOLDEN])
def test_equiv_fields_golden(a, b, expected):
    assert equiv_fields(a, b) is expected
    assert equiv_fields(b, a) is expected


def test_generating_pair_examples():
    assert is_generating_pair(TH23, Q) is YES
    assert is_generating_pair(R_PLUS, Hahn(Q, TH23)) is NO
    assert is_generating_pair(R_PLUS, ACF0) is YES
    with pytest.raises(ValueError):
        is_generating_pair(GroupTheory.discrete(), Q)


def test_generating_pair_respects_equivalence():
    equivalent_pairs = [
        ((TH23, Q), (TH57, Q)),
        ((R_PLUS, ACF0), (R_PLUS, Hahn(ACF0, R_PLUS))),
        ((R_PLUS, Hahn(Q, TH23)), (R_PLUS, Hahn(Hahn(Q, TH57), R_PLUS))),
        ((R_PLUS, RCF), (R_PLUS, Hahn(Hahn(RCF, R_PLUS), R_PLUS))),
    ]
    for (d1, l1), (d2, l2) in equivalent_pairs:
        v1, v2 = is_generating_pair(d1, l1), is_generating_pair(d2, l2)
        assert {v1, v2} != {YES, NO}
        assert v1 is v2


def test_class_of_examples():
    c = class_of(MVFDescriptor(Q, group=TH23))
    assert (c.group, c.residue, c.shifted) == (TH23, Q, False)
    c = class_of(MVFDescriptor(Hahn(Q, TH23), group=R_PLUS))
    assert (c.group, c.residue, c.shifted) == (TH23, Q, True)
    assert c.label() == "(Th<2, 3>,Q)"
    c = class_of(MVFDescriptor(ACF0, group=R_PLUS))
    assert (c.group, c.residue, c.shifted) == (R_PLUS, ACF0, False)
    c = class_of(MVFDescriptor(Hahn(Q, R_PLUS), group=R_PLUS))
    assert (c.group, c.residue, c.shifted, c.verdict) == (R_PLUS, Q, True, YES)
    with pytest.raises(MixedDensity):
        class_of(MVFDescriptor(Q, dg=Value.from_rational(1)))


def test_equivalent_examples():
    half, third = Value.from_rational(2), Value.from_rational(3)
    assert equivalent(MVFDescriptor(Q, group=TH23), MVFDescriptor(Hahn(Q, TH23), group=R_PLUS)) is YES
    d2 = MVFDescriptor(Q, dg=half.inverse())
    d3 = MVFDescriptor(Q, dg=third.inverse())
    assert equivalent(d2, d3) is NO
    assert equivalent(d2, MVFDescriptor(Q, dg=half.inverse())) is YES
    assert equivalent(d2, MVFDescriptor(RCF, dg=half.inverse())) is NO
    assert equivalent(MVFDescriptor(Q, group=R_PLUS), MVFDescriptor(PSEUDOFINITE, group=R_PLUS)) is NO
    from mvf.values import ZERO

    assert equivalent(MVFDescriptor(Q, dg=ZERO), MVFDescriptor(Q, dg=ZERO)) is UNKNOWN
    with pytest.raises(MixedDensity):
        equivalent(d2, MVFDescriptor(Q, group=TH23))
    with pytest.raises(ValueError):
        MVFDescriptor(Q)


def test_residue_shift_examples():
    c = ClassDescriptor(TH23, Q)
    k = residue_shift(c)
    assert k.group == R_PLUS and k.residue == Hahn(Q, TH23)
    k = residue_shift(ClassDescriptor(R_PLUS, ACF0))
    assert canonicalize(k.residue) == ACF0


def _catalog_descriptors():
    out = []
    dense = [g for g in GROUPS]
    for b in BASES:
        for g in dense:
            out.append(MVFDescriptor(b, group=g))
            if g is not R_PLUS:
                out.append(MVFDescriptor(Hahn(b, g), group=R_PLUS))
                out.append(MVFDescriptor(Hahn(Hahn(b, g), R_PLUS), group=R_PLUS))
        out.append(MVFDescriptor(Hahn(b, R_PLUS), group=R_PLUS))
    return out


def test_shift_stability_over_catalog():
    for k in _catalog_descriptors():
        c = class_of(k)
        if not c.verdict.decisive:
            continue
        c2 = class_of(residue_shift(c))
        assert c2.verdict is YES
        assert (c2.group, c2.residue) == (c.group, c.residue) or ake.same_class(c, c2) is YES
        assert equivalent(k, residue_shift(c)) is YES


def test_ring_language_cross_check_over_catalog():
    descs = _catalog_descriptors()
    decisive = 0
    for k1, k2 in itertools.combinations_with_replacement(descs, 2):
        r = lring_equiv(k1, k2)  # raises VerdictConflict on disagreement
        e = equivalent(k1, k2)
        if r.decisive and e.decisive:
            assert r is e
            decisive += 1
    assert decisive > 1000


def test_lring_examples():
    k = MVFDescriptor(Q, group=TH23)
    f = MVFDescriptor(Hahn(Q, TH23), group=R_PLUS)
    assert lring_equiv(k, f) is YES and equivalent(k, f) is YES
    a, r = MVFDescriptor(ACF0, group=R_PLUS), MVFDescriptor(RCF, group=R_PLUS)
    assert lring_equiv(a, r) is NO and equivalent(a, r) is NO
    assert lring_equiv(k, k) is YES


def test_unknowns_propagate():
    m = ake.custom("mystery")
    assert class_of(MVFDescriptor(m, group=R_PLUS)).verdict is UNKNOWN
    assert equivalent(MVFDescriptor(m, group=R_PLUS), MVFDescriptor(Q, group=R_PLUS)) is UNKNOWN
    assert class_of(MVFDescriptor(m, group=TH23)).verdict is YES
