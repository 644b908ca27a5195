import random

import pytest

from qnef.lattice import Lattice
from qnef.surface import Effectivity, LineBundle, SurfaceContext, SurfaceKind
from qnef.vanishing import (
    H1Case,
    InvariantViolation,
    UndecidableEffectivity,
    analyze,
    check_isotropic_alignment,
    classify_h1,
    h0,
    h1,
    is_quasi_nef,
    isotropic_type,
    lift_witness,
    nef_reduce,
)

U = Lattice([[0, 1], [1, 0]])
L3 = Lattice([[4, 0, 0], [0, -2, 1], [0, 1, -2]])
K3U = SurfaceContext(SurfaceKind.K3, U, (1, 2))
K3L3 = SurfaceContext(SurfaceKind.K3, L3, (3, -1, -1))
ENRU = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))


def test_nef_reduce_worked_chain():
    chain = nef_reduce(K3L3, LineBundle((1, 1, 1)))
    assert [(s.gamma, s.pairing) for s in chain.steps] == [
        ((0, 0, 1), -1),
        ((0, 1, 0), -2),
    ]
    assert chain.final.coords == (1, 0, 0)
    assert not chain.bounded
    assert chain.start.coords == (1, 1, 1)


def test_nef_reduce_trivial_on_nef():
    chain = nef_reduce(K3U, LineBundle((0, 2)))
    assert chain.steps == ()
    assert chain.final.coords == (0, 2)


def test_nef_reduce_requires_classifiable():
    with pytest.raises(ValueError):
        nef_reduce(K3U, LineBundle((0, -2)))
    with pytest.raises(ValueError):
        nef_reduce(K3L3, LineBundle((0, 1, 1)))  # norm -2
    with pytest.raises(ValueError):
        nef_reduce(K3U, LineBundle((0, 0)))


def test_nef_reduce_bounded_flag():
    chain = nef_reduce(K3L3, LineBundle((1, 1, 1)), max_degree=1)
    assert chain.bounded
    full = nef_reduce(K3L3, LineBundle((1, 1, 1)), max_degree=100)
    assert not full.bounded and full.final.coords == (1, 0, 0)


def test_isotropic_type():
    assert isotropic_type(K3U, LineBundle((0, 3))) == (3, (0, 1))
    with pytest.raises(ValueError):
        isotropic_type(K3U, LineBundle((1, 2)))  # norm > 0
    with pytest.raises(ValueError):
        isotropic_type(K3U, LineBundle((0, -2)))


def test_lift_witness_worked_example():
    chain = nef_reduce(K3L3, LineBundle((1, 1, 1)))
    w = lift_witness(K3L3, chain, chain.steps[1].gamma, 1)
    assert w == (0, 1, 1)
    assert K3L3.pair(w, (1, 1, 1)) == -2
    assert K3L3.norm(w) == -2
    # stage-0 witness with pairing <= -2 lifts to itself
    w0 = lift_witness(K3L3, chain, (0, 1, 1), 0)
    assert w0 == (0, 1, 1)


def test_classify_worked_fixture():
    cls = classify_h1(K3L3, LineBundle((1, 1, 1)))
    assert cls.case is H1Case.ROOT_OBSTRUCTED
    assert cls.h1 == 1
    assert cls.h0 == 4
    assert cls.h2 == 0
    assert cls.witness == (0, 1, 1)
    assert cls.witness_pairing == -2
    assert cls.n is None and cls.e is None
    assert not cls.conditional


def test_classify_k3_formula():
    for n in range(1, 11):
        cls = classify_h1(K3U, LineBundle((0, n)))
        if n == 1:
            assert cls.case is H1Case.VANISHES and cls.h1 == 0
        else:
            assert cls.case is H1Case.ISOTROPIC_MULTIPLE
            assert cls.h1 == n - 1
            assert (cls.n, cls.e) == (n, (0, 1))
        assert cls.h0 == n + 1  # h0(nE) = n + 1 on a K3
        assert cls.h2 == 0


def test_classify_enriques_bits():
    for n in range(1, 11):
        plain = classify_h1(ENRU, LineBundle((0, n), 0))
        assert plain.h1 == (n // 2 if n >= 2 else 0)
        twisted = classify_h1(ENRU, LineBundle((0, n), 1))
        assert twisted.h1 == ((n - 1) // 2 if n >= 3 else 0)
        if n >= 2 and n % 2 == 0:
            assert plain.case is H1Case.ISOTROPIC_MULTIPLE
            assert twisted.case is (
                H1Case.ISOTROPIC_MULTIPLE_TWISTED if n >= 3 else H1Case.VANISHES
            )
        if n >= 3 and n % 2 == 1:
            # odd multiples absorb the twist into the other half-fiber
            assert plain.case is H1Case.ISOTROPIC_MULTIPLE
            assert twisted.case is H1Case.ISOTROPIC_MULTIPLE
            assert twisted.e_torsion == 1


def test_half_fiber_override_forces_twisted():
    # if E is only effective in bit 0, odd n with bit 1 has no plain form
    ctx = SurfaceContext(
        SurfaceKind.ENRIQUES, U, (1, 2), half_fibers={(0, 1): {0}}
    )
    cls = classify_h1(ctx, LineBundle((0, 5), 1))
    assert cls.case is H1Case.ISOTROPIC_MULTIPLE_TWISTED
    assert cls.h1 == 2  # floor((5-1)/2)
    plain = classify_h1(ctx, LineBundle((0, 5), 0))
    assert plain.case is H1Case.ISOTROPIC_MULTIPLE
    assert plain.h1 == 2


def test_classify_vanishes_after_reduction():
    # (1,0,-1) reduces by one -1 step to the nef (1,-1,-1), norm > 0: h1 = 0
    cls = classify_h1(K3L3, LineBundle((1, 0, -1)))
    assert cls.case is H1Case.VANISHES
    assert cls.h1 == 0
    assert [(s.gamma, s.pairing) for s in cls.chain.steps] == [((0, 1, 0), -1)]
    assert cls.chain.final.coords == (1, -1, -1)
    assert cls.n is None  # the class itself is not an isotropic multiple


def test_classify_single_step_obstruction():
    # (0,1,0) pairs -2 with (1,1,0): obstructed in one step, witness = gamma
    cls = classify_h1(K3L3, LineBundle((1, 1, 0)))
    assert cls.case is H1Case.ROOT_OBSTRUCTED
    assert cls.witness == (0, 1, 0)
    assert cls.witness_pairing == -2
    assert cls.h1 == 1


def test_classify_undecidable_propagates():
    nod = SurfaceContext(
        SurfaceKind.ENRIQUES, L3, (3, -1, -1), nodal=[(0, 1, 0)]
    )
    # nef search hits the undecidable root (0,0,1)? no: only certified
    # roots count, so classification completes but is conditional
    cls = classify_h1(nod, LineBundle((1, 1, 1), 0))
    assert cls.conditional


def test_is_quasi_nef_examples():
    rep = is_quasi_nef(K3U, LineBundle((0, 2)))
    assert rep.quasi_nef
    assert rep.isotropic == (2, (0, 1))
    rep = is_quasi_nef(K3L3, LineBundle((1, 1, 1)))
    assert not rep.quasi_nef
    assert rep.witness == (0, 1, 1)
    assert rep.witness_pairing == -2
    assert is_quasi_nef(K3L3, LineBundle((3, -1, -1))).quasi_nef
    assert is_quasi_nef(K3U, LineBundle((0, 0))).quasi_nef
    # not nef but quasi-nef: the only violation is a -1 pairing
    rep = is_quasi_nef(K3L3, LineBundle((1, 0, -1)))
    assert rep.quasi_nef
    assert rep.isotropic is None
    assert not K3L3.is_nef(LineBundle((1, 0, -1)))[0]


def test_check_isotropic_alignment_examples():
    res = check_isotropic_alignment(K3U, (0, 2), (0, 3))
    assert res.kind == "common_isotropic"
    assert (res.f, res.a, res.b) == ((0, 1), 2, 3)
    res = check_isotropic_alignment(K3U, (1, 0), (0, 1))
    assert res.kind == "positive_pairing" and res.pairing == 1
    res = check_isotropic_alignment(K3L3, (1, 0, 0), (1, 1, 1))
    assert res.kind == "positive_pairing" and res.pairing == 4
    with pytest.raises(ValueError):
        check_isotropic_alignment(K3U, (1, -1), (0, 1))  # negative norm input
    with pytest.raises(ValueError):
        check_isotropic_alignment(K3U, (0, 0), (0, 1))


def test_h0_h1_wrappers():
    assert h1(K3U, LineBundle((0, 2))) == 1
    assert h0(K3U, LineBundle((0, 2))) == 3
    assert h1(K3U, LineBundle((1, 2))) == 0
    assert h0(K3U, LineBundle((1, 2))) == 4
    assert h1(K3U, LineBundle((0, 0))) == 0
    assert h0(K3U, LineBundle((0, 0))) == 1
    # Serre symmetry: h1 of a non-effective class via its dual
    assert h1(K3U, LineBundle((0, -2))) == 1
    assert h0(K3U, LineBundle((0, -2))) == 0
    with pytest.raises(ValueError):
        h1(K3U, LineBundle((1, -1)))


def test_case_stable_under_ample_rescaling():
    doubled = SurfaceContext(SurfaceKind.K3, L3, (6, -2, -2))
    rng = random.Random(19)
    for _ in range(40):
        v = (rng.randint(0, 3), rng.randint(-2, 2), rng.randint(-2, 2))
        lb = LineBundle(v)
        if (
            all(x == 0 for x in v)
            or K3L3.norm(v) < 0
            or K3L3.is_effective(lb) is not Effectivity.EFFECTIVE
        ):
            continue
        a = classify_h1(K3L3, lb)
        b = classify_h1(doubled, lb)
        assert a.case is b.case
        assert a.h1 == b.h1


def test_analyze_routing():
    ba = analyze(K3U, LineBundle((0, 0)))
    assert (ba.h0, ba.h1, ba.h2) == (1, 0, 1)
    ba = analyze(ENRU, LineBundle((0, 0), 1))
    assert (ba.h0, ba.h1, ba.h2) == (0, 0, 1)
    ba = analyze(K3L3, LineBundle((0, 1, 1)))
    assert ba.status == "out_of_scope"
    assert ba.h0 is None
    ba = analyze(K3U, LineBundle((0, -2)))
    assert ba.via_serre_dual
    assert (ba.h0, ba.h1, ba.h2) == (0, 1, 3)
    nod = SurfaceContext(SurfaceKind.ENRIQUES, L3, (3, -1, -1), nodal=[(0, 1, 0)])
    ba = analyze(nod, LineBundle((0, 0, 1)))
    assert ba.status == "undecidable"


def test_reduction_chain_invariants_random():
    rng = random.Random(47)
    checked = 0
    while checked < 120:
        v = (rng.randint(0, 3), rng.randint(-3, 3), rng.randint(-3, 3))
        lb = LineBundle(v)
        if (
            all(x == 0 for x in v)
            or K3L3.norm(v) < 0
            or K3L3.is_effective(lb) is not Effectivity.EFFECTIVE
        ):
            continue
        checked += 1
        cls = classify_h1(K3L3, lb)
        chain = cls.chain
        for s in chain.steps:
            assert s.pairing < 0
            assert K3L3.norm(s.gamma) == -2
            assert K3L3.norm(s.after.coords) >= K3L3.norm(s.before.coords)
            assert K3L3.degree(s.after) < K3L3.degree(s.before)
        if cls.case is H1Case.ROOT_OBSTRUCTED:
            assert K3L3.pair(cls.witness, v) <= -2
            assert K3L3.norm(cls.witness) == -2
            assert cls.h1 >= 1
        assert cls.h0 - cls.h1 + cls.h2 == K3L3.euler_char(lb)
