import random

import pytest

from qnef.lattice import Lattice
from qnef.surface import (
    ContextError,
    Effectivity,
    LineBundle,
    SurfaceContext,
    SurfaceKind,
    nodal_list_hash,
    validate_ample,
)

U = Lattice([[0, 1], [1, 0]])
L3 = Lattice([[4, 0, 0], [0, -2, 1], [0, 1, -2]])


def k3u():
    return SurfaceContext(SurfaceKind.K3, U, (1, 2))


def k3l3():
    return SurfaceContext(SurfaceKind.K3, L3, (3, -1, -1))


def test_validate_ample():
    assert validate_ample(U, (1, 2)) is None
    assert validate_ample(L3, (3, -1, -1)) is None
    rej = validate_ample(U, (1, 1))
    assert rej is not None and rej.reason == "root_on_wall"
    assert rej.cls == (1, -1)
    rej = validate_ample(U, (0, 1))
    assert rej is not None and rej.reason == "not_positive_square"
    rej = validate_ample(U, (1, 2), nodal=[(1, -1)])
    assert rej is None
    rej = validate_ample(U, (2, 1), nodal=[(1, -1)])
    assert rej is not None and rej.reason == "negative_on_nodal"


def test_context_construction_errors():
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.K3, Lattice([[-2]]), (1,))
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.K3, U, (1, 1))
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.K3, U, (1, 2), nodal=[(1, -1)])
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.K3, U, (1, 2), half_fibers={(0, 1): {0}})
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2), nodal=[(0, 1)])  # norm 0
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2), half_fibers={(0, 2): {0}})
    with pytest.raises(ContextError):
        SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2), half_fibers={(0, 1): set()})


def test_context_flags():
    ctx = k3u()
    assert ctx.chi == 2
    assert not ctx.conditional
    assert not ctx.nonstandard_lattice
    enr = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert enr.chi == 1
    assert not enr.conditional
    assert enr.nonstandard_lattice  # rank 2, not the rank-10 unimodular lattice
    nod = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2), nodal=[(1, -1)])
    assert nod.conditional


def test_euler_char_and_serre_dual():
    ctx = k3u()
    assert ctx.euler_char(LineBundle((0, 0))) == 2
    assert ctx.euler_char(LineBundle((0, 2))) == 2
    assert ctx.euler_char(LineBundle((1, 2))) == 4
    assert ctx.serre_dual(LineBundle((1, 2))) == LineBundle((-1, -2))
    enr = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert enr.euler_char(LineBundle((0, 2))) == 1
    assert enr.serre_dual(LineBundle((0, 2), 0)) == LineBundle((0, -2), 1)
    assert enr.serre_dual(LineBundle((0, 2), 1)) == LineBundle((0, -2), 0)


def test_is_effective_k3():
    ctx = k3u()
    eff = ctx.is_effective
    assert eff(LineBundle((0, 0))) is Effectivity.EFFECTIVE
    assert eff(LineBundle((0, 1))) is Effectivity.EFFECTIVE
    assert eff(LineBundle((0, -1))) is Effectivity.NOT_EFFECTIVE
    assert eff(LineBundle((1, -1))) is Effectivity.EFFECTIVE  # root, degree 1
    assert eff(LineBundle((-1, 1))) is Effectivity.NOT_EFFECTIVE
    ctx3 = k3l3()
    assert ctx3.is_effective(LineBundle((0, 1, 0))) is Effectivity.EFFECTIVE
    # norm -8, positive degree: lattice data does not decide
    assert ctx3.is_effective(LineBundle((0, 2, 0))) is Effectivity.UNDECIDABLE
    with pytest.raises(ContextError):
        eff(LineBundle((0, 1), 1))  # no torsion on K3


def test_is_effective_enriques_modes():
    unnodal = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert unnodal.is_effective(LineBundle((1, -1))) is Effectivity.NOT_EFFECTIVE
    assert unnodal.is_effective(LineBundle((0, 1), 1)) is Effectivity.EFFECTIVE
    assert unnodal.is_effective(LineBundle((0, 0), 1)) is Effectivity.NOT_EFFECTIVE
    nod = SurfaceContext(SurfaceKind.ENRIQUES, L3, (3, -1, -1), nodal=[(0, 1, 0)])
    assert nod.is_effective(LineBundle((0, 1, 0))) is Effectivity.EFFECTIVE
    assert nod.is_effective(LineBundle((0, 0, 1))) is Effectivity.UNDECIDABLE
    assert nod.is_effective(LineBundle((0, 1, 1))) is Effectivity.UNDECIDABLE


def test_nodal_combination_search():
    nod = SurfaceContext(
        SurfaceKind.ENRIQUES, L3, (3, -1, -1), nodal=[(0, 1, 0), (0, 0, 1)]
    )
    assert nod.is_nodal_combination((0, 1, 1))
    assert nod.is_nodal_combination((0, 1, 0))
    assert not nod.is_nodal_combination((1, 0, 0))
    assert nod.is_effective(LineBundle((0, 1, 1))) is Effectivity.EFFECTIVE
    assert nod.effective_roots_of_degree(2) == ((0, 1, 1),)


def test_effective_roots_by_kind():
    assert k3l3().effective_roots_of_degree(1) == ((0, 0, 1), (0, 1, 0))
    unnodal = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert unnodal.effective_roots_of_degree(1) == ()


def test_nef_and_violator():
    ctx = k3u()
    assert ctx.is_nef(LineBundle((0, 2))) == (True, None)
    assert ctx.is_nef(LineBundle((1, 2))) == (True, None)
    ctx3 = k3l3()
    ok, viol = ctx3.is_nef(LineBundle((1, 1, 1)))
    assert not ok
    assert viol == (0, 0, 1)  # minimal (degree, lex) choice
    with pytest.raises(ValueError):
        ctx3.is_nef(LineBundle((0, 1, 1)))  # negative norm
    # bounded search can be inconclusive: cap below the violator degree
    nodctx = SurfaceContext(
        SurfaceKind.ENRIQUES, L3, (3, -1, -1), nodal=[(0, 1, 1)]
    )
    lb = LineBundle((1, 1, 1))
    assert nodctx.nef_violator(lb, max_degree=1) is None
    assert nodctx.nef_violator(lb, max_degree=2) == ((0, 1, 1), -2)


def test_h2():
    ctx = k3u()
    assert ctx.h2(LineBundle((0, 0))) == 1
    assert ctx.h2(LineBundle((0, 2))) == 0
    enr = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert enr.h2(LineBundle((0, 0))) == 0
    assert enr.h2(LineBundle((0, 0), 1)) == 1
    assert enr.h2(LineBundle((0, 2))) == 0
    with pytest.raises(ValueError):
        ctx.h2(LineBundle((-1, -2)))  # dual has positive degree


def test_half_fiber_bits_default_and_override():
    enr = SurfaceContext(SurfaceKind.ENRIQUES, U, (1, 2))
    assert enr.half_fiber_bits((0, 1)) == frozenset({0, 1})
    custom = SurfaceContext(
        SurfaceKind.ENRIQUES, U, (1, 2), half_fibers={(0, 1): {0}}
    )
    assert custom.half_fiber_bits((0, 1)) == frozenset({0})
    assert custom.half_fiber_bits((1, 0)) == frozenset({0, 1})


def test_nodal_list_hash_canonical():
    a = nodal_list_hash([(1, -1), (0, 1)])
    b = nodal_list_hash([(0, 1), (1, -1)])
    assert a == b
    assert a != nodal_list_hash([(1, -1)])
    assert len(a) == 64


def test_degree_cache_consistency():
    ctx = k3l3()
    rng = random.Random(3)
    for _ in range(50):
        d = rng.randint(1, 14)
        assert ctx.roots_of_degree(d) == ctx.roots_of_degree(d)
        for v in ctx.roots_of_degree(d):
            assert ctx.norm(v) == -2
            assert ctx.degree(LineBundle(v)) == d
