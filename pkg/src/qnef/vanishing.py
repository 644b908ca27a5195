"""First-cohomology classification for line bundles with nonnegative square.

The engine peels minimal-degree negatively-pairing rational curve classes
off the bundle until the result is nef (each step subtracts a fixed
component, preserving h^0 while chi drops by pairing+1), then reads the
answer off the nef class: positive square means h^1 = 0, an isotropic
class is a multiple nE of a primitive nef isotropic E with a closed-form
h^1. If any step pairs <= -2, the bundle is obstructed by an effective
(-2)-class; the witness is lifted back to the original bundle and h^1 is
recovered exactly from the chain bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .lattice import Vec, as_vec, divisibility, primitive_part
from .surface import Effectivity, LineBundle, SurfaceContext, SurfaceKind


class H1Case(str, Enum):
    VANISHES = "vanishes"
    ISOTROPIC_MULTIPLE = "isotropic_multiple"  # L ~ n*E, E primitive nef isotropic
    ISOTROPIC_MULTIPLE_TWISTED = "isotropic_multiple_twisted"  # L ~ n*E + K_X
    ROOT_OBSTRUCTED = "root_obstructed"  # some effective root pairs <= -2 with L


class InvariantViolation(RuntimeError):
    """An internal certificate check failed; indicates a bug, never bad input."""


class UndecidableEffectivity(ValueError):
    """Effectivity of the named class cannot be decided from the given data."""

    def __init__(self, cls: Vec, message: str | None = None):
        self.cls = as_vec(cls)
        super().__init__(message or f"effectivity of {list(self.cls)} is undecidable from lattice data")


@dataclass(frozen=True)
class ReductionStep:
    gamma: Vec
    pairing: int  # gamma . before, always < 0
    before: LineBundle
    after: LineBundle


@dataclass(frozen=True)
class ReductionChain:
    steps: tuple[ReductionStep, ...]
    final: LineBundle  # nef (within the searched degree bound)
    bounded: bool = False  # True when a max_degree cut the search short

    @property
    def start(self) -> LineBundle:
        return self.steps[0].before if self.steps else self.final


@dataclass(frozen=True)
class H1Classification:
    case: H1Case
    h0: int
    h1: int
    h2: int
    chain: ReductionChain
    n: int | None = None  # multiplicity when the final class is isotropic
    e: Vec | None = None  # primitive isotropic class
    e_torsion: int | None = None  # bit of the half-fiber used (Enriques)
    witness: Vec | None = None  # effective root with witness . L <= -2
    witness_pairing: int | None = None
    conditional: bool = False


@dataclass(frozen=True)
class QuasiNefReport:
    quasi_nef: bool
    witness: Vec | None = None  # violating root when not quasi-nef
    witness_pairing: int | None = None
    isotropic: tuple[int, Vec] | None = None  # (n, E) when L is a nef isotropic multiple
    conditional: bool = False


@dataclass(frozen=True)
class IsotropicAlignment:
    kind: str  # "positive_pairing" | "common_isotropic"
    pairing: int
    f: Vec | None = None  # shared primitive isotropic class
    a: int | None = None
    b: int | None = None


def _require_classifiable(ctx: SurfaceContext, lb: LineBundle):
    eff = ctx.is_effective(lb)
    if eff is Effectivity.UNDECIDABLE:
        raise UndecidableEffectivity(lb.coords)
    if eff is not Effectivity.EFFECTIVE:
        raise ValueError(f"class {list(lb.coords)} (bit {lb.torsion}) is not effective")
    if ctx.norm(lb.coords) < 0:
        raise ValueError("classification requires norm >= 0")
    if lb.is_zero_class:
        raise ValueError("classification requires a nonzero class")


def nef_reduce(ctx: SurfaceContext, lb: LineBundle, max_degree: int | None = None) -> ReductionChain:
    """Subtract minimal-(degree, lex) negatively-pairing effective roots until nef.

    Each subtracted class is irreducible (a decomposition would contain a
    smaller-degree negative root), so h^0 is preserved along the chain; the
    ample degree drops by at least 1 per step, which bounds the length.
    """
    _require_classifiable(ctx, lb)
    steps = []
    cur = lb
    bounded = False
    while True:
        cap = ctx.degree(cur)
        if max_degree is not None and max_degree < cap:
            cap = max_degree
            bounded = True
        hit = ctx.nef_violator(cur, cap)
        if hit is None:
            break
        gamma, p = hit
        after = LineBundle(tuple(c - g for c, g in zip(cur.coords, gamma)), cur.torsion)
        steps.append(ReductionStep(gamma, p, cur, after))
        if ctx.norm(after.coords) < ctx.norm(cur.coords) or ctx.degree(after) >= ctx.degree(cur):
            raise InvariantViolation("reduction step failed its monotonicity contract")
        cur = after
    return ReductionChain(tuple(steps), cur, bounded)


def isotropic_type(ctx: SurfaceContext, lb: LineBundle) -> tuple[int, Vec]:
    """(n, E) with lb = n*E, E primitive isotropic of positive degree.

    Requires a nonzero nef effective class of square zero; E inherits
    nefness and effectivity from lb since it spans the same ray.
    """
    if lb.is_zero_class or ctx.norm(lb.coords) != 0:
        raise ValueError("isotropic type requires a nonzero class of square zero")
    if ctx.is_effective(lb) is not Effectivity.EFFECTIVE or not ctx.is_nef(lb)[0]:
        raise ValueError("isotropic type requires a nef effective class")
    n = divisibility(lb.coords)
    return n, primitive_part(lb.coords)


def _resolve_isotropic(ctx: SurfaceContext, n: int, e: Vec, bit: int):
    """Case and h^1 for a nef class n*E with torsion bit, by surface kind.

    K3: h^1(nE) = n-1, so n = 1 vanishes and n >= 2 is the isotropic-multiple
    case. Enriques: both torsion versions of E are effective half-fibers by
    default, so bit b is reachable as n*E_b exactly when n*b = bit (mod 2);
    reachable multiples have h^1 = floor(n/2), the twisted ones (n*E + K_X)
    have h^1 = floor((n-1)/2) for n >= 3 and vanish for n <= 2.
    """
    if ctx.kind is SurfaceKind.K3:
        if n >= 2:
            return H1Case.ISOTROPIC_MULTIPLE, n - 1, 0
        return H1Case.VANISHES, 0, None
    allowed = sorted(ctx.half_fiber_bits(e))
    plain = [b for b in allowed if (n * b) % 2 == bit]
    if plain:
        if n >= 2:
            return H1Case.ISOTROPIC_MULTIPLE, n // 2, plain[0]
        return H1Case.VANISHES, 0, plain[0]
    twisted = [b for b in allowed if (n * b + 1) % 2 == bit]
    if not twisted:
        raise InvariantViolation("no half-fiber bit reaches the requested torsion")
    if n >= 3:
        return H1Case.ISOTROPIC_MULTIPLE_TWISTED, (n - 1) // 2, twisted[0]
    return H1Case.VANISHES, 0, twisted[0]


def lift_witness(ctx: SurfaceContext, chain: ReductionChain, delta: Vec, stage: int) -> Vec:
    """Transport a witness root from the given chain stage back to the start.

    delta must satisfy delta.L_stage <= -2. Walking back one step against
    L = L_next + Gamma: either delta already pairs <= -2 with L, or its
    pairing is forced to -1 and delta+Gamma is again a (-2)-class, effective,
    with (delta+Gamma).L = -2. Every claim is checked; violations raise.
    """
    delta = as_vec(delta)
    w = delta
    if ctx.norm(w) != -2:
        raise InvariantViolation("witness must be a (-2)-class")
    if ctx.pair(w, chain.steps[stage].before.coords if stage < len(chain.steps) else chain.final.coords) > -2:
        raise InvariantViolation("witness does not pair <= -2 at its stage")
    for j in range(stage - 1, -1, -1):
        step = chain.steps[j]
        p = ctx.pair(w, step.before.coords)
        if p <= -2:
            continue
        if p != -1:
            raise InvariantViolation(
                f"witness pairing {p} at stage {j}; the signature argument forces -1 here"
            )
        w = tuple(a + b for a, b in zip(w, step.gamma))
        if ctx.norm(w) != -2:
            raise InvariantViolation("lifted class lost norm -2")
    start = chain.start
    if ctx.pair(w, start.coords) > -2:
        raise InvariantViolation("lifted witness does not pair <= -2 with the original class")
    if ctx.is_effective(LineBundle(w)) is not Effectivity.EFFECTIVE:
        raise InvariantViolation("lifted witness is not an effective class")
    return w


def classify_h1(ctx: SurfaceContext, lb: LineBundle, max_degree: int | None = None) -> H1Classification:
    """Full trichotomy for h^1 of an effective class with norm >= 0.

    h^1 != 0 exactly when the class is a nef isotropic multiple nE (n >= 2),
    its twist by the canonical torsion (Enriques, n >= 3), or some effective
    (-2)-class pairs with it <= -2; in the last case h^1 equals the nef
    endpoint's h^1 plus sum(-pairing - 1) over the chain, because each step
    removes a fixed component (h^0 constant, h^2 stays 0, chi shifts).
    """
    _require_classifiable(ctx, lb)
    chain = nef_reduce(ctx, lb, max_degree)
    final = chain.final

    if ctx.norm(final.coords) > 0:
        final_case, final_h1 = H1Case.VANISHES, 0
        n = e = ebit = None
    else:
        n = divisibility(final.coords)
        e = primitive_part(final.coords)
        final_case, final_h1, ebit = _resolve_isotropic(ctx, n, e, final.torsion)

    bad = next((i for i, s in enumerate(chain.steps) if s.pairing <= -2), None)
    witness = witness_pairing = None
    if bad is not None:
        case = H1Case.ROOT_OBSTRUCTED
        witness = lift_witness(ctx, chain, chain.steps[bad].gamma, bad)
        witness_pairing = ctx.pair(witness, lb.coords)
        h1v = final_h1 + sum(-s.pairing - 1 for s in chain.steps)
        n = e = ebit = None  # lb itself is not an isotropic multiple here
    else:
        case = final_case
        h1v = final_h1
        if chain.steps and case is not H1Case.VANISHES:
            # a chain of -1 steps cannot end on n*E with n >= 2: the last step
            # would give Gamma.L = n(E.Gamma) - 2 = -1, impossible over Z
            raise InvariantViolation("nonzero chain reached an isotropic multiple")
        if chain.steps:
            n = e = ebit = None  # vanishes after reduction; lb is not n*E itself

    h2 = ctx.h2(lb)
    h0 = ctx.euler_char(lb) + h1v - h2
    if h0 < 1:
        raise InvariantViolation("an effective class must have h0 >= 1")
    return H1Classification(
        case=case,
        h0=h0,
        h1=h1v,
        h2=h2,
        chain=chain,
        n=n,
        e=e,
        e_torsion=ebit,
        witness=witness,
        witness_pairing=witness_pairing,
        conditional=ctx.conditional or chain.bounded,
    )


def is_quasi_nef(ctx: SurfaceContext, lb: LineBundle, max_degree: int | None = None) -> QuasiNefReport:
    """L is quasi-nef iff L^2 >= 0 and every effective root pairs >= -1 with L.

    Equivalent to: h^1 = 0 or L is a nef isotropic multiple; so the
    classification decides it, and the obstructed case hands back the
    violating root as a certificate.
    """
    if lb.is_zero_class:
        if ctx.is_effective(lb) is not Effectivity.EFFECTIVE:
            raise ValueError("quasi-nefness is defined for effective classes")
        return QuasiNefReport(True)
    cls = classify_h1(ctx, lb, max_degree)
    if cls.case is H1Case.ROOT_OBSTRUCTED:
        return QuasiNefReport(
            False,
            witness=cls.witness,
            witness_pairing=cls.witness_pairing,
            conditional=cls.conditional,
        )
    iso = None
    if not cls.chain.steps and ctx.norm(lb.coords) == 0:
        iso = (divisibility(lb.coords), primitive_part(lb.coords))
    return QuasiNefReport(True, isotropic=iso, conditional=cls.conditional)


def check_isotropic_alignment(ctx: SurfaceContext, a, b) -> IsotropicAlignment:
    """Certify the pairing sign law for two effective classes of norm >= 0.

    Their pairing is never negative; it is zero exactly when both classes
    are multiples of one primitive isotropic class, which is returned with
    the two multiplicities. Inputs that break the law raise ValueError.
    """
    a, b = as_vec(a), as_vec(b)
    for v in (a, b):
        if all(x == 0 for x in v):
            raise ValueError("alignment check requires nonzero classes")
        if ctx.norm(v) < 0 or ctx.is_effective(LineBundle(v)) is not Effectivity.EFFECTIVE:
            raise ValueError(f"{list(v)} is not an effective class with norm >= 0")
    p = ctx.pair(a, b)
    if p < 0:
        raise ValueError("negative pairing: the inputs cannot both be effective with norm >= 0")
    if p > 0:
        return IsotropicAlignment("positive_pairing", p)
    fa, fb = primitive_part(a), primitive_part(b)
    if fa != fb or ctx.norm(fa) != 0 or ctx.norm(a) != 0 or ctx.norm(b) != 0:
        raise ValueError("zero pairing without a common isotropic ray: invalid effectivity input")
    return IsotropicAlignment("common_isotropic", 0, f=fa, a=divisibility(a), b=divisibility(b))


def h1(ctx: SurfaceContext, lb: LineBundle) -> int:
    """h^1 for any class with norm >= 0 (zero classes and duals included)."""
    if lb.is_zero_class:
        return 0
    if ctx.is_effective(lb) is Effectivity.EFFECTIVE:
        return classify_h1(ctx, lb).h1
    if ctx.norm(lb.coords) < 0:
        raise ValueError("h1 for classes of negative square is out of scope")
    # not effective with norm >= 0: the dual is, and h^1 is Serre-symmetric
    return classify_h1(ctx, ctx.serre_dual(lb)).h1


def h0(ctx: SurfaceContext, lb: LineBundle) -> int:
    """h^0 for any class with norm >= 0."""
    if lb.is_zero_class:
        return 1 if lb.torsion == 0 else 0
    eff = ctx.is_effective(lb)
    if eff is Effectivity.EFFECTIVE:
        return classify_h1(ctx, lb).h0
    if eff is Effectivity.UNDECIDABLE:
        raise UndecidableEffectivity(lb.coords)
    return 0


@dataclass(frozen=True)
class BundleAnalysis:
    """Everything the CLI reports about one line bundle."""

    bundle: LineBundle
    status: str  # "ok" | "undecidable" | "out_of_scope"
    effective: Effectivity
    norm: int
    degree: int
    euler: int
    h0: int | None = None
    h1: int | None = None
    h2: int | None = None
    nef: bool | None = None
    nef_violator: Vec | None = None
    quasi_nef: bool | None = None
    classification: H1Classification | None = None
    via_serre_dual: bool = False
    conditional: bool = False
    notes: tuple[str, ...] = ()


def analyze(ctx: SurfaceContext, lb: LineBundle, max_degree: int | None = None) -> BundleAnalysis:
    """Classify one bundle, routing the edge cases.

    Zero classes short-circuit (h^0(O) = 1, the canonical bundle has
    h^0 = h^1 = 0, h^2 = 1). A non-effective class with norm >= 0 is
    analyzed through its Serre dual K_X - L, which is effective; negative
    squares other than the effectivity report are out of scope.
    """
    eff = ctx.is_effective(lb)
    nrm = ctx.norm(lb.coords)
    deg = ctx.degree(lb)
    euler = ctx.euler_char(lb)
    base = dict(
        bundle=lb, effective=eff, norm=nrm, degree=deg, euler=euler,
        conditional=ctx.conditional,
    )

    if lb.is_zero_class:
        if lb.torsion == 0:
            return BundleAnalysis(
                status="ok", h0=1, h1=0, h2=(1 if ctx.kind is SurfaceKind.K3 else 0),
                nef=True, quasi_nef=True, notes=("trivial class",), **base,
            )
        return BundleAnalysis(
            status="ok", h0=0, h1=0, h2=1, nef=True, quasi_nef=None,
            notes=("canonical torsion class",), **base,
        )

    if eff is Effectivity.UNDECIDABLE:
        return BundleAnalysis(status="undecidable", notes=("effectivity undecidable from the declared data",), **base)

    if nrm < 0:
        return BundleAnalysis(status="out_of_scope", notes=("negative square: cohomology not computed",), **base)

    if eff is Effectivity.EFFECTIVE:
        cls = classify_h1(ctx, lb, max_degree)
        qn = is_quasi_nef(ctx, lb, max_degree)
        return BundleAnalysis(
            status="ok", h0=cls.h0, h1=cls.h1, h2=cls.h2,
            nef=not cls.chain.steps, nef_violator=(cls.chain.steps[0].gamma if cls.chain.steps else None),
            quasi_nef=qn.quasi_nef, classification=cls,
            **{**base, "conditional": cls.conditional},
        )

    # not effective, norm >= 0: the dual K_X - L is effective and nonzero
    dual = ctx.serre_dual(lb)
    cls = classify_h1(ctx, dual, max_degree)
    return BundleAnalysis(
        status="ok", h0=0, h1=cls.h1, h2=cls.h0, nef=None, quasi_nef=None,
        classification=cls, via_serre_dual=True,
        notes=("analyzed through the Serre dual, which is effective",),
        **{**base, "conditional": cls.conditional},
    )
