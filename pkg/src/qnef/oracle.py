"""Brute-force checkers used to cross-validate the fast paths.

The box scanner is deliberately naive (coordinate products, no pruning) so
that agreement with the branch-and-bound enumerator is meaningful. Box
bounds, where completeness matters, come from a positive-definite auxiliary
form: F(v) = (1/H^2 + 1/H^4)(v.H)^2 - v^2 is positive definite on a
hyperbolic lattice, F is at most 2 + D^2/H^2 + D^2/H^4 on any root of
degree <= D, and a dual-basis Cauchy-Schwarz bound turns that budget into
per-coordinate limits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .lattice import Lattice, Vec, as_vec, fraction_inverse
from .roots import classes_of_degree_and_norm
from .surface import Effectivity, LineBundle, SurfaceContext, SurfaceKind
from .vanishing import (
    H1Case,
    InvariantViolation,
    ReductionChain,
    classify_h1,
    is_quasi_nef,
)


def brute_roots_box(lat: Lattice, bound: int) -> tuple[Vec, ...]:
    """All (-2)-classes with every coordinate in [-bound, bound], by full scan."""
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=lat.rank):
        if lat.norm(v) == -2:
            out.append(v)
    return tuple(sorted(out))


def definite_box_bound(gram, target: int) -> int:
    """Coordinate bound covering every solution of v.v = target, gram definite.

    For negative-definite gram the quadratic form -v.v is positive definite
    and equals -target on solutions, so the dual-basis bound applies with
    budget -target.
    """
    gram = tuple(as_vec(row) for row in gram)
    if target > 0:
        return 0
    fmat = [[Fraction(-x) for x in row] for row in gram]
    return _pd_coordinate_bound(fmat, Fraction(-target))


def _pd_coordinate_bound(fmat, budget: Fraction) -> int:
    """max_i floor(sqrt(budget * (F^-1)_ii)) for positive-definite F.

    If F(v) <= budget then |v_i| <= sqrt(budget * (F^-1)_ii): write v_i as
    the dual pairing of v with the i-th dual vector and apply Cauchy-Schwarz
    for the inner product F.
    """
    if budget < 0:
        return 0
    inv = fraction_inverse(fmat)
    best = 0
    for i in range(len(fmat)):
        val = budget * inv[i][i]
        assert val >= 0
        best = max(best, isqrt(val.numerator // val.denominator))
    return best


def provable_root_box(lat: Lattice, ample, max_degree: int) -> int:
    """A bound b so every root of degree 1..max_degree has all |coords| <= b."""
    h = as_vec(ample)
    h2 = Fraction(lat.norm(h))
    a = lat.gram_column(h)
    scale = 1 / h2 + 1 / h2**2
    n = lat.rank
    fmat = [
        [scale * a[i] * a[j] - lat.gram[i][j] for j in range(n)]
        for i in range(n)
    ]
    budget = 2 + Fraction(max_degree**2) / h2 + Fraction(max_degree**2) / h2**2
    return _pd_coordinate_bound(fmat, budget)


def brute_obstruction_search(
    ctx: SurfaceContext, lb: LineBundle, max_degree: int | None = None
) -> tuple[Vec, int] | None:
    """First effective root pairing <= -2 against lb, by direct scan.

    Independent of the reduction engine: no chain, no witness lifting, just
    the degree-graded root slices checked one class at a time. The default
    bound degree(lb) is exact for effective lb, so None means no such root
    exists at all.
    """
    cap = ctx.degree(lb) if max_degree is None else max_degree
    for d in range(1, cap + 1):
        for delta in ctx.effective_roots_of_degree(d):
            p = ctx.pair(delta, lb.coords)
            if p <= -2:
                return delta, p
    return None


def enumerate_effective_bundles(
    ctx: SurfaceContext, degree_cap: int
) -> list[LineBundle]:
    """Every effective class with norm >= 0 and 1 <= degree <= degree_cap.

    For each degree d the Hodge index theorem bounds the norm by d^2/H^2,
    and each (degree, norm) slice is a coset of the negative-definite
    ample-perp, so the list is provably complete. On an Enriques context
    both torsion classes are included (positive degree and norm >= 0 make
    either one effective).
    """
    h2 = ctx.lattice.norm(ctx.ample)
    bits = (0, 1) if ctx.kind is SurfaceKind.ENRIQUES else (0,)
    out = []
    for d in range(1, degree_cap + 1):
        for m in range(0, d * d // h2 + 1, 2):
            for v in classes_of_degree_and_norm(ctx.lattice, ctx.ample, d, m):
                for bit in bits:
                    out.append(LineBundle(v, bit))
    out.sort(key=lambda lb: (ctx.degree(lb), lb.coords, lb.torsion))
    return out


def verify_chain(ctx: SurfaceContext, chain: ReductionChain) -> None:
    """Re-check every reduction chain invariant; raises on the first failure.

    Steps are contiguous, each gamma is an effective root pairing negatively
    with the class it is subtracted from, norms never decrease, degrees
    strictly decrease, pairing -1 steps preserve the Euler characteristic,
    and an unbounded chain ends at a nef class.
    """
    cur = chain.start
    for s in chain.steps:
        if s.before != cur:
            raise InvariantViolation("chain steps are not contiguous")
        if ctx.norm(s.gamma) != -2:
            raise InvariantViolation("chain gamma is not a (-2)-class")
        if ctx.is_effective(LineBundle(s.gamma)) is not Effectivity.EFFECTIVE:
            raise InvariantViolation("chain gamma is not effective")
        if ctx.pair(s.gamma, s.before.coords) != s.pairing or s.pairing >= 0:
            raise InvariantViolation("recorded pairing is wrong or nonnegative")
        if tuple(b - g for b, g in zip(s.before.coords, s.gamma)) != s.after.coords:
            raise InvariantViolation("after != before - gamma")
        if ctx.norm(s.after.coords) < ctx.norm(s.before.coords):
            raise InvariantViolation("norm decreased along the chain")
        if ctx.degree(s.after) >= ctx.degree(s.before):
            raise InvariantViolation("degree did not strictly decrease")
        if s.pairing == -1 and ctx.euler_char(s.after) != ctx.euler_char(s.before):
            raise InvariantViolation("chi changed across a pairing -1 step")
        cur = s.after
    if cur != chain.final:
        raise InvariantViolation("chain endpoint mismatch")
    if not chain.bounded and ctx.nef_violator(chain.final) is not None:
        raise InvariantViolation("final class is not nef")


@dataclass
class CrossValidationReport:
    degree_cap: int
    bundles_checked: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    mismatches: list[dict] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.mismatches


def cross_validate(ctx: SurfaceContext, degree_cap: int) -> CrossValidationReport:
    """Compare the reduction classifier with direct searches, bundle by bundle.

    For every effective class with norm >= 0 and degree <= degree_cap: the
    obstructed verdict must agree with the direct root scan, the h1 of the
    isotropic cases must match the multiplicity formulas, quasi-nefness must
    match its definition, Riemann-Roch must balance, and the chain must pass
    verify_chain. Disagreements are collected in the report, not raised.
    """
    report = CrossValidationReport(degree_cap)
    for lb in enumerate_effective_bundles(ctx, degree_cap):
        report.bundles_checked += 1
        entry: dict = {"coords": list(lb.coords), "torsion": lb.torsion}
        try:
            cls = classify_h1(ctx, lb)
        except Exception as exc:  # classification must never fail on these
            entry["error"] = repr(exc)
            report.mismatches.append(entry)
            continue
        report.counts[cls.case.value] = report.counts.get(cls.case.value, 0) + 1
        problems = []
        direct = brute_obstruction_search(ctx, lb)
        if (cls.case is H1Case.ROOT_OBSTRUCTED) != (direct is not None):
            problems.append(
                f"obstruction disagreement: classifier {cls.case.value},"
                f" direct scan {direct}"
            )
        if cls.case is H1Case.ROOT_OBSTRUCTED:
            if cls.witness is None or ctx.pair(cls.witness, lb.coords) > -2:
                problems.append("missing or invalid obstruction witness")
            if cls.h1 < 1:
                problems.append("obstructed class with h1 = 0")
        if cls.case is H1Case.ISOTROPIC_MULTIPLE:
            want = cls.n - 1 if ctx.kind is SurfaceKind.K3 else cls.n // 2
            if cls.h1 != want:
                problems.append(f"isotropic multiple h1 {cls.h1}, formula {want}")
        if cls.case is H1Case.ISOTROPIC_MULTIPLE_TWISTED:
            if cls.h1 != (cls.n - 1) // 2:
                problems.append(
                    f"twisted multiple h1 {cls.h1}, formula {(cls.n - 1) // 2}"
                )
        qn = is_quasi_nef(ctx, lb)
        if qn.quasi_nef != (direct is None):
            problems.append("quasi-nef disagreement with the definition search")
        if cls.h0 - cls.h1 + cls.h2 != ctx.euler_char(lb):
            problems.append("Riemann-Roch imbalance")
        try:
            verify_chain(ctx, cls.chain)
        except InvariantViolation as exc:
            problems.append(f"chain invariant: {exc}")
        if problems:
            entry["problems"] = problems
            report.mismatches.append(entry)
    return report
