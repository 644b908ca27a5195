"""Fixed-norm vector enumeration.

Two layers: an exact Fincke-Pohst style branch-and-bound over a
negative-definite Gram matrix (optionally shifted by a rational center,
which is what coset enumeration needs), and on top of it the degree-graded
enumeration of (-2)-classes in a hyperbolic lattice against an ample class.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .lattice import Lattice, Vec, as_vec, inertia, solve_fraction_system, xgcd


def _floor_sqrt(x: Fraction) -> int:
    # floor(sqrt(p/q)) == isqrt(p // q) for nonnegative rationals
    return isqrt(x.numerator // x.denominator)


def _int_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers z with (z + center)^2 <= radius_sq, exactly."""
    if radius_sq < 0:
        return range(0)
    mn, md = center.numerator, center.denominator
    # (z*md + mn)^2 <= radius_sq * md^2
    s = _floor_sqrt(radius_sq * md * md)
    lo = -((s + mn) // md)
    hi = (s - mn) // md
    return range(lo, hi + 1)


def _enumerate_negdef(gram, target, shift=None) -> list[Vec]:
    """All integer y with (y + shift)^T gram (y + shift) == target.

    gram must be negative definite (checked by the public wrappers);
    shift is a rational vector, None meaning zero. Exact throughout.
    """
    n = len(gram)
    t = -Fraction(target)
    if n == 0:
        return [()] if t == 0 else []
    if t < 0:
        return []
    q = [[-Fraction(gram[i][j]) for j in range(n)] for i in range(n)]  # positive definite
    c = [Fraction(0)] * n if shift is None else [Fraction(x) for x in shift]

    # visit coordinates in order of decreasing |diagonal|, ties by index:
    # the level entered first by the recursion is perm[n-1]
    visit = sorted(range(n), key=lambda i: (-abs(gram[i][i]), i))
    perm = list(reversed(visit))
    p = [[q[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    cp = [c[perm[i]] for i in range(n)]

    # LDL^T completion: v^T p v = sum_k d[k] * (v_k + sum_{j>k} u[k][j] v_j)^2
    a = [row[:] for row in p]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for k in range(n):
        d[k] = a[k][k]
        assert d[k] > 0, "form is not positive definite"
        for j in range(k + 1, n):
            u[k][j] = a[k][j] / d[k]
        for r in range(k + 1, n):
            f = a[r][k] / d[k]
            if f:
                for col in range(k + 1, n):
                    a[r][col] -= f * a[k][col]

    out: list[Vec] = []
    xs = [Fraction(0)] * n  # x_j = z_j + shift_j, already fixed for j > level
    zs = [0] * n

    def rec(level: int, budget: Fraction):
        if level < 0:
            if budget == 0:
                orig = [0] * n
                for i in range(n):
                    orig[perm[i]] = zs[i]
                out.append(tuple(orig))
            return
        inner = sum(u[level][j] * xs[j] for j in range(level + 1, n) if u[level][j])
        center = cp[level] + inner
        for z in _int_range(center, budget / d[level]):
            term = z + center
            zs[level] = z
            xs[level] = z + cp[level]  # shifted coordinate, used by lower levels
            rec(level - 1, budget - d[level] * term * term)

    rec(n - 1, t)
    return sorted(out)


def enum_fixed_norm_negdef(gram, target: int) -> tuple[Vec, ...]:
    """All vectors of the given norm in a negative-definite Gram matrix.

    Returns a canonically sorted tuple, closed under negation. target > 0
    yields nothing, target = 0 only the zero vector.
    """
    gram = tuple(as_vec(row) for row in gram)
    n = len(gram)
    if inertia(gram) != (0, n, 0):
        raise ValueError("gram is not negative definite")
    return tuple(_enumerate_negdef(gram, target))


def classes_of_degree_and_norm(
    lat: Lattice, ample, degree: int, norm: int
) -> tuple[Vec, ...]:
    """All classes D with D.D = norm and D.ample = degree, sorted.

    The degree slice is the coset (particular solution) + (ample-perp),
    and ample-perp is negative definite, so the slice is finite and is
    enumerated exactly. Requires a hyperbolic lattice, positive-square
    ample and degree >= 1.
    """
    if isinstance(degree, bool) or not isinstance(degree, int):
        raise ValueError(f"degree must be an integer, got {degree!r}")
    if degree < 1:
        raise ValueError(f"degree must be >= 1, got {degree}")
    if not lat.is_hyperbolic:
        raise ValueError(f"lattice signature {lat.signature} is not hyperbolic")
    h = as_vec(ample)
    if lat.norm(h) <= 0:
        raise ValueError("ample class must have positive square")

    a = lat.gram_column(h)
    n = lat.rank
    # particular solution of a . x = degree via iterated extended gcd
    g = 0
    coeff = [0] * n
    for i in range(n):
        if a[i] == 0:
            continue
        g2, x, y = xgcd(g, a[i])
        coeff = [x * cc for cc in coeff]
        coeff[i] = y
        g = g2
    if degree % g != 0:
        return ()
    x0 = tuple((degree // g) * cc for cc in coeff)

    basis, qgram = lat.orthogonal_complement(h)
    if not basis:
        return (x0,) if lat.norm(x0) == norm else ()
    b = [lat.pair(bv, x0) for bv in basis]
    mu = solve_fraction_system(qgram, b)
    c0 = lat.norm(x0)
    t = Fraction(norm - c0) + sum(Fraction(bj) * mj for bj, mj in zip(b, mu))
    sols = _enumerate_negdef(qgram, t, shift=mu)
    out = []
    for y in sols:
        v = list(x0)
        for yj, bv in zip(y, basis):
            if yj:
                for i in range(n):
                    v[i] += yj * bv[i]
        v = tuple(v)
        assert lat.norm(v) == norm and lat.pair(v, h) == degree
        out.append(v)
    return tuple(sorted(out))


def roots_of_degree(lat: Lattice, ample, degree: int) -> tuple[Vec, ...]:
    """All classes D with D.D = -2 and D.ample = degree, sorted."""
    return classes_of_degree_and_norm(lat, ample, degree, -2)


def negative_roots_against(
    lat: Lattice, ample, cls, max_degree: int
) -> tuple[tuple[Vec, int], ...]:
    """(root, pairing) for every root of degree 1..max_degree with root.cls < 0.

    Exhaustive within the degree bound; ordered by (degree, lex).
    """
    cls = as_vec(cls)
    out = []
    for d in range(1, max_degree + 1):
        for delta in roots_of_degree(lat, ample, d):
            p = lat.pair(delta, cls)
            if p < 0:
                out.append((delta, p))
    return tuple(out)
