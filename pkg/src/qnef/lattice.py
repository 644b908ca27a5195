"""Exact linear algebra over even integral lattices.

Divisor classes are plain integer tuples. Everything is computed with
arbitrary-precision integers, falling back to fractions.Fraction for
eliminations; no floats are used anywhere in this package.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import gcd

Vec = tuple[int, ...]
Gram = tuple[tuple[int, ...], ...]


def as_vec(v) -> Vec:
    """Coerce a sequence of exact integers to a coordinate tuple."""
    out = []
    for x in v:
        # bool is an int subclass; reject it along with floats etc.
        if isinstance(x, bool) or not isinstance(x, int):
            raise ValueError(f"coordinates must be exact integers, got {x!r}")
        out.append(x)
    return tuple(out)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = x*a + y*b and g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def divisibility(v) -> int:
    """gcd of the coordinates of v; 0 for the zero vector."""
    g = 0
    for x in as_vec(v):
        g = gcd(g, abs(x))
    return g


def primitive_part(v) -> Vec:
    """v divided by its divisibility. Errors on the zero vector."""
    v = as_vec(v)
    d = divisibility(v)
    if d == 0:
        raise ValueError("the zero class has no primitive part")
    return tuple(x // d for x in v)


def sign_normalized(v) -> Vec:
    """v or -v, whichever has a positive first nonzero coordinate."""
    v = as_vec(v)
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def inertia(gram) -> tuple[int, int, int]:
    """Signature (n_plus, n_minus, n_zero) of a symmetric integer matrix.

    Symmetric Gaussian elimination over exact fractions with pivot swaps;
    when every remaining diagonal entry vanishes but the block is nonzero,
    the congruence v_i -> v_i + v_j manufactures a nonzero pivot. Ties go
    to the first usable pivot in row order.
    """
    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    pos = neg = zero = 0
    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            off = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if off is None:
                zero += n - k
                break
            i, j = off
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            piv = i  # a[i][i] is now 2*a_old[i][j] != 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            for t in range(n):
                a[t][k], a[t][piv] = a[t][piv], a[t][k]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        col = [a[r][k] for r in range(n)]
        for r in range(k + 1, n):
            f = col[r] / p
            if f:
                for c in range(k + 1, n):
                    a[r][c] -= f * a[k][c]
        k += 1
    return pos, neg, zero


def fraction_det(gram) -> Fraction:
    """Determinant over exact fractions (row elimination with swaps)."""
    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                for c in range(k, n):
                    a[r][c] -= f * a[k][c]
    return det


def solve_fraction_system(mat, rhs) -> list[Fraction]:
    """Solve mat * x = rhs exactly. mat must be square and invertible."""
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for r in range(n):
            if r != k and a[r][k]:
                f = a[r][k]
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return [a[i][n] for i in range(n)]


def fraction_inverse(mat) -> list[list[Fraction]]:
    """Inverse of a square invertible matrix over exact fractions."""
    n = len(mat)
    a = [
        [Fraction(mat[i][j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for r in range(n):
            if r != k and a[r][k]:
                f = a[r][k]
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    return [row[n:] for row in a]


class Lattice:
    """An even lattice presented by its symmetric integer Gram matrix."""

    def __init__(self, gram):
        rows = []
        for row in gram:
            rows.append(as_vec(row))
        self.gram: Gram = tuple(rows)
        self.rank = len(self.gram)
        if self.rank == 0:
            raise ValueError("gram: rank must be positive")
        for i, row in enumerate(self.gram):
            if len(row) != self.rank:
                raise ValueError(f"gram: row {i} has length {len(row)}, expected {self.rank}")
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError(f"gram: not symmetric at ({i},{j})")
        for i in range(self.rank):
            if self.gram[i][i] % 2 != 0:
                raise ValueError(f"gram: diagonal entry at ({i},{i}) is odd; the lattice must be even")

    def _check(self, v) -> Vec:
        v = as_vec(v)
        if len(v) != self.rank:
            raise ValueError(f"vector length {len(v)} does not match rank {self.rank}")
        return v

    def gram_column(self, v) -> Vec:
        """The integer vector G*v, i.e. the linear form pair(., v)."""
        v = self._check(v)
        return tuple(sum(row[j] * v[j] for j in range(self.rank)) for row in self.gram)

    def pair(self, v, w) -> int:
        """Bilinear pairing v.w."""
        v = self._check(v)
        gw = self.gram_column(w)
        return sum(x * y for x, y in zip(v, gw))

    def norm(self, v) -> int:
        """Self-intersection v.v (always even)."""
        return self.pair(v, v)

    @cached_property
    def signature(self) -> tuple[int, int, int]:
        return inertia(self.gram)

    @cached_property
    def determinant(self) -> int:
        d = fraction_det(self.gram)
        assert d.denominator == 1
        return d.numerator

    @property
    def is_hyperbolic(self) -> bool:
        """Signature (1, rank-1, 0)."""
        return self.signature == (1, self.rank - 1, 0)

    @property
    def is_negative_definite(self) -> bool:
        return self.signature == (0, self.rank, 0)

    def orthogonal_complement(self, h) -> tuple[tuple[Vec, ...], Gram]:
        """Integral basis of {w : w.h = 0} and its induced Gram matrix.

        The kernel of the linear form G*h is extracted by unimodular column
        operations, so the basis is saturated. Basis vectors are normalized
        to a positive leading coordinate and sorted; the basis has rank-1
        elements whenever norm(h) != 0 (it is the whole lattice when G*h = 0).
        """
        h = self._check(h)
        if all(x == 0 for x in h):
            raise ValueError("cannot take the complement of the zero class")
        a = list(self.gram_column(h))
        n = self.rank
        cols = [[1 if t == i else 0 for t in range(n)] for i in range(n)]
        for i in range(1, n):
            if a[i] == 0:
                continue
            g, x, y = xgcd(a[0], a[i])
            c0, ci = cols[0], cols[i]
            new0 = [x * c0[t] + y * ci[t] for t in range(n)]
            newi = [-(a[i] // g) * c0[t] + (a[0] // g) * ci[t] for t in range(n)]
            cols[0], cols[i] = new0, newi
            a[0], a[i] = g, 0
        if a[0] == 0:
            kernel = cols  # the form vanishes identically (h in the radical)
        else:
            kernel = cols[1:]
        basis = sorted(sign_normalized(tuple(c)) for c in kernel)
        induced = tuple(tuple(self.pair(b, c) for c in basis) for b in basis)
        return tuple(basis), induced

    def __repr__(self):
        return f"Lattice({[list(r) for r in self.gram]})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)
