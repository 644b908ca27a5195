"""Surface-level semantics on top of the lattice: K3 and Enriques contexts.

A SurfaceContext fixes the numerical lattice, a validated ample class and,
for Enriques surfaces, how rational curve classes are handled (unnodal, or
a declared list of nodal classes) together with the torsion bookkeeping for
half-fibers. Line bundles are numerical classes plus a torsion bit; on a K3
the bit must be 0, on an Enriques surface bit 1 means "tensored by the
canonical 2-torsion class".
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum

from .lattice import Lattice, Vec, as_vec, primitive_part, sign_normalized
from .roots import enum_fixed_norm_negdef, roots_of_degree


class SurfaceKind(str, Enum):
    K3 = "K3"
    ENRIQUES = "Enriques"


class Effectivity(str, Enum):
    EFFECTIVE = "effective"
    NOT_EFFECTIVE = "not_effective"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class LineBundle:
    """Numerical class plus torsion bit (0 everywhere on a K3)."""

    coords: Vec
    torsion: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coords", as_vec(self.coords))
        if self.torsion not in (0, 1) or isinstance(self.torsion, bool):
            raise ValueError(f"torsion bit must be 0 or 1, got {self.torsion!r}")

    @property
    def is_zero_class(self) -> bool:
        return all(x == 0 for x in self.coords)


@dataclass(frozen=True)
class AmpleRejection:
    reason: str  # "not_positive_square" | "root_on_wall" | "negative_on_nodal"
    cls: Vec | None = None

    def message(self) -> str:
        if self.reason == "not_positive_square":
            return "ample: class does not have positive square"
        if self.reason == "root_on_wall":
            return f"ample: orthogonal to the (-2)-class {list(self.cls)}"
        return f"ample: nonpositive degree on declared nodal class {list(self.cls)}"


class ContextError(ValueError):
    """Raised when lattice/ample/nodal data fails validation."""

    def __init__(self, message: str, rejection: AmpleRejection | None = None):
        super().__init__(message)
        self.rejection = rejection


def chi_of_kind(kind: SurfaceKind) -> int:
    """Euler characteristic of the structure sheaf: 2 for K3, 1 for Enriques."""
    return 2 if kind is SurfaceKind.K3 else 1


def validate_ample(lattice: Lattice, ample, nodal=()) -> AmpleRejection | None:
    """Check positivity of the candidate polarization.

    Accepts iff norm > 0, no (-2)-class is orthogonal to it, and it has
    positive degree on every supplied nodal class. Returns None on success,
    a structured rejection otherwise.
    """
    h = as_vec(ample)
    if lattice.norm(h) <= 0:
        return AmpleRejection("not_positive_square")
    basis, qgram = lattice.orthogonal_complement(h)
    walls = []
    for y in enum_fixed_norm_negdef(qgram, -2):
        v = [0] * lattice.rank
        for yj, bv in zip(y, basis):
            for i in range(lattice.rank):
                v[i] += yj * bv[i]
        walls.append(sign_normalized(tuple(v)))
    if walls:
        return AmpleRejection("root_on_wall", min(walls))
    for c in nodal:
        c = as_vec(c)
        if lattice.pair(c, h) <= 0:
            return AmpleRejection("negative_on_nodal", c)
    return None


def nodal_list_hash(nodal) -> str:
    """sha256 of the canonicalized (sorted) nodal class list."""
    canon = sorted(list(as_vec(c)) for c in nodal)
    return hashlib.sha256(json.dumps(canon, separators=(",", ":")).encode()).hexdigest()


class SurfaceContext:
    """Validated (kind, lattice, ample) triple with root bookkeeping.

    Immutable after construction; the per-degree root cache only memoizes
    pure functions of the construction data, so concurrent readers are safe.
    """

    def __init__(self, kind, lattice: Lattice, ample, *, nodal=None, half_fibers=None):
        self.kind = SurfaceKind(kind)
        self.lattice = lattice
        if not lattice.is_hyperbolic:
            raise ContextError(
                f"gram: signature {lattice.signature} is not hyperbolic (1, rank-1, 0)"
            )
        self.ample = as_vec(ample)
        if len(self.ample) != lattice.rank:
            raise ContextError("ample: length does not match the lattice rank")
        if self.kind is SurfaceKind.K3:
            if nodal is not None:
                raise ContextError("nodal: nodal declarations apply to Enriques surfaces only")
            if half_fibers:
                raise ContextError("half_fibers: torsion declarations apply to Enriques surfaces only")
        self.nodal: tuple[Vec, ...] | None = None
        if nodal is not None:
            self.nodal = tuple(as_vec(c) for c in nodal)
            for c in self.nodal:
                if lattice.norm(c) != -2:
                    raise ContextError(f"nodal: class {list(c)} does not have square -2")
        rej = validate_ample(lattice, self.ample, self.nodal or ())
        if rej is not None:
            raise ContextError(rej.message(), rej)
        # allowed torsion bits per primitive isotropic ray; default both
        self.half_fibers: dict[Vec, frozenset[int]] = {}
        for cls, bits in (half_fibers or {}).items():
            cls = as_vec(cls)
            bits = frozenset(bits)
            if not bits or not bits <= {0, 1}:
                raise ContextError(f"half_fibers: bits for {list(cls)} must be a nonempty subset of {{0,1}}")
            if lattice.norm(cls) != 0 or cls != primitive_part(cls):
                raise ContextError(f"half_fibers: {list(cls)} is not a primitive isotropic class")
            if lattice.pair(cls, self.ample) <= 0:
                raise ContextError(f"half_fibers: {list(cls)} has nonpositive degree")
            self.half_fibers[cls] = bits
        self._roots: dict[int, tuple[Vec, ...]] = {}
        self._nodal_combo: dict[Vec, bool] = {}

    # -- basic numerics ----------------------------------------------------

    @property
    def chi(self) -> int:
        return chi_of_kind(self.kind)

    @property
    def conditional(self) -> bool:
        """True when answers depend on a declared nodal list being complete."""
        return self.kind is SurfaceKind.ENRIQUES and self.nodal is not None

    @property
    def nonstandard_lattice(self) -> bool:
        """Enriques semantics on a lattice that is not rank-10 unimodular."""
        if self.kind is not SurfaceKind.ENRIQUES:
            return False
        return not (self.lattice.rank == 10 and abs(self.lattice.determinant) == 1)

    def pair(self, v, w) -> int:
        v = v.coords if isinstance(v, LineBundle) else v
        w = w.coords if isinstance(w, LineBundle) else w
        return self.lattice.pair(v, w)

    def norm(self, v) -> int:
        return self.pair(v, v)

    def degree(self, v) -> int:
        """Degree against the ample class."""
        return self.pair(v, self.ample)

    def euler_char(self, lb: LineBundle) -> int:
        """chi(L) = L^2/2 + chi(O); the torsion bit does not enter."""
        return self.norm(lb.coords) // 2 + self.chi

    def serre_dual(self, lb: LineBundle) -> LineBundle:
        """K_X - L; on an Enriques surface the torsion bit flips."""
        coords = tuple(-x for x in lb.coords)
        if self.kind is SurfaceKind.K3:
            return LineBundle(coords, 0)
        return LineBundle(coords, 1 - lb.torsion)

    # -- roots -------------------------------------------------------------

    def roots_of_degree(self, d: int) -> tuple[Vec, ...]:
        if d not in self._roots:
            self._roots[d] = roots_of_degree(self.lattice, self.ample, d)
        return self._roots[d]

    def is_nodal_combination(self, cls) -> bool:
        """Is cls a nonnegative integer combination of the declared nodal classes?

        Bounded search: every declared class has positive degree, so any
        combination summing to cls uses total degree exactly degree(cls).
        """
        cls = as_vec(cls)
        if cls in self._nodal_combo:
            return self._nodal_combo[cls]
        nodal = self.nodal or ()
        degs = [self.degree(c) for c in nodal]
        target_deg = self.degree(cls)

        def search(i: int, rest: Vec, rest_deg: int) -> bool:
            if all(x == 0 for x in rest):
                return True  # remaining classes get count 0; rest_deg is 0 too
            if i == len(nodal) or rest_deg <= 0:
                return False
            c, dc = nodal[i], degs[i]
            top = rest_deg // dc
            for k in range(top + 1):
                nxt = tuple(r - k * c[t] for t, r in enumerate(rest))
                if search(i + 1, nxt, rest_deg - k * dc):
                    return True
            return False

        ok = target_deg >= 0 and search(0, cls, target_deg)
        self._nodal_combo[cls] = ok
        return ok

    def effective_roots_of_degree(self, d: int) -> tuple[Vec, ...]:
        """Roots of the given degree that count as classes of effective divisors."""
        if self.kind is SurfaceKind.K3:
            return self.roots_of_degree(d)
        if self.nodal is None:
            return ()
        return tuple(c for c in self.roots_of_degree(d) if self.is_nodal_combination(c))

    # -- effectivity and nefness --------------------------------------------

    def is_effective(self, lb: LineBundle) -> Effectivity:
        """Decide effectivity from numerical data.

        Zero class: effective iff the bit is 0 (the canonical bundle is not
        effective). Nonzero with norm >= 0: effective iff the ample degree is
        positive. Norm -2: on a K3 iff the degree is positive; on an Enriques
        surface only certified nodal combinations count, everything else with
        positive degree is undecidable from lattice data alone. Any nonzero
        class with nonpositive degree is not effective.
        """
        self._check_bundle(lb)
        if lb.is_zero_class:
            return Effectivity.EFFECTIVE if lb.torsion == 0 else Effectivity.NOT_EFFECTIVE
        d = self.degree(lb)
        nrm = self.norm(lb.coords)
        if nrm >= 0:
            if d == 0:
                raise AssertionError(
                    "nonzero class with norm >= 0 and degree 0 cannot exist in a hyperbolic lattice"
                )
            return Effectivity.EFFECTIVE if d > 0 else Effectivity.NOT_EFFECTIVE
        if d <= 0:
            return Effectivity.NOT_EFFECTIVE
        if nrm == -2:
            if self.kind is SurfaceKind.K3:
                return Effectivity.EFFECTIVE
            if self.nodal is None:
                return Effectivity.NOT_EFFECTIVE
            if self.is_nodal_combination(lb.coords):
                return Effectivity.EFFECTIVE
            return Effectivity.UNDECIDABLE
        return Effectivity.UNDECIDABLE

    def nef_violator(self, lb: LineBundle, max_degree: int | None = None) -> tuple[Vec, int] | None:
        """Minimal (degree, lex) effective root pairing negatively with lb.

        The exact search bound is degree(lb): a violating curve is a fixed
        component, so its degree is at most the degree of lb. A smaller
        max_degree makes the search bounded (possibly inconclusive).
        """
        cap = self.degree(lb)
        if max_degree is not None:
            cap = min(cap, max_degree)
        for d in range(1, cap + 1):
            for delta in self.effective_roots_of_degree(d):
                p = self.pair(delta, lb.coords)
                if p < 0:
                    return delta, p
        return None

    def is_nef(self, lb: LineBundle, max_degree: int | None = None) -> tuple[bool, Vec | None]:
        """Nefness of an effective class with norm >= 0, with violator if any."""
        if self.norm(lb.coords) < 0 or self.is_effective(lb) is not Effectivity.EFFECTIVE:
            raise ValueError("nef test requires an effective class with norm >= 0")
        hit = self.nef_violator(lb, max_degree)
        return (True, None) if hit is None else (False, hit[0])

    def h2(self, lb: LineBundle) -> int:
        """h^2(L) = h^0(K_X - L) for L effective or numerically zero."""
        dual = self.serre_dual(lb)
        if dual.is_zero_class:
            return 1 if dual.torsion == 0 else 0
        if self.degree(dual) < 0:
            return 0
        raise ValueError("h2 is only defined here for effective or zero classes")

    def half_fiber_bits(self, e: Vec) -> frozenset[int]:
        """Torsion bits in which the primitive isotropic class e is effective."""
        return self.half_fibers.get(as_vec(e), frozenset({0, 1}))

    def _check_bundle(self, lb: LineBundle):
        if not isinstance(lb, LineBundle):
            raise ValueError("expected a LineBundle")
        if len(lb.coords) != self.lattice.rank:
            raise ValueError("bundle length does not match the lattice rank")
        if self.kind is SurfaceKind.K3 and lb.torsion != 0:
            raise ContextError("torsion: K3 line bundles carry no torsion bit")

    def __repr__(self):
        return f"SurfaceContext({self.kind.value}, rank {self.lattice.rank}, ample {list(self.ample)})"
