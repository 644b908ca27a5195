"""Vanishing of first cohomology for line bundles on K3 and Enriques
surfaces, decided from lattice data in exact integer arithmetic.

The lattice layer does exact linear algebra over the integers and
rationals, the root layer enumerates (-2)-classes graded by ample degree,
the surface layer adds effectivity/nefness semantics, and the vanishing
layer classifies h^1 through nef reduction with certified witnesses.
"""

from .lattice import (
    Lattice,
    Vec,
    as_vec,
    divisibility,
    inertia,
    primitive_part,
    sign_normalized,
    xgcd,
)
from .roots import (
    classes_of_degree_and_norm,
    enum_fixed_norm_negdef,
    negative_roots_against,
    roots_of_degree,
)
from .surface import (
    AmpleRejection,
    ContextError,
    Effectivity,
    LineBundle,
    SurfaceContext,
    SurfaceKind,
    nodal_list_hash,
    validate_ample,
)
from .vanishing import (
    BundleAnalysis,
    H1Case,
    H1Classification,
    InvariantViolation,
    IsotropicAlignment,
    QuasiNefReport,
    ReductionChain,
    ReductionStep,
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

__version__ = "0.1.0"

__all__ = [
    "AmpleRejection",
    "BundleAnalysis",
    "ContextError",
    "Effectivity",
    "H1Case",
    "H1Classification",
    "InvariantViolation",
    "Lattice",
    "IsotropicAlignment",
    "LineBundle",
    "QuasiNefReport",
    "ReductionChain",
    "ReductionStep",
    "SurfaceContext",
    "SurfaceKind",
    "UndecidableEffectivity",
    "Vec",
    "analyze",
    "as_vec",
    "check_isotropic_alignment",
    "classes_of_degree_and_norm",
    "classify_h1",
    "divisibility",
    "enum_fixed_norm_negdef",
    "h0",
    "h1",
    "inertia",
    "is_quasi_nef",
    "isotropic_type",
    "lift_witness",
    "nef_reduce",
    "negative_roots_against",
    "nodal_list_hash",
    "primitive_part",
    "roots_of_degree",
    "sign_normalized",
    "validate_ample",
    "xgcd",
]
