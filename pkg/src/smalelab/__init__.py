"""Numerical laboratory for Smale mean value quotients of finite Blaschke products."""

__version__ = "0.1.0"

from .blaschke import (
    BlaschkeProduct,
    CriticalPoint,
    CriticalSet,
    MobiusAutomorphism,
    boundary_modulus_deviation,
    compose_post,
    compose_pre,
    derivative_constant,
    hyperbolic_derivative,
    normalize,
    pseudo_hyperbolic,
)
from .polycore import (
    Polynomial,
    PolyQuotients,
    Root,
    RootSet,
    conjugate_reciprocal,
    find_roots,
    poly_smale_quotients,
)
from .quotients import (
    BoundFlag,
    LargeCriticalValueReport,
    QuotientEntry,
    QuotientReport,
    RescalePair,
    annulus_covering_bound,
    general_quotients,
    large_critical_value_check,
    max_quotient_floor,
    min_quotient_bound,
    monocritical_family,
    monocritical_family_max_quotient,
    rescale_family,
    smale_quotients,
    symmetric_family,
    symmetric_family_min_quotient,
)
from .search import (
    SearchResult,
    maximize_min_quotient,
    minimize_max_quotient,
    sample_blaschke,
)

__all__ = [
    "__version__",
    "BlaschkeProduct",
    "BoundFlag",
    "CriticalPoint",
    "CriticalSet",
    "LargeCriticalValueReport",
    "MobiusAutomorphism",
    "PolyQuotients",
    "Polynomial",
    "QuotientEntry",
    "QuotientReport",
    "RescalePair",
    "Root",
    "RootSet",
    "SearchResult",
    "annulus_covering_bound",
    "boundary_modulus_deviation",
    "compose_post",
    "compose_pre",
    "conjugate_reciprocal",
    "derivative_constant",
    "find_roots",
    "general_quotients",
    "hyperbolic_derivative",
    "large_critical_value_check",
    "max_quotient_floor",
    "maximize_min_quotient",
    "min_quotient_bound",
    "minimize_max_quotient",
    "monocritical_family",
    "monocritical_family_max_quotient",
    "normalize",
    "poly_smale_quotients",
    "pseudo_hyperbolic",
    "rescale_family",
    "sample_blaschke",
    "smale_quotients",
    "symmetric_family",
    "symmetric_family_min_quotient",
]
