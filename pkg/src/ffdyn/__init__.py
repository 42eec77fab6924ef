"""Heights, orbits and degree growth of rational self-maps of P^n over Q(t)."""

from .dsl import format_map, format_point, parse_map, parse_point
from .dynamics import (
    DEFAULT_BUDGET, Budget, DegreeEstimate, DegreeSequence, IterateCache, compose,
    degree_sequence, delta_estimate, monomial_degree_sequence,
)
from .errors import (
    AllZero, DimensionMismatch, DSLError, DSLSyntaxError, FFDynError, IndeterminacyHit,
    MixedDegrees, NotHomogeneous, NotSplit, ResourceLimit, SamplingExhausted, TooFewPoints,
    TooShort, UnsupportedExtension, ZeroInput,
)
from .exact import INFINITY, BinaryForm, Place, RationalFunction, gcd_unipoly, valuation
from .heights import height_degree, height_plus, height_valuation, local_heights
from .orbits import (
    AlphaEstimate, OrbitRecord, alpha_estimate, check_fundamental_inequality,
    check_growth_premises, check_sufficient_condition, orbit, orbit_density_heuristic,
)
from .projective import (
    MonomialMap, PointFF, SelfMapFF, constant_point, evaluate, meets_indeterminacy,
    normalize_point, point_from_polys, point_from_rational_functions, to_rational_functions,
)

__version__ = "0.1.0"
