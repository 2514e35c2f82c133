"""Solid angles of simplicial cones and angle sums of simplices.

Gram-matrix numerics plus four seeded Monte Carlo estimators, used to check
that the expected angle sum of the Gaussian simplex equals the angle sum of
the regular simplex.
"""
from ._backend import BACKEND
from .cones import (
    DualFrame, SimplicialCone, angle_exact, angle_exact_2d, angle_exact_3d, cone_new, contains,
    dual_normals, subspace_intersects,
)
from .errors import (
    DegenerateCone, DegenerateProjection, GeneralPositionViolation, NotPositiveDefinite,
    NumericalInstability, SimplexAnglesError, Singular,
)
from .mc import (
    AngleEstimate, ComparisonVerdict, RandomStream, compare, estimate_crofton, estimate_hull,
    estimate_membership, estimate_orthant, gaussian_vector,
)
from .report import ExperimentReport
from .simplex import (
    RegionCensus, Simplex, angle_sum, facet_normals, family_s1, family_s2, gaussian_simplex,
    lifted_difference_gram, region_census, regular_gram, regular_simplex, vertex_cone,
)

__version__ = "0.1.0"
