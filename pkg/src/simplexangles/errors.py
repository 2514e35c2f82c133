"""Exception hierarchy.

Plain input problems (wrong shapes, out-of-range parameters) raise
``ValueError``; the classes below mark numerical conditions that callers
(and the CLI exit codes) need to tell apart.
"""


class SimplexAnglesError(Exception):
    pass


class NotPositiveDefinite(SimplexAnglesError, ValueError):
    """Cholesky met a pivot below the relative tolerance."""


class Singular(SimplexAnglesError, ValueError):
    pass


class DegenerateCone(SimplexAnglesError, ValueError):
    """Generators are linearly dependent (Gram matrix not positive definite)."""


class DegenerateProjection(SimplexAnglesError):
    """A generator projected to (numerically) zero in a subspace test."""


class NumericalInstability(SimplexAnglesError):
    """Too many probability-zero degenerate trials had to be resampled."""


class GeneralPositionViolation(SimplexAnglesError):
    """More sign regions were observed than hyperplanes in general position allow."""
