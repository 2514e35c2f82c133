"""Simplicial cones ``pos(v_1, ..., v_d)`` in R^m.

Solid angles are normalised so that the whole space has angle 1, and a
k-dimensional cone is measured inside its own linear hull. The angle of a
simplicial cone depends on its generators only through their Gram matrix,
and only through the correlation matrix of that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numlin
from .errors import DegenerateCone, DegenerateProjection, NotPositiveDefinite

COEFF_TOL = 1e-10
PROJECTION_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SimplicialCone:
    """Cone spanned by linearly independent generators (one per row)."""

    generators: np.ndarray
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gens = np.array(self.generators, dtype=float)
        if gens.ndim == 1:
            gens = gens[:, None]
        if gens.ndim != 2 or gens.shape[0] == 0 or gens.shape[1] == 0:
            raise ValueError(f"generators must be a non-empty 2-d array, got shape {gens.shape}")
        if not np.all(np.isfinite(gens)):
            raise ValueError("generators have non-finite entries")
        if gens.shape[0] > gens.shape[1]:
            raise DegenerateCone(f"{gens.shape[0]} generators cannot be independent in R^{gens.shape[1]}")
        g = numlin.gram(gens)
        try:
            numlin.cholesky(g)
        except NotPositiveDefinite as exc:
            raise DegenerateCone("generators are linearly dependent") from exc
        gens.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_gram(cls, g) -> SimplicialCone:
        """A full-dimensional cone in R^d realising the Gram matrix ``g``."""
        try:
            L = numlin.cholesky(g)
        except NotPositiveDefinite as exc:
            raise DegenerateCone("Gram matrix is not positive definite") from exc
        return cls(L)

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.generators.shape[1]

    def intrinsic(self) -> SimplicialCone:
        """Isometric copy of the cone in R^dim (same Gram matrix)."""
        return SimplicialCone.from_gram(self.gram)

    def coefficient_map(self) -> np.ndarray:
        """Matrix whose rows are the dual normals; maps ``x`` to its
        coefficients in the generator basis."""
        return dual_normals(self).normals


def as_cone(c) -> SimplicialCone:
    return c if isinstance(c, SimplicialCone) else SimplicialCone(c)


def cone_new(generators) -> SimplicialCone:
    return SimplicialCone(generators)


@dataclass(frozen=True, eq=False)
class DualFrame:
    normals: np.ndarray
    normal_gram: np.ndarray


def dual_normals(c: SimplicialCone) -> DualFrame:
    """Biorthogonal normals ``n_k`` with ``<n_k, v_i> = delta_ki``.

    For a full-dimensional cone they are the rows of the inverse of the
    generator matrix, and the cone is ``{x : <n_k, x> >= 0 for all k}``. For
    ``d < m`` the normals are taken inside the linear hull of the cone. Their
    Gram matrix is the inverse of the generator Gram matrix either way.
    """
    c = as_cone(c)
    v = c.generators
    if c.dim == c.ambient_dim:
        normals = np.linalg.inv(v.T)
    else:
        normals = numlin.inverse(c.gram) @ v
    return DualFrame(normals, numlin.gram(normals))


def coefficients(c: SimplicialCone, x) -> np.ndarray:
    """Coefficients ``lam`` with ``x = sum lam_i v_i``; x must lie in the span."""
    c = as_cone(c)
    x = np.asarray(x, dtype=float)
    if x.shape != (c.ambient_dim,):
        raise ValueError(f"point has shape {x.shape}, expected ({c.ambient_dim},)")
    if c.dim == c.ambient_dim:
        return numlin.solve(c.generators.T, x)
    lam, *_ = np.linalg.lstsq(c.generators.T, x, rcond=None)
    if np.linalg.norm(c.generators.T @ lam - x) > 1e-10 * max(np.linalg.norm(x), 1.0):
        return np.full(c.dim, -np.inf)
    return lam


def contains(c: SimplicialCone, x, method: str = "solve") -> bool:
    """Membership with the permissive band ``lam_i >= -1e-10``.

    ``method="solve"`` solves for the generator coefficients directly;
    ``method="dual"`` checks the signs of ``<n_k, x>``.
    """
    c = as_cone(c)
    x = np.asarray(x, dtype=float)
    if x.shape != (c.ambient_dim,):
        raise ValueError(f"point has shape {x.shape}, expected ({c.ambient_dim},)")
    if method == "solve":
        lam = coefficients(c, x)
    elif method == "dual":
        if c.dim != c.ambient_dim:
            raise ValueError("dual-sign membership needs a full-dimensional cone")
        lam = dual_normals(c).normals @ x
    else:
        raise ValueError(f"unknown membership method {method!r}")
    return bool(np.all(lam >= -COEFF_TOL))


def _checked_correlation(g) -> np.ndarray:
    g = numlin.as_square(g, "Gram matrix")
    numlin.cholesky(g)
    return numlin.correlation(g)


def angle_exact_2d(g) -> float:
    """Planar angle ``arccos(rho) / (2 pi)`` between two generators."""
    r = _checked_correlation(g)
    if r.shape != (2, 2):
        raise ValueError("angle_exact_2d needs a 2x2 Gram matrix")
    return math.acos(min(1.0, max(-1.0, r[0, 1]))) / (2 * math.pi)


def angle_exact_3d(g) -> float:
    """Solid angle of a trihedral cone as a fraction of the full sphere.

    Van Oosterom-Strakee on unit generators:
    ``tan(omega / 2) = sqrt(det R) / (1 + r12 + r13 + r23)``. ``atan2`` puts
    ``omega / 2`` in ``(0, pi)``, which is the "add pi when negative" branch.
    """
    r = _checked_correlation(g)
    if r.shape != (3, 3):
        raise ValueError("angle_exact_3d needs a 3x3 Gram matrix")
    det = max(numlin.determinant(r), 0.0)
    denom = 1.0 + r[0, 1] + r[0, 2] + r[1, 2]
    half = math.atan2(math.sqrt(det), denom)
    return 2.0 * half / (4.0 * math.pi)


def angle_exact(g) -> float:
    g = numlin.as_square(g, "Gram matrix")
    d = len(g)
    if d == 1:
        numlin.cholesky(g)
        return 0.5
    if d == 2:
        return angle_exact_2d(g)
    if d == 3:
        return angle_exact_3d(g)
    raise ValueError(f"no exact angle formula for d = {d}; use a Monte Carlo estimator")


def _origin_in_hull(points: np.ndarray) -> bool:
    """Whether 0 lies in the convex hull of the columns of ``points``
    (r x k, with r >= k - 1 and the columns affinely independent)."""
    r, k = points.shape
    a = np.vstack([points, np.ones((1, k))])
    rhs = np.zeros(r + 1)
    rhs[-1] = 1.0
    lam, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    if np.linalg.norm(a @ lam - rhs) > 1e-9:
        return False
    return bool(np.all(lam >= -COEFF_TOL))


def subspace_intersects(c: SimplicialCone, w_basis, strict: bool = False) -> bool:
    """Whether the linear subspace W meets the cone outside the origin.

    Projects the generators onto the orthogonal complement of W and tests
    whether the origin lies in the convex hull of the projections. W may have
    dimension at most ``m - k + 1``; larger subspaces would need a linear
    program.

    A generator whose projection is below ``1e-12`` of its length lies in W
    up to rounding; that counts as a hit, or raises DegenerateProjection
    when ``strict``.
    """
    c = as_cone(c)
    m, k = c.ambient_dim, c.dim
    w = np.asarray(w_basis, dtype=float).reshape(-1, m)
    q = w.shape[0]
    if q > m - k + 1:
        raise ValueError(f"subspace of dimension {q} exceeds m - k + 1 = {m - k + 1}")
    if q and not numlin.is_positive_definite(numlin.gram(w)):
        raise ValueError("subspace basis is linearly dependent")
    full, _ = np.linalg.qr(w.T, mode="complete") if q else (np.eye(m), None)
    complement = full[:, q:]
    proj = c.generators @ complement
    lengths = np.linalg.norm(proj, axis=1)
    if np.any(lengths <= PROJECTION_RTOL * np.linalg.norm(c.generators, axis=1)):
        if strict:
            raise DegenerateProjection("a generator projects to zero modulo the subspace")
        return True
    return _origin_in_hull(proj.T)
