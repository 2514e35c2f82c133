"""Small dense linear algebra: Gram matrices, Cholesky, solves, inverses.

Matrices are plain ``numpy`` float64 arrays. Sizes here are tiny (d <= 50),
so clarity wins over blocking; thresholds are relative to the natural
scale of the input so that rescaled generators behave identically.
"""
from __future__ import annotations

import numpy as np

from .errors import NotPositiveDefinite, Singular

PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-12


def as_matrix(a, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_square(a, name="matrix") -> np.ndarray:
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def is_symmetric(g, rtol=SYMMETRY_RTOL) -> bool:
    g = np.asarray(g, dtype=float)
    scale = max(np.max(np.abs(g), initial=0.0), np.finfo(float).tiny)
    return bool(np.all(np.abs(g - g.T) <= rtol * scale))


def gram(vectors) -> np.ndarray:
    """Gram matrix of a list of vectors (one vector per row).

    Entries are filled from one triangle and mirrored, so the result is
    bitwise symmetric.
    """
    try:
        v = np.array([np.asarray(x, dtype=float) for x in vectors])
    except ValueError as exc:
        raise ValueError("vectors must share one dimension") from exc
    if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
        raise ValueError(f"expected a non-empty list of equal-length vectors, got shape {v.shape}")
    g = v @ v.T
    upper = np.triu_indices(len(v), 1)
    g.T[upper] = g[upper]
    return g


def cholesky(g) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == g``.

    Raises NotPositiveDefinite when a pivot drops below
    ``1e-12 * max(diag(g))``.
    """
    g = as_square(g, "Gram matrix")
    if not is_symmetric(g):
        raise ValueError("Gram matrix is not symmetric")
    d = len(g)
    scale = np.max(np.diag(g), initial=0.0)
    if scale <= 0:
        raise NotPositiveDefinite("non-positive diagonal")
    tol = PIVOT_RTOL * scale
    L = np.zeros_like(g)
    for j in range(d):
        pivot = g[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at index {j} is below {tol:.3e}")
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (g[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def is_positive_definite(g) -> bool:
    try:
        cholesky(g)
    except (NotPositiveDefinite, ValueError):
        return False
    return True


def determinant(a) -> float:
    a = as_square(a)
    if a.size == 0:
        return 1.0
    return float(np.linalg.det(a))


def _hadamard_scale(a: np.ndarray) -> float:
    # |det a| <= product of row norms
    return float(np.prod(np.linalg.norm(a, axis=1)))


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b``; raises Singular when ``|det a|`` is below
    ``1e-12`` times the Hadamard bound of ``a``."""
    a = as_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape != (a.shape[0],):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({a.shape[0]},)")
    scale = _hadamard_scale(a)
    if scale == 0 or abs(determinant(a)) <= PIVOT_RTOL * scale:
        raise Singular("matrix is numerically singular")
    x = np.linalg.solve(a, b)
    if np.linalg.norm(a @ x - b) > 1e-9 * max(np.linalg.norm(b), np.finfo(float).tiny):
        raise Singular("residual check failed; matrix too ill-conditioned")
    return x


def inverse(g) -> np.ndarray:
    """Inverse of a positive-definite matrix via its Cholesky factor."""
    L = cholesky(g)
    L_inv = np.linalg.solve(L, np.eye(len(L)))
    inv = L_inv.T @ L_inv
    return 0.5 * (inv + inv.T)


def correlation(g) -> np.ndarray:
    """Rescale ``g`` to unit diagonal: ``g[i, j] / sqrt(g[i, i] * g[j, j])``."""
    g = as_square(g, "Gram matrix")
    diag = np.diag(g)
    if not np.all(diag > 0):
        raise ValueError("correlation needs a strictly positive diagonal")
    s = 1.0 / np.sqrt(diag)
    r = g * s[:, None] * s[None, :]
    np.fill_diagonal(r, 1.0)
    upper = np.triu_indices(len(r), 1)
    r.T[upper] = r[upper]
    return r


def condition_number(g) -> float:
    return float(np.linalg.cond(as_square(g)))
