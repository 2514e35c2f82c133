"""Simplices, their vertex angles, and the facet-hyperplane arrangement."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, numlin
from .cones import SimplicialCone, angle_exact
from .errors import DegenerateCone, GeneralPositionViolation, NotPositiveDefinite
from .mc import CHUNK, AngleEstimate, RandomStream, combine_sum, estimate_orthant

SIGN_RTOL = 1e-12
LIFT_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class Simplex:
    """``conv(x_0, ..., x_d)`` with vertices as rows of a ``(d+1, m)`` array."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError(f"need at least two vertices as rows, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices have non-finite entries")
        if v.shape[0] - 1 > v.shape[1]:
            raise DegenerateCone(f"{v.shape[0]} points cannot be affinely independent in R^{v.shape[1]}")
        try:
            numlin.cholesky(numlin.gram(v[1:] - v[0]))
        except NotPositiveDefinite as exc:
            raise DegenerateCone("vertices are affinely dependent") from exc
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def vertex_gram(self, i: int) -> np.ndarray:
        return vertex_cone(self, i).gram


def vertex_cone(s: Simplex, i: int) -> SimplicialCone:
    """Tangent cone ``pos(x_j - x_i : j != i)`` at vertex ``i``."""
    if not 0 <= i <= s.dim:
        raise IndexError(f"vertex index {i} out of range 0..{s.dim}")
    others = np.delete(s.vertices, i, axis=0)
    return SimplicialCone(others - s.vertices[i])


def vertex_angles(s: Simplex, n: int, stream: RandomStream, shards: int = 1) -> list[AngleEstimate]:
    # vertex i always uses stream.child(i), so results do not depend on call order
    return [estimate_orthant(s.vertex_gram(i), n, stream.child(i), shards) for i in range(s.dim + 1)]


def angle_sum(s: Simplex, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Sum of the ``d + 1`` vertex angles, each an orthant estimate from the
    vertex-cone Gram matrix. Works in any ambient dimension."""
    return combine_sum(vertex_angles(s, n, stream, shards), method="orthant")


def angle_sum_exact(s: Simplex) -> float:
    if s.dim > 3:
        raise ValueError("exact angle sums are only available for d <= 3")
    return math.fsum(angle_exact(s.vertex_gram(i)) for i in range(s.dim + 1))


def regular_gram(d: int) -> np.ndarray:
    """Gram matrix of ``e_i - e_0`` (i = 1..d): 2 on the diagonal, 1 elsewhere."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return np.eye(d) + np.ones((d, d))


def regular_simplex(d: int) -> Simplex:
    """``conv(e_0, ..., e_d)`` in R^{d+1}."""
    return Simplex(np.eye(d + 1))


def regular_simplex_chart(d: int) -> Simplex:
    """The regular simplex mapped isometrically into R^d.

    The centred vertices span the hyperplane ``sum x = 0``; an orthonormal
    basis of it (from QR) serves as coordinates.
    """
    e = np.eye(d + 1)
    centred = e - 1.0 / (d + 1)
    q, _ = np.linalg.qr(centred[:, :d])
    return Simplex(centred @ q)


def gaussian_simplex(d: int, stream: RandomStream) -> Simplex:
    if d < 1:
        raise ValueError("d must be >= 1")
    return Simplex(stream.normal((d + 1, d)))


def lifted_difference_grams(d: int, n_grid, stream: RandomStream) -> dict[int, np.ndarray]:
    """Gram matrices of ``X_k^(n) - X_0^(n)`` for every ``n`` in ``n_grid``.

    All ``n`` share one realisation: ``X_k^(n)`` is the first ``n``
    coordinates of a single Gaussian sequence per vertex. Coordinates are
    drawn column by column (``d + 1`` normals per coordinate), so the prefix
    of length ``n`` does not depend on the grid or on chunking. Memory is
    ``O(d^2 + d * LIFT_CHUNK)``.
    """
    grid = sorted({int(n) for n in n_grid})
    if not grid:
        raise ValueError("empty n grid")
    if grid[0] < d:
        raise ValueError(f"every n must be >= d = {d}")
    acc = np.zeros((d, d))
    done = 0
    out = {}
    for target in grid:
        while done < target:
            size = min(LIFT_CHUNK, target - done)
            x = stream.normal((size, d + 1))
            diff = x[:, 1:] - x[:, :1]
            acc += diff.T @ diff
            done += size
        g = acc.copy()
        upper = np.triu_indices(d, 1)
        g.T[upper] = g[upper]
        out[target] = g
    return out


def lifted_difference_gram(d: int, n: int, stream: RandomStream) -> np.ndarray:
    return lifted_difference_grams(d, [n], stream)[n]


def _check_t(d: int, t: float):
    if d < 3:
        raise ValueError("families are defined for d >= 3")
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must lie in [0, 1), got {t}")


def family_s1(d: int, t: float) -> Simplex:
    """``conv(0, e_1, ..., e_{d-1}, (1-t) e_d + t (e_1 + ... + e_{d-1}))``;
    flattens towards the hyperplane ``x_d = 0`` as ``t -> 1``."""
    _check_t(d, t)
    v = np.zeros((d + 1, d))
    v[1:d] = np.eye(d)[: d - 1]
    v[d, : d - 1] = t
    v[d, d - 1] = 1.0 - t
    return Simplex(v)


def family_s2(d: int, t: float) -> Simplex:
    """``conv(0, e_1 - t c, ..., e_d - t c)`` with ``c`` the centroid of the
    ``e_i``; the vertex at the origin falls into the opposite facet as ``t -> 1``."""
    _check_t(d, t)
    v = np.zeros((d + 1, d))
    v[1:] = np.eye(d) - t / d
    return Simplex(v)


def facet_normals(s: Simplex) -> np.ndarray:
    """Unit normals ``u_k`` of the hyperplanes through the origin parallel to
    the facet opposite ``x_k``, oriented so that ``<u_k, x_k - x_j> > 0``.

    With ``n_1..n_d`` the dual normals of the cone at ``x_0``, ``u_k`` is
    ``n_k`` for ``k >= 1`` and ``-(n_1 + ... + n_d)`` for ``k = 0``.
    """
    if s.dim != s.ambient_dim:
        raise ValueError("facet normals need a full-dimensional simplex")
    dual = np.linalg.inv((s.vertices[1:] - s.vertices[0]).T)
    u = np.vstack([-dual.sum(axis=0), dual])
    return u / np.linalg.norm(u, axis=1)[:, None]


def _pattern(code: int, q: int) -> str:
    return "".join("+" if code >> i & 1 else "-" for i in range(q))


@dataclass
class RegionCensus:
    """Sign-vector inventory of the ``d + 1`` facet hyperplanes.

    Patterns are strings over ``+-`` indexed by facet, ``pattern[k]`` being
    the side of hyperplane ``k``. ``counts`` holds the number of sampled
    directions per pattern; ``certificates`` one strictly interior unit
    direction per pattern.
    """

    dim: int
    counts: dict[str, int]
    certificates: dict[str, list[float]]
    total: int
    boundary_resamples: int = 0
    stabilized: bool = False
    seed: int = 0
    region_angles: dict[str, AngleEstimate] | None = field(default=None)

    @property
    def expected_count(self) -> int:
        return 2 ** (self.dim + 1) - 2

    @property
    def sign_vectors(self) -> list[str]:
        return sorted(self.counts)

    @property
    def count(self) -> int:
        return len(self.counts)

    @property
    def complete(self) -> bool:
        return self.count == self.expected_count

    def internal_patterns(self) -> list[str]:
        """Single-minus patterns: the tangent cones ``C_k``."""
        q = self.dim + 1
        return [_pattern(((1 << q) - 1) ^ (1 << k), q) for k in range(q)]

    def negated_internal_patterns(self) -> list[str]:
        q = self.dim + 1
        return [_pattern(1 << k, q) for k in range(q)]

    def frequency_sum_exact(self) -> bool:
        return sum(self.counts.values()) == self.total

    def gamma(self, use_negations: bool = True) -> AngleEstimate:
        """Angle sum from region frequencies.

        With ``use_negations`` the estimate is half the frequency of the
        ``C_k`` and ``-C_k`` regions together, otherwise the frequency of the
        ``C_k`` alone.
        """
        pats = self.internal_patterns()
        if use_negations:
            pats = pats + self.negated_internal_patterns()
        hits = sum(self.counts.get(p, 0) for p in pats)
        scale = 0.5 if use_negations else 1.0
        return AngleEstimate.from_hits(hits, self.total, "membership", self.seed, scale=scale)


def region_census(s: Simplex, n_per_region: int, stream: RandomStream,
                  max_samples: int | None = None, estimate_angles: bool = False) -> RegionCensus:
    """Enumerate the open cells cut out by the facet hyperplanes through 0.

    Standard Gaussian directions are sampled in chunks and their sign
    patterns recorded. Sampling runs until at least
    ``n_per_region * (2^(d+1) - 2)`` directions have been seen and either the
    general-position count is reached or ``max_samples`` is exhausted. The
    first direction seen in each cell is kept as its certificate.
    """
    if s.dim != s.ambient_dim:
        raise ValueError("region census needs a full-dimensional simplex")
    if n_per_region < 1:
        raise ValueError("n_per_region must be >= 1")
    d = s.dim
    q = d + 1
    bound = 2 ** q - 2
    normals = facet_normals(s)
    target = n_per_region * bound
    if max_samples is None:
        max_samples = max(100 * target, 10**7)

    counts = np.zeros(1 << q, dtype=np.int64)
    certificates: dict[int, np.ndarray] = {}
    total = boundary = last_new = 0
    while True:
        z = stream.normal((CHUNK, d))
        codes = kernels.sign_codes(z, normals, SIGN_RTOL)
        keep = codes >= 0
        boundary += int(np.count_nonzero(~keep))
        z, codes = z[keep], codes[keep]
        found, first = np.unique(codes, return_index=True)
        for c, j in zip(found.tolist(), first.tolist()):
            if c not in certificates:
                certificates[c] = z[j] / np.linalg.norm(z[j])
                last_new = total + j + 1
        counts += np.bincount(codes, minlength=1 << q)
        total += len(codes)
        if len(certificates) > bound:
            raise GeneralPositionViolation(
                f"{len(certificates)} sign regions observed, at most {bound} possible"
            )
        if total >= target and (len(certificates) == bound or total >= max_samples):
            break

    for c, z0 in certificates.items():
        proj = normals @ z0
        signs = np.array([c >> i & 1 for i in range(q)], dtype=bool)
        if np.any(np.abs(proj) <= SIGN_RTOL) or np.any((proj > 0) != signs):
            raise GeneralPositionViolation(f"certificate for pattern {_pattern(c, q)} failed")

    census = RegionCensus(
        dim=d,
        counts={_pattern(c, q): int(counts[c]) for c in sorted(certificates)},
        certificates={_pattern(c, q): z0.tolist() for c, z0 in sorted(certificates.items())},
        total=total,
        boundary_resamples=boundary,
        stabilized=total - last_new >= 10 * len(certificates),
        seed=stream.seed,
    )
    if estimate_angles:
        census.region_angles = {
            p: AngleEstimate.from_hits(k, total, "membership", stream.seed) for p, k in census.counts.items()
        }
    return census
