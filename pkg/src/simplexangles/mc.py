"""Seeded Monte Carlo estimators of solid angles.

Four independent routes to the same quantity:

* ``estimate_membership`` - fraction of standard Gaussian points inside a
  full-dimensional cone.
* ``estimate_orthant`` - Gaussian orthant probability with covariance equal
  to the inverse Gram matrix; needs nothing but the Gram matrix.
* ``estimate_hull`` - expected vertex angle of the Gaussian simplex as half
  the probability that the origin lies in the hull of projected differences.
* ``estimate_crofton`` - half the probability that a uniform random subspace
  of complementary dimension plus one meets the cone.

All estimators draw from a :class:`RandomStream` in fixed-size chunks, so a
result is a pure function of ``(inputs, seed, stream_id, n, shards)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels, numlin
from .cones import SimplicialCone, as_cone
from .errors import NumericalInstability

CHUNK = 1 << 16
MEMBERSHIP_TOL = 1e-10
HULL_TOL = 1e-10
PROJECTION_RTOL = 1e-12
SIGMA_THRESHOLD = 4.0
METHODS = ("membership", "orthant", "hull", "crofton", "exact")


class RandomStream:
    """A reproducible stream of standard normals.

    ``(seed, stream_id)`` plus an optional child path select a PCG64 state via
    ``numpy.random.SeedSequence`` spawn keys. Children never depend on how much
    of the parent has been consumed.
    """

    def __init__(self, seed: int = 42, stream_id: int = 0, path: tuple = ()):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def child(self, *path: int) -> RandomStream:
        return RandomStream(self.seed, self.stream_id, self.path + path)

    def normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"


def gaussian_vector(stream: RandomStream, dim: int) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return stream.normal(dim)


def uniform_direction(stream: RandomStream, dim: int) -> np.ndarray:
    # rotational invariance of the standard Gaussian
    z = gaussian_vector(stream, dim)
    return z / np.linalg.norm(z)


@dataclass(frozen=True)
class AngleEstimate:
    value: float
    std_error: float
    n_samples: int
    method: str
    seed: int
    resampled: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.std_error < 0:
            raise ValueError("std_error must be non-negative")

    @classmethod
    def from_hits(cls, hits, n, method, seed, scale=1.0, resampled=0):
        if n < 1:
            raise ValueError("need at least one sample")
        p = hits / n
        se = math.sqrt(p * (1.0 - p) / n)
        return cls(scale * p, scale * se, int(n), method, int(seed), int(resampled))

    @classmethod
    def exact(cls, value, seed=0):
        return cls(float(value), 0.0, 0, "exact", int(seed))

    def scaled(self, factor: float) -> AngleEstimate:
        # a scaled angle may leave [0, 1], e.g. (d+1) * angle; keep the record as is
        return AngleEstimate(
            factor * self.value, abs(factor) * self.std_error, self.n_samples,
            self.method, self.seed, self.resampled,
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ComparisonVerdict:
    a: float
    b: float
    difference: float
    combined_se: float
    z: float
    passed: bool
    threshold: float = SIGMA_THRESHOLD

    def to_dict(self) -> dict:
        return asdict(self)


def z_score(diff: float, combined_se: float) -> float:
    if combined_se > 0:
        return diff / combined_se
    return 0.0 if diff == 0 else math.inf


def compare(a: AngleEstimate | float, b: AngleEstimate | float,
            threshold: float = SIGMA_THRESHOLD) -> ComparisonVerdict:
    """Pass when ``|a - b| <= threshold * sqrt(se_a**2 + se_b**2)``.

    Plain floats are treated as exact values with zero standard error.
    """
    va, sa = (a.value, a.std_error) if isinstance(a, AngleEstimate) else (float(a), 0.0)
    vb, sb = (b.value, b.std_error) if isinstance(b, AngleEstimate) else (float(b), 0.0)
    diff = abs(va - vb)
    se = math.hypot(sa, sb)
    z = z_score(diff, se)
    return ComparisonVerdict(va, vb, diff, se, z, bool(z <= threshold), threshold)


def combine_sum(estimates, method=None) -> AngleEstimate:
    """Sum of independent estimates; standard errors add in quadrature."""
    estimates = list(estimates)
    value = math.fsum(e.value for e in estimates)
    se = math.sqrt(math.fsum(e.std_error ** 2 for e in estimates))
    return AngleEstimate(
        value, se, sum(e.n_samples for e in estimates),
        method or estimates[0].method, estimates[0].seed,
        sum(e.resampled for e in estimates),
    )


def _split(n: int, shards: int) -> list[int]:
    base, extra = divmod(n, shards)
    return [base + (i < extra) for i in range(shards)]


def _run(count_fn, n: int, stream: RandomStream, shards: int = 1):
    """Run ``count_fn(n_i, stream_i) -> (hits, resampled)`` over shards.

    ``shards == 1`` consumes ``stream`` itself and is the reproducibility
    reference; otherwise shard ``i`` uses ``stream.child(i)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if shards < 1:
        raise ValueError("shards must be >= 1")
    if shards == 1:
        return count_fn(n, stream)
    sizes = _split(n, shards)
    streams = [stream.child(i) for i in range(shards)]
    with ThreadPoolExecutor(max_workers=shards) as pool:
        parts = list(pool.map(count_fn, sizes, streams))
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def _chunks(n: int):
    done = 0
    while done < n:
        size = min(CHUNK, n - done)
        yield size
        done += size


def _check_resamples(resampled: int, n: int):
    if resampled > n / 1000:
        raise NumericalInstability(f"{resampled} degenerate trials out of {n}")


def estimate_membership(cone, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Fraction of standard Gaussian points inside a full-dimensional cone."""
    cone = as_cone(cone)
    if cone.dim != cone.ambient_dim:
        raise ValueError("membership estimator needs a full-dimensional cone")
    normals = cone.coefficient_map()

    def count(n_i, s):
        hits = 0
        for size in _chunks(n_i):
            hits += kernels.count_nonnegative_images(s.normal((size, cone.dim)), normals, MEMBERSHIP_TOL)
        return hits, 0

    hits, _ = _run(count, n, stream, shards)
    return AngleEstimate.from_hits(hits, n, "membership", stream.seed)


def orthant_factor(g) -> np.ndarray:
    """Cholesky factor of the inverse correlation matrix of ``g``."""
    return numlin.cholesky(numlin.inverse(numlin.correlation(g)))


def estimate_orthant(g, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Probability that ``N(0, inverse(g))`` lands in the non-negative orthant.

    ``g`` is first reduced to its correlation matrix, so the sampled sign
    pattern does not depend on generator lengths.
    """
    g = numlin.as_square(g, "Gram matrix")
    factor = orthant_factor(g)
    d = len(factor)

    def count(n_i, s):
        hits = 0
        for size in _chunks(n_i):
            hits += kernels.count_nonnegative_images(s.normal((size, d)), factor, 0.0)
        return hits, 0

    hits, _ = _run(count, n, stream, shards)
    return AngleEstimate.from_hits(hits, n, "orthant", stream.seed)


def _hull_trials(size: int, s: RandomStream, d: int) -> np.ndarray:
    y = s.normal((size, d - 1, d + 1))
    return kernels.hull_status(y[:, :, 1:] - y[:, :, :1], HULL_TOL)


def estimate_hull(d: int, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Expected vertex angle of the d-dimensional Gaussian simplex.

    Each trial draws ``d + 1`` standard Gaussian points ``Y_0..Y_d`` in
    dimension ``d - 1`` and records whether the origin lies in the convex hull
    of ``Y_i - Y_0``. The estimate is half the hit fraction.
    """
    if d < 2:
        raise ValueError("hull estimator needs d >= 2")

    def count(n_i, s):
        hits = resampled = 0
        for size in _chunks(n_i):
            status = _hull_trials(size, s, d)
            bad = int(np.count_nonzero(status == kernels.SINGULAR))
            hits += int(np.count_nonzero(status == kernels.HIT))
            while bad:
                resampled += bad
                _check_resamples(resampled, n)
                status = _hull_trials(bad, s, d)
                hits += int(np.count_nonzero(status == kernels.HIT))
                bad = int(np.count_nonzero(status == kernels.SINGULAR))
        return hits, resampled

    hits, resampled = _run(count, n, stream, shards)
    _check_resamples(resampled, n)
    return AngleEstimate.from_hits(hits, n, "hull", stream.seed, scale=0.5, resampled=resampled)


def _crofton_trials(size: int, s: RandomStream, gens: np.ndarray):
    k, m = gens.shape
    # uniform (m-k+1)-subspace W = ker(G); G v_i are the generators seen modulo W
    g = s.normal((size, k - 1, m))
    pts = g @ gens.T
    if k > 1:
        lengths = np.linalg.norm(pts, axis=1)
        bound = PROJECTION_RTOL * np.linalg.norm(g, axis=(1, 2))[:, None] * np.linalg.norm(gens, axis=1)[None, :]
        degenerate = np.any(lengths <= bound, axis=1)
    else:
        degenerate = np.zeros(size, dtype=bool)
    status = kernels.hull_status(pts, HULL_TOL)
    status[degenerate] = kernels.SINGULAR
    return status


def estimate_crofton(cone, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Intrinsic angle of a k-dimensional cone in R^m by the conic Crofton route.

    The random subspace is the kernel of a ``(k-1) x m`` Gaussian matrix
    ``G``; it meets the cone nontrivially iff the origin lies in the convex
    hull of ``G v_1, ..., G v_k``.
    """
    cone = as_cone(cone)
    gens = cone.generators

    def count(n_i, s):
        hits = resampled = 0
        for size in _chunks(n_i):
            status = _crofton_trials(size, s, gens)
            bad = int(np.count_nonzero(status == kernels.SINGULAR))
            hits += int(np.count_nonzero(status == kernels.HIT))
            while bad:
                resampled += bad
                _check_resamples(resampled, n)
                status = _crofton_trials(bad, s, gens)
                hits += int(np.count_nonzero(status == kernels.HIT))
                bad = int(np.count_nonzero(status == kernels.SINGULAR))
        return hits, resampled

    hits, resampled = _run(count, n, stream, shards)
    _check_resamples(resampled, n)
    return AngleEstimate.from_hits(hits, n, "crofton", stream.seed, scale=0.5, resampled=resampled)


def estimate_exact(cone_or_gram) -> AngleEstimate:
    from .cones import angle_exact

    g = cone_or_gram.gram if isinstance(cone_or_gram, SimplicialCone) else cone_or_gram
    return AngleEstimate.exact(angle_exact(g))


def estimate(cone, method: str, n: int, stream: RandomStream, shards: int = 1) -> AngleEstimate:
    """Dispatch one of the cone estimators by name."""
    cone = as_cone(cone)
    if method == "membership":
        if cone.dim != cone.ambient_dim:
            cone = cone.intrinsic()
        return estimate_membership(cone, n, stream, shards)
    if method == "orthant":
        return estimate_orthant(cone.gram, n, stream, shards)
    if method == "crofton":
        return estimate_crofton(cone, n, stream, shards)
    if method == "exact":
        return estimate_exact(cone)
    raise ValueError(f"unknown cone method {method!r}; expected membership, orthant, crofton or exact")


__all__ = [
    "AngleEstimate", "ComparisonVerdict", "RandomStream",
    "combine_sum", "compare", "estimate", "estimate_crofton", "estimate_exact",
    "estimate_hull", "estimate_membership", "estimate_orthant", "gaussian_vector",
    "uniform_direction",
]
