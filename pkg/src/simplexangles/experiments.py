"""Experiment drivers behind the CLI subcommands.

Each driver returns a finalized :class:`ExperimentReport`. Random numbers
come from children of one ``RandomStream(seed, stream_id)`` with fixed child
paths, so a report is reproducible from its parameters alone.
"""
from __future__ import annotations

import itertools
import math
import time
from pathlib import Path

import numpy as np

from . import numlin
from ._backend import BACKEND
from .cones import SimplicialCone, angle_exact
from .errors import GeneralPositionViolation
from .mc import (
    METHODS, AngleEstimate, RandomStream, compare, estimate, estimate_hull, estimate_orthant,
)
from .report import (
    ExperimentReport, check_record, comparison_record, estimate_record, value_record,
)
from .simplex import (
    angle_sum, family_s1, family_s2, gaussian_simplex, lifted_difference_grams, region_census,
    regular_gram,
)

DEFAULT_T_GRID = (0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99)
DEFAULT_N_GRID = (10, 100, 1000, 10000)
T_MAX = 0.995
S1_LIMIT_THRESHOLD = 0.05
S2_LIMIT_THRESHOLD = 0.40


def _fmt(x: float) -> str:
    return f"{x:g}"


def parse_cone(spec: str) -> SimplicialCone:
    """``gram:d:rho`` (equicorrelated), ``regular:d``, or a generator file
    with one whitespace-separated generator per row."""
    if spec.startswith("gram:"):
        try:
            _, d, rho = spec.split(":")
            d, rho = int(d), float(rho)
        except ValueError as exc:
            raise ValueError(f"expected gram:d:rho, got {spec!r}") from exc
        if d < 1:
            raise ValueError("gram dimension must be >= 1")
        g = np.full((d, d), rho)
        np.fill_diagonal(g, 1.0)
        return SimplicialCone.from_gram(g)
    if spec.startswith("regular:"):
        try:
            d = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ValueError(f"expected regular:d, got {spec!r}") from exc
        return SimplicialCone.from_gram(regular_gram(d))
    path = Path(spec)
    if not path.is_file():
        raise ValueError(f"cone input {spec!r} is neither gram:d:rho, regular:d, nor a file")
    return SimplicialCone(np.loadtxt(path, ndmin=2))


def _timed(report: ExperimentReport, start: float, timing: bool) -> ExperimentReport:
    report.wall_time = time.perf_counter() - start if timing else None
    return report.finalize()


def _base_params(seed, stream_id, shards, **extra):
    return {"seed": seed, "stream": stream_id, "shards": shards, "backend": BACKEND, **extra}


def run_angle(cone_spec: str, methods, n: int = 10**6, seed: int = 42, stream_id: int = 0,
              shards: int = 1, timing: bool = True) -> ExperimentReport:
    start = time.perf_counter()
    cone = parse_cone(cone_spec) if isinstance(cone_spec, str) else cone_spec
    methods = list(dict.fromkeys(methods))
    for m in methods:
        if m not in METHODS or m == "hull":
            raise ValueError(f"unknown method {m!r}")
    if "exact" in methods and cone.dim > 3:
        raise ValueError("exact angles are available for d <= 3 only")
    root = RandomStream(seed, stream_id)
    report = ExperimentReport(
        "angle", cone.dim,
        _base_params(seed, stream_id, shards, cone=str(cone_spec), methods=methods, n=n,
                     ambient_dim=cone.ambient_dim),
    )
    estimates = {}
    for m in methods:
        # the child index is the method's fixed position, independent of the order requested
        estimates[m] = estimate(cone, m, n, root.child(METHODS.index(m)), shards)
        report.results.append(estimate_record(m, estimates[m]))
    for a, b in itertools.combinations(methods, 2):
        report.results.append(comparison_record(f"{a}_vs_{b}", compare(estimates[a], estimates[b])))
    return _timed(report, start, timing)


def _mean_estimate(values, n_each: int, seed: int) -> AngleEstimate:
    v = np.asarray(values, dtype=float)
    se = float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
    return AngleEstimate(float(np.mean(v)), se, n_each * len(v), "orthant", seed)


def run_verify_main(d: int, n: int = 10**6, n_simplices: int = 1000, n_angle: int = 10**4,
                    seed: int = 42, stream_id: int = 0, shards: int = 1, timing: bool = True,
                    direct_max_dim: int = 4) -> ExperimentReport:
    """Expected angle sum of the Gaussian simplex against the regular simplex."""
    if d < 2:
        raise ValueError("verify-main needs d >= 2")
    start = time.perf_counter()
    root = RandomStream(seed, stream_id)
    report = ExperimentReport(
        "verify-main", d,
        _base_params(seed, stream_id, shards, n=n, n_simplices=n_simplices, n_angle=n_angle),
    )
    scale = d + 1
    hull = estimate_hull(d, n, root.child(0), shards)
    regular = estimate_orthant(regular_gram(d), n, root.child(1), shards)
    sides = {"gaussian_hull_gamma": hull.scaled(scale), "regular_orthant_gamma": regular.scaled(scale)}
    report.results += [
        estimate_record("gaussian_hull_angle", hull),
        estimate_record("regular_orthant_angle", regular),
        estimate_record("gaussian_hull_gamma", sides["gaussian_hull_gamma"]),
        estimate_record("regular_orthant_gamma", sides["regular_orthant_gamma"]),
    ]
    if d <= direct_max_dim and n_simplices > 0:
        gammas = [
            angle_sum(gaussian_simplex(d, root.child(2, i)), n_angle, root.child(3, i)).value
            for i in range(n_simplices)
        ]
        sides["gaussian_direct_gamma"] = _mean_estimate(gammas, n_angle * (d + 1), seed)
        report.results.append(estimate_record("gaussian_direct_gamma", sides["gaussian_direct_gamma"]))
    if d <= 3:
        exact = scale * angle_exact(regular_gram(d))
        report.results.append(value_record("regular_exact_gamma", exact))
        for label, est in sides.items():
            report.results.append(comparison_record(f"{label}_vs_exact", compare(est, exact)))
    for a, b in itertools.combinations(sides, 2):
        report.results.append(comparison_record(f"{a}_vs_{b}", compare(sides[a], sides[b])))
    return _timed(report, start, timing)


def _trend_check(label, ests, decreasing: bool):
    """No significant step against the trend and a significant overall move."""
    sign = -1.0 if decreasing else 1.0
    steps_ok = all(
        sign * (b.value - a.value) >= -4.0 * math.hypot(a.std_error, b.std_error)
        for a, b in zip(ests, ests[1:])
    )
    first, last = ests[0], ests[-1]
    overall = sign * (last.value - first.value) > 4.0 * math.hypot(first.std_error, last.std_error)
    return check_record(label, steps_ok and overall, steps_ok=steps_ok, overall=overall)


def _cond(s) -> float:
    return max(numlin.condition_number(s.vertex_gram(i)) for i in range(s.dim + 1))


def run_bounds(d: int, t_grid=DEFAULT_T_GRID, n: int = 10**6, n_simplices: int = 100,
               n_angle: int = 10**5, seed: int = 42, stream_id: int = 0, shards: int = 1,
               timing: bool = True) -> ExperimentReport:
    """Angle sums along the S1/S2 families and of random Gaussian simplices."""
    if d < 3:
        raise ValueError("bounds needs d >= 3")
    t_grid = sorted(float(t) for t in t_grid)
    if not t_grid or t_grid[0] < 0 or t_grid[-1] > T_MAX:
        raise ValueError(f"t values must lie in [0, {T_MAX}]")
    start = time.perf_counter()
    root = RandomStream(seed, stream_id)
    report = ExperimentReport(
        "bounds", d,
        _base_params(seed, stream_id, shards, t_grid=t_grid, n=n, n_simplices=n_simplices, n_angle=n_angle),
    )
    fams = {"S1": family_s1, "S2": family_s2}
    sweeps = {name: [] for name in fams}
    in_bounds = []
    for j, t in enumerate(t_grid):
        for f, (name, family) in enumerate(fams.items()):
            s = family(d, t)
            est = angle_sum(s, n, root.child(f, j), shards)
            sweeps[name].append(est)
            report.results.append(estimate_record(f"{name}(t={_fmt(t)})", est))
            report.results.append(value_record(f"{name}(t={_fmt(t)}).cond", _cond(s)))
            in_bounds.append(0.0 < est.value < 0.5 + 4.0 * est.std_error)
    report.results.append(check_record("family_values_in_bounds", all(in_bounds)))
    if t_grid[0] == 0.0:
        report.results.append(comparison_record("S1(0)_vs_S2(0)", compare(sweeps["S1"][0], sweeps["S2"][0])))
    if len(t_grid) > 1:
        report.results.append(_trend_check("S1_decreasing", sweeps["S1"], decreasing=True))
        report.results.append(_trend_check("S2_increasing", sweeps["S2"], decreasing=False))
    if t_grid[-1] >= 0.99:
        tl = _fmt(t_grid[-1])
        report.results.append(check_record(
            f"S1(t={tl})<{S1_LIMIT_THRESHOLD}", sweeps["S1"][-1].value < S1_LIMIT_THRESHOLD))
        report.results.append(check_record(
            f"S2(t={tl})>{S2_LIMIT_THRESHOLD}", sweeps["S2"][-1].value > S2_LIMIT_THRESHOLD))
    if n_simplices > 0:
        values, ok = [], True
        for i in range(n_simplices):
            est = angle_sum(gaussian_simplex(d, root.child(2, i)), n_angle, root.child(3, i), shards)
            values.append(est.value)
            ok &= 0.0 < est.value < 0.5 + 4.0 * est.std_error
        report.results.append(value_record("random_gamma_min", min(values)))
        report.results.append(value_record("random_gamma_max", max(values)))
        report.results.append(check_record("random_values_in_bounds", ok, count=n_simplices))
    return _timed(report, start, timing)


def _correlation_deviation(g) -> float:
    r = numlin.correlation(g)
    off = r[np.triu_indices(len(r), 1)]
    return float(np.mean(np.abs(off - 0.5))) if off.size else 0.0


def run_freeze(d: int, n_grid=DEFAULT_N_GRID, replicates: int = 100, n_angle: int = 10**4,
               n_regular: int = 10**6, seed: int = 42, stream_id: int = 0, shards: int = 1,
               timing: bool = True) -> ExperimentReport:
    """Lifted Gaussian simplices in R^n: geometry freezes, expected angle does not move."""
    n_grid = sorted({int(n) for n in n_grid})
    if d < 2:
        raise ValueError("freeze needs d >= 2")
    if not n_grid or n_grid[0] < d:
        raise ValueError(f"every n must be >= d = {d}")
    if replicates < 2:
        raise ValueError("need at least two replicates")
    start = time.perf_counter()
    root = RandomStream(seed, stream_id)
    report = ExperimentReport(
        "freeze", d,
        _base_params(seed, stream_id, shards, n_grid=n_grid, replicates=replicates,
                     n_angle=n_angle, n_regular=n_regular),
    )
    dev = np.empty((replicates, len(n_grid)))
    ang = np.empty((replicates, len(n_grid)))
    for r in range(replicates):
        grams = lifted_difference_grams(d, n_grid, root.child(0, r))
        for j, n in enumerate(n_grid):
            dev[r, j] = _correlation_deviation(grams[n])
            ang[r, j] = estimate_orthant(grams[n], n_angle, root.child(1, r, j), shards).value
    means = []
    for j, n in enumerate(n_grid):
        report.results.append(value_record(
            f"deviation(n={n})", float(dev[:, j].mean()), float(dev[:, j].std(ddof=1) / math.sqrt(replicates))))
        means.append(_mean_estimate(ang[:, j], n_angle, seed))
        report.results.append(estimate_record(f"mean_angle(n={n})", means[-1]))
    report.results.append(estimate_record("mean_angle(all n)", _mean_estimate(ang.mean(axis=1), n_angle, seed)))
    devs = dev.mean(axis=0)
    report.results.append(check_record(
        "deviation_decreasing", bool(np.all(np.diff(devs) < 0)), deviations=devs.tolist()))
    for (i, a), (j, b) in itertools.combinations(enumerate(n_grid), 2):
        report.results.append(comparison_record(f"mean_angle(n={a})_vs_(n={b})", compare(means[i], means[j])))
    if d <= 3:
        target = angle_exact(regular_gram(d))
        report.results.append(value_record("regular_exact_angle", target))
    else:
        target = estimate_orthant(regular_gram(d), n_regular, root.child(2), shards)
        report.results.append(estimate_record("regular_orthant_angle", target))
    report.results.append(comparison_record(f"mean_angle(n={n_grid[-1]})_vs_regular", compare(means[-1], target)))
    return _timed(report, start, timing)


def run_regions(d: int, n_per_region: int = 10**4, n_angle: int = 10**5, seed: int = 42,
                stream_id: int = 0, shards: int = 1, timing: bool = True) -> ExperimentReport:
    """Sign-region census of a random Gaussian simplex's facet hyperplanes."""
    if not 2 <= d <= 5:
        raise ValueError("regions supports 2 <= d <= 5")
    start = time.perf_counter()
    root = RandomStream(seed, stream_id)
    report = ExperimentReport(
        "regions", d, _base_params(seed, stream_id, shards, n_per_region=n_per_region, n_angle=n_angle),
    )
    s = gaussian_simplex(d, root.child(0))
    try:
        census = region_census(s, n_per_region, root.child(1))
    except GeneralPositionViolation as exc:
        exc.vertices = s.vertices.tolist()
        raise
    report.results += [
        check_record("region_count", census.count == census.expected_count,
                     count=census.count, expected=census.expected_count, stabilized=census.stabilized),
        check_record("frequency_sum_exact", census.frequency_sum_exact(),
                     total=census.total, boundary_resamples=census.boundary_resamples),
        check_record("internal_patterns_present",
                     all(p in census.counts for p in census.internal_patterns()),
                     internal=census.internal_patterns(), negated=census.negated_internal_patterns()),
        value_record("region_counts", census.counts),
    ]
    gamma_census = census.gamma()
    gamma_sum = angle_sum(s, n_angle, root.child(2), shards)
    report.results += [
        estimate_record("census_gamma", gamma_census),
        estimate_record("angle_sum_gamma", gamma_sum),
        comparison_record("census_vs_angle_sum", compare(gamma_census, gamma_sum)),
    ]
    report.parameters["vertices"] = s.vertices.tolist()
    return _timed(report, start, timing)


__all__ = [
    "parse_cone", "run_angle", "run_bounds", "run_freeze",
    "run_regions", "run_verify_main",
]
