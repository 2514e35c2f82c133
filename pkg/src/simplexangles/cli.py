"""Command-line entry point: ``simplex-angles <command> [options]``.

Exit codes: 0 verdict pass, 1 usage error, 2 degenerate input,
3 numerical degeneracy detected, 4 verdict fail.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments
from .errors import (
    DegenerateCone, DegenerateProjection, GeneralPositionViolation, NotPositiveDefinite,
    NumericalInstability, Singular,
)
from .report import encode

log = logging.getLogger("simplexangles")

EXIT_PASS, EXIT_USAGE, EXIT_DEGENERATE, EXIT_NUMERICAL, EXIT_FAIL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int(text: str) -> int:
    # accept 1e6-style counts
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(value)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [_int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--stream", type=int, default=0, help="stream id within the seed")
    common.add_argument("--shards", type=int, default=1, help="parallel shards (1 = reproducibility reference)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timing", action="store_true", help="omit wall time so reruns are byte-identical")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="simplex-angles", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("angle", parents=[common], help="solid angle of one simplicial cone")
    p.add_argument("--cone", required=True, help="gram:d:rho, regular:d, or a generator file (one per row)")
    p.add_argument("--method", default="orthant",
                   help="comma list of membership, orthant, crofton, exact")
    p.add_argument("--samples", type=_int, default=10**6)

    p = sub.add_parser("verify-main", parents=[common], help="Gaussian vs regular simplex angle sums")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=_int, default=10**6, help="trials for hull and orthant estimators")
    p.add_argument("--simplices", type=_int, default=1000, help="Gaussian simplices for the direct average")
    p.add_argument("--angle-samples", type=_int, default=10**4, help="orthant samples per vertex")

    p = sub.add_parser("bounds", parents=[common], help="angle-sum bounds and the S1/S2 families")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t-grid", type=_floats, default=list(experiments.DEFAULT_T_GRID))
    p.add_argument("--samples", type=_int, default=10**6, help="orthant samples per vertex along families")
    p.add_argument("--simplices", type=_int, default=100, help="random Gaussian simplices to bound-check")
    p.add_argument("--angle-samples", type=_int, default=10**5, help="orthant samples per vertex, random simplices")

    p = sub.add_parser("freeze", parents=[common], help="lifted Gaussian simplices as n grows")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n-grid", type=_ints, default=list(experiments.DEFAULT_N_GRID))
    p.add_argument("--replicates", type=_int, default=100)
    p.add_argument("--angle-samples", type=_int, default=10**4)
    p.add_argument("--samples", type=_int, default=10**6, help="orthant samples for the regular value (d > 3)")

    p = sub.add_parser("regions", parents=[common], help="sign-region census of the facet hyperplanes")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=_int, default=10**4, help="minimum samples per expected region")
    p.add_argument("--angle-samples", type=_int, default=10**5)
    return parser


def run(args) -> "experiments.ExperimentReport":
    common = dict(seed=args.seed, stream_id=args.stream, shards=args.shards, timing=not args.no_timing)
    if args.shards < 1:
        raise ValueError("--shards must be >= 1")
    if args.command == "angle":
        methods = [m.strip() for m in args.method.split(",") if m.strip()]
        return experiments.run_angle(args.cone, methods, n=args.samples, **common)
    if args.command == "verify-main":
        return experiments.run_verify_main(
            args.dim, n=args.samples, n_simplices=args.simplices, n_angle=args.angle_samples, **common)
    if args.command == "bounds":
        return experiments.run_bounds(
            args.dim, t_grid=args.t_grid, n=args.samples, n_simplices=args.simplices,
            n_angle=args.angle_samples, **common)
    if args.command == "freeze":
        return experiments.run_freeze(
            args.dim, n_grid=args.n_grid, replicates=args.replicates, n_angle=args.angle_samples,
            n_regular=args.samples, **common)
    if args.command == "regions":
        return experiments.run_regions(args.dim, n_per_region=args.samples, n_angle=args.angle_samples, **common)
    raise UsageError(f"unknown command {args.command!r}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"simplex-angles: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        report = run(args)
    except GeneralPositionViolation as exc:
        payload = {"error": "GeneralPositionViolation", "message": str(exc),
                   "vertices": getattr(exc, "vertices", None)}
        _emit(json.dumps(encode(payload), indent=2) + "\n", args.out)
        print(f"simplex-angles: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NumericalInstability, DegenerateProjection) as exc:
        print(f"simplex-angles: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DegenerateCone, NotPositiveDefinite, Singular) as exc:
        print(f"simplex-angles: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as exc:
        print(f"simplex-angles: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    log.info("%s d=%d verdict=%s", report.experiment, report.dimension, report.verdict)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
