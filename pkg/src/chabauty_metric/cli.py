"""Command line front end.

Results go to stdout (JSON, or CSV for ``curve``); diagnostics to stderr.
Exit codes: 0 success, 1 usage error, 2 malformed input, 3 self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .convergence import ConvergenceConfig, analyze
from .io import MalformedInputError, read_document, read_sequence_dir
from .metric import distance_curve
from .quadrature import chabauty_distance_quadrature
from .selftest import run_selftest
from .space import COORDINATE_KINDS, DimensionError, coordinate_space
from .weights import parse_weight

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_SELFTEST = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _weight(text):
    try:
        return parse_weight(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _base(text):
    try:
        return tuple(float(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad base point {text!r}") from None


def _common(p, tol_default):
    p.add_argument("--metric", choices=COORDINATE_KINDS, default="euclidean")
    p.add_argument("--base", type=_base, default=None, help="comma-separated base point (default: origin)")
    p.add_argument("--weight", type=_weight, default=parse_weight("exp:1"), help="exp:<rate> (default exp:1)")
    p.add_argument("--rcut", type=_positive, default=30.0)
    p.add_argument("--tol", type=_positive, default=tol_default)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chabauty", description="Chabauty distance between finite point sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="distance between two point-set files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    _common(p, 1e-9)
    p.add_argument("--check", action="store_true", help="also integrate numerically and report the difference")

    p = sub.add_parser("curve", help="d_R as a step function, as CSV rows")
    p.add_argument("file_a")
    p.add_argument("file_b")
    _common(p, 1e-9)

    p = sub.add_parser("converge", help="check convergence of a numbered sequence of files")
    p.add_argument("sequence_dir")
    p.add_argument("limit_file")
    _common(p, 1e-2)
    p.add_argument("--tail-start", type=int, default=None)
    p.add_argument("--threshold", type=_positive, default=1e-3)

    p = sub.add_parser("selftest", help="run the seeded property suites")
    _common(p, 1e-9)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--sentinel", choices=["broken-cap"], default=None, help=argparse.SUPPRESS)
    return parser


def _space(args, dim):
    base = args.base
    if base is not None and len(base) != dim:
        raise UsageError(f"--base has {len(base)} coordinates but the data has dimension {dim}")
    try:
        return coordinate_space(args.metric, base, dim)
    except DimensionError as exc:
        raise UsageError(str(exc)) from None


def _load_pair(args):
    doc_a, doc_b = read_document(args.file_a), read_document(args.file_b)
    if doc_a.dim != doc_b.dim:
        raise MalformedInputError(f"dimension mismatch: {doc_a.dim} vs {doc_b.dim}")
    return _space(args, doc_a.dim), doc_a.to_set(), doc_b.to_set()


def cmd_dist(args, out):
    space, A, B = _load_pair(args)
    curve = distance_curve(space, A, B)
    report = {
        "distance": curve.integrate(args.weight),
        "breakpoints": curve.breakpoints.tolist(),
        "segment_values": curve.values.tolist(),
        "weight": args.weight.spec(),
        "metric": args.metric,
        "base": list(space.base_point),
    }
    if args.check:
        q = chabauty_distance_quadrature(space, A, B, args.weight, R_cut=args.rcut, tol=args.tol)
        report["quadrature"] = {"value": q.value, "error_bound": q.error_bound}
    json.dump(report, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_curve(args, out):
    space, A, B = _load_pair(args)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["r_start", "r_end", "d_r"])
    for lo, hi, v in distance_curve(space, A, B).intervals():
        writer.writerow([repr(lo), "inf" if math.isinf(hi) else repr(hi), repr(v)])
    return EXIT_OK


def cmd_converge(args, out):
    docs = read_sequence_dir(args.sequence_dir)
    limit_doc = read_document(args.limit_file)
    if any(d.dim != limit_doc.dim for d in docs):
        raise MalformedInputError("sequence and limit files differ in dimension")
    space = _space(args, limit_doc.dim)
    if args.tail_start is not None and not 0 <= args.tail_start < len(docs):
        raise UsageError(f"--tail-start must be in [0, {len(docs) - 1}]")
    config = ConvergenceConfig(
        tail_start=args.tail_start, tol=args.tol, d_threshold=args.threshold, weight=args.weight
    )
    report = analyze(space, [d.to_set() for d in docs], limit_doc.to_set(), config)
    json.dump(report.to_dict(), out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_selftest(args, out):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    cap = 2.0 if args.sentinel == "broken-cap" else 1.0
    report = run_selftest(
        seed=args.seed,
        trials=args.trials,
        metric=args.metric,
        weight=args.weight,
        cap=cap,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    json.dump(report, out, indent=2)
    out.write("\n")
    return EXIT_OK if report["passed"] else EXIT_SELFTEST


COMMANDS = {"dist": cmd_dist, "curve": cmd_curve, "converge": cmd_converge, "selftest": cmd_selftest}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except MalformedInputError as exc:
        print(f"chabauty: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"chabauty: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())
