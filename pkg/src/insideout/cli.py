"""Command-line front end.

Exit codes: 0 success, 2 parse error or refused request, 3 infeasible or
degenerate geometry, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .arrangement import InsideOutPolytope, enumerate_regions, parse_hyperplanes
from .checkpoint import CheckpointMismatch, run_checkpointed
from .ehrhart import count_lattice_points, counting_quasipolynomial, verify_quasipolynomial
from .errors import (
    DegenerateArrangement,
    EmptyPolyhedron,
    NoLatticeCompatibleOrigin,
    ParseError,
    UnboundedPolyhedron,
    VerificationFailure,
)
from .gfun import gf_series, qp_to_gf
from .magic import AFFINE, CUBICAL, MagicSpec, brute_force_count, oracle_limit, run_magic, verify_magic
from .polytope import format_hrep, is_bounded, is_feasible, is_open_nonempty, parse_hrep

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GEOMETRY = 3
EXIT_VERIFY = 4


class Refusal(Exception):
    pass


def _emit(args, record: dict, lines: list[str]):
    if args.format == "structured":
        print(json.dumps(record, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))


def _series_lines(name: str, values) -> str:
    return "series: " + ", ".join(f"{name}({t})={v}" for t, v in enumerate(values))


def _series(gf, n: int) -> list[int]:
    return [int(v) for v in gf_series(gf, n - 1)] if n > 0 else []


def _timing_line(timings: dict) -> str:
    return "timings: " + "  ".join(f"{k} {v:.3f}s" for k, v in timings.items())


# ---------------------------------------------------------------------------
# commands


def cmd_magic(args) -> int:
    spec = MagicSpec(args.n, args.variant)
    if args.n >= 4 and not args.allow_long:
        raise Refusal(f"n={args.n} is a long-running computation; pass --allow-long to run it")
    if args.checkpoint:
        return _magic_checkpointed(args, spec)
    if args.regions_only or args.max_regions is not None:
        raise Refusal("--regions-only and --max-regions need --checkpoint")

    report = run_magic(spec, args.split_depth, args.jobs, extra=3 if args.verify else 1)
    if args.verify:
        clock = time.perf_counter()
        verify_magic(report)
        report.timings["verify"] = time.perf_counter() - clock
    name = ("a" if spec.variant == AFFINE else "c") + str(spec.n)
    q = report.quasipolynomial
    record = {
        "command": "magic",
        "n": spec.n,
        "variant": spec.variant,
        "regions": report.regions,
        "hyperplanes": report.hyperplanes,
        "reduced_dim": report.reduced_dim,
        "modulus": report.modulus,
        "quasipolynomial": q.to_record(),
        "gf": report.gf.to_record(),
        "verified": bool(args.verify),
    }
    lines = [
        f"magic squares n={spec.n} variant={spec.variant}",
        f"regions: {report.regions}  hyperplanes: {report.hyperplanes}  "
        f"reduced dimension: {report.reduced_dim}  lattice modulus: {report.modulus}",
        f"{name}(t): period {q.normalized().period}, degree {q.degree}",
        *("  " + line for line in q.format_lines()),
        "generating function (t >= 1):",
        "  " + report.gf.format(),
    ]
    if args.series:
        values = _series(report.gf, args.series)
        record["series"] = values
        lines.append(_series_lines(name, values))
    if args.verify:
        lines.append("verification: passed")
    if args.timings:
        record["timings"] = report.timings
    lines.append(_timing_line(report.timings))
    _emit(args, record, lines)
    return EXIT_OK


def _magic_checkpointed(args, spec: MagicSpec) -> int:
    clock = time.perf_counter()
    try:
        summary = run_checkpointed(
            spec,
            args.checkpoint,
            batch=args.batch,
            max_regions=args.max_regions,
            regions_only=args.regions_only,
            worker_budget=args.jobs,
            extra=3 if args.verify else 1,
        )
    except CheckpointMismatch as exc:
        raise Refusal(str(exc)) from None
    elapsed = time.perf_counter() - clock
    record = {
        "command": "magic",
        "n": spec.n,
        "variant": spec.variant,
        "checkpoint": {
            "regions": summary.regions,
            "complete": summary.complete,
            "last_lineage": summary.last_lineage,
            "chain": summary.chain,
        },
    }
    lines = [
        f"magic squares n={spec.n} variant={spec.variant} (checkpoint {args.checkpoint})",
        f"regions: {summary.regions} (resumed after {summary.resumed_from})  "
        f"complete: {'yes' if summary.complete else 'no'}  last lineage: {summary.last_lineage}",
    ]
    q = summary.quasipolynomial
    if q is not None:
        label = "quasipolynomial" if summary.complete else "partial sum"
        record["checkpoint"]["partial_sum"] = q.to_record()
        lines.append(f"{label}:")
        lines.extend("  " + line for line in q.format_lines())
        if summary.complete:
            gf = summary.gf
            record["gf"] = gf.to_record()
            lines += ["generating function (t >= 1):", "  " + gf.format()]
            if args.series:
                values = _series(gf, args.series)
                record["series"] = values
                lines.append(_series_lines(("a" if spec.variant == AFFINE else "c") + str(spec.n), values))
    if args.timings:
        record["timings"] = {"total": elapsed}
    lines.append(_timing_line({"total": elapsed}))
    _emit(args, record, lines)
    return EXIT_OK


def cmd_ehrhart(args) -> int:
    p = parse_hrep(_read(args.hrep))
    if not is_feasible(p.closure()):
        raise EmptyPolyhedron("the polytope is infeasible")
    if not is_bounded(p):
        raise UnboundedPolyhedron("the polytope is unbounded")
    timings = {}
    clock = time.perf_counter()
    q = counting_quasipolynomial(p, extra=3 if args.verify else 1)
    timings["ehrhart"] = time.perf_counter() - clock
    closed = not any(s for _, _, s in p.inequalities)
    start = 0 if closed else 1
    if args.verify:
        clock = time.perf_counter()
        verify_quasipolynomial(q, lambda t: count_lattice_points(p, t))
        timings["verify"] = time.perf_counter() - clock
    gf = qp_to_gf(q, start=start)
    q = q.normalized()
    record = {
        "command": "ehrhart",
        "dim": p.dim,
        "closed": closed,
        "quasipolynomial": q.to_record(),
        "gf": gf.to_record(),
        "gf_start": start,
        "verified": bool(args.verify),
    }
    lines = [
        f"{'closed' if closed else 'strict'} polytope in dimension {p.dim}",
        f"L(t): period {q.period}, degree {q.degree}",
        *("  " + line for line in q.format_lines()),
        f"generating function (t >= {start}):",
        "  " + gf.format(),
    ]
    if args.series:
        values = _series(gf, args.series)
        record["series"] = values
        lines.append(_series_lines("L", values))
    if args.verify:
        lines.append("verification: passed")
    if args.timings:
        record["timings"] = timings
    lines.append(_timing_line(timings))
    _emit(args, record, lines)
    return EXIT_OK


def cmd_regions(args) -> int:
    p = parse_hrep(_read(args.hrep))
    hs = parse_hyperplanes(_read(args.hyperplanes), p.dim)
    p = p.interior()
    if not is_open_nonempty(p):
        raise EmptyPolyhedron("the open polytope has no interior points")
    iop = InsideOutPolytope.make(p, hs)
    clock = time.perf_counter()
    regions = enumerate_regions(iop, args.split_depth or 0, args.jobs)
    timings = {"regions": time.perf_counter() - clock}
    record = {
        "command": "regions",
        "dim": p.dim,
        "hyperplanes": len(iop.hyperplanes),
        "regions": len(regions),
    }
    lines = [f"regions: {len(regions)}  distinct hyperplanes: {len(iop.hyperplanes)}"]
    if args.show:
        record["region_list"] = [
            {"lineage": r.lineage, "hrep": format_hrep(r.polytope)} for r in regions
        ]
        for r in regions:
            lines.append(f"region {r.lineage or '(root)'}:")
            lines.extend("  " + line for line in format_hrep(r.polytope).splitlines())
    if args.timings:
        record["timings"] = timings
    lines.append(_timing_line(timings))
    _emit(args, record, lines)
    return EXIT_OK


def cmd_brute(args) -> int:
    spec = MagicSpec(args.n, args.variant)
    limit = oracle_limit(spec)
    if limit is None or args.t > limit:
        bound = "no documented bound" if limit is None else f"t <= {limit}"
        raise Refusal(f"brute force for n={spec.n} {spec.variant} is limited to {bound}")
    clock = time.perf_counter()
    count = brute_force_count(spec, args.t, args.jobs)
    elapsed = time.perf_counter() - clock
    record = {"command": "brute", "n": spec.n, "variant": spec.variant, "t": args.t, "count": count}
    if args.timings:
        record["timings"] = {"search": elapsed}
    _emit(args, record, [str(count), _timing_line({"search": elapsed})])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonnegative(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _side(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("side length must be at least 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="insideout",
        description="Exact lattice-point counting for inside-out polytopes and magic squares.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    common.add_argument("--timings", action="store_true", help="include timings in structured output")

    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("magic", parents=[common], help="count magic squares")
    m.add_argument("--n", type=_side, required=True)
    m.add_argument("--variant", choices=(AFFINE, CUBICAL), default=AFFINE)
    m.add_argument("--split-depth", type=_nonnegative, default=None)
    m.add_argument("--series", type=_nonnegative, default=0, metavar="N", help="print the first N series coefficients")
    m.add_argument("--verify", action="store_true")
    m.add_argument("--allow-long", action="store_true", help="permit n >= 4")
    m.add_argument("--checkpoint", metavar="PATH")
    m.add_argument("--batch", type=_positive, default=64, help="regions per checkpoint record")
    m.add_argument("--max-regions", type=_positive, default=None)
    m.add_argument("--regions-only", action="store_true", help="enumerate regions without counting")
    m.set_defaults(func=cmd_magic)

    e = sub.add_parser("ehrhart", parents=[common], help="Ehrhart quasipolynomial of an H-representation")
    e.add_argument("hrep")
    e.add_argument("--series", type=_nonnegative, default=0, metavar="N")
    e.add_argument("--verify", action="store_true")
    e.set_defaults(func=cmd_ehrhart)

    r = sub.add_parser("regions", parents=[common], help="regions of an inside-out polytope")
    r.add_argument("hrep")
    r.add_argument("hyperplanes")
    r.add_argument("--split-depth", type=_nonnegative, default=None)
    r.add_argument("--show", action="store_true", help="print every region with its lineage")
    r.set_defaults(func=cmd_regions)

    b = sub.add_parser("brute", parents=[common], help="backtracking magic-square count")
    b.add_argument("--n", type=_side, required=True)
    b.add_argument("--variant", choices=(AFFINE, CUBICAL), default=AFFINE)
    b.add_argument("--t", type=int, required=True)
    b.set_defaults(func=cmd_brute)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "split_depth", 0) is None and args.command == "regions":
        args.split_depth = 8 if args.jobs > 1 else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: ParseError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Refusal as exc:
        print(f"error: refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EmptyPolyhedron, UnboundedPolyhedron, NoLatticeCompatibleOrigin, DegenerateArrangement) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except VerificationFailure as exc:
        print(f"error: VerificationFailure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
