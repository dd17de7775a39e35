"""Command-line front end.

Subcommands drive the sieving plans, sweeps, and reports in batch mode:

    gaplab census  --limit 1e6 --kind primes --checkpoints 1e4,1e5,1e6
    gaplab abel    --limit 1e6 --checkpoints 1e4,1e5,1e6
    gaplab density --limit 1e6 --epsilon 0.1 --chain --checkpoints 1e4,1e6
    gaplab ledger  --limit 1e6 --kind squarefree
    gaplab dump    --limit 1e6 --kind primes --out terms.gapl

Exit codes: 0 success, 1 verification failure (an identity or bound did not
hold at tolerance), 2 usage error. Numeric flags accept scientific notation.
Identical flags produce byte-identical output; --threads only affects runtime.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import report_io, summation
from .census import census, census_series
from .density import density_series
from .errors import GaplabError
from .sequence import DEFAULT_SEGMENT_LEN, SequenceKind, plan_segments, write_term_dump

ABEL_RELATIVE_TOL = 1e-9

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


def _parse_count(text: str) -> int:
    """Integer flag value, allowing forms like 1000000, 1e6, 2**20."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def _parse_checkpoints(text: str) -> list[int]:
    return [_parse_count(part) for part in text.split(",") if part]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--limit", type=_parse_count, required=True,
                        help="inclusive upper bound of the sieved range")
    parser.add_argument("--kind", type=SequenceKind.parse, default=SequenceKind.PRIMES,
                        help="primes or squarefree (default: primes)")
    parser.add_argument("--segment-len", type=_parse_count, default=DEFAULT_SEGMENT_LEN,
                        help="segment width in bits, multiple of 64")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker count (default: GAPLAB_THREADS or all cores)")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaplab",
                                     description="prime and squarefree gap statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="gap census and ratio statistics")
    _add_common(p)
    p.add_argument("--checkpoints", type=_parse_checkpoints, default=None,
                   help="comma-separated x values for running statistics")

    p = sub.add_parser("abel", help="partial-summation identity checks")
    _add_common(p)
    p.add_argument("--checkpoints", type=_parse_checkpoints, default=None)
    p.add_argument("--x", type=_parse_count, default=None,
                   help="single evaluation point (appended to --checkpoints)")

    p = sub.add_parser("density", help="gap-threshold density reports")
    _add_common(p)
    p.add_argument("--checkpoints", type=_parse_checkpoints, default=None)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--scale-m", type=float, default=1.0,
                   help="threshold scale constant M (default 1)")
    p.add_argument("--chain", action="store_true",
                   help="also evaluate the violator inequality chain")

    p = sub.add_parser("ledger", help="scan the integer ledger against its bounds")
    _add_common(p)

    p = sub.add_parser("dump", help="write the raw term bitset")
    _add_common(p)

    return parser


def _cmd_census(args) -> int:
    plan = plan_segments(args.limit, args.segment_len, args.kind)
    cps = args.checkpoints or [plan.limit]
    if args.json and args.checkpoints is None:
        summary = census(plan, threads=args.threads)
        report_io.write_json(summary, args.out)
        return EXIT_OK
    rows = census_series(plan, cps, threads=args.threads)
    if args.json:
        report_io.write_json(rows, args.out)
    else:
        report_io.write_csv(rows, args.out)
    return EXIT_OK


def _cmd_abel(args) -> int:
    plan = plan_segments(args.limit, args.segment_len, args.kind)
    cps = list(args.checkpoints or [])
    if args.x is not None:
        cps.append(args.x)
    if not cps:
        cps = [plan.limit]
    cps = sorted(set(cps))
    checks = summation.abel_sweep(plan, cps, threads=args.threads)
    if args.json:
        report_io.write_json(checks, args.out)
    else:
        report_io.write_csv(checks, args.out)
    bad = [c for c in checks if c.abs_diff > ABEL_RELATIVE_TOL * (1.0 + abs(c.lhs))]
    for c in bad:
        print(f"identity violated at x={c.x}: |lhs-rhs| = {c.abs_diff:.3e}",
              file=sys.stderr)
    return EXIT_VERIFICATION if bad else EXIT_OK


def _cmd_density(args) -> int:
    plan = plan_segments(args.limit, args.segment_len, args.kind)
    cps = args.checkpoints or [plan.limit]
    rows = density_series(plan, args.epsilon, cps, scale=args.scale_m,
                                      with_chain=args.chain, threads=args.threads)
    if args.json:
        report_io.write_json([
            {"density": report, "chain": chain} for report, chain in rows], args.out)
    else:
        report_io.write_text(report_io.render_density_csv(rows), args.out)
    if args.chain:
        bad = [chain for _, chain in rows
               if chain.violator_recip_sum + 1e-9 < chain.boundary_term + chain.integral_term]
        for chain in bad:
            print(f"chain inequality violated at x={chain.x}", file=sys.stderr)
        if bad:
            return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_ledger(args) -> int:
    plan = plan_segments(args.limit, args.segment_len, args.kind)
    report = summation.ledger_bounds_check(plan, threads=args.threads)
    report_io.write_json(report, args.out)
    if report.violation_count or report.term_zero_failures:
        print(f"ledger bounds violated {report.violation_count} times "
              f"({report.term_zero_failures} nonzero at terms)", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_dump(args) -> int:
    if args.out == "-":
        raise GaplabError("dump requires a file path for --out")
    plan = plan_segments(args.limit, args.segment_len, args.kind)
    write_term_dump(plan, args.out, threads=args.threads)
    return EXIT_OK


_COMMANDS = {
    "census": _cmd_census,
    "abel": _cmd_abel,
    "density": _cmd_density,
    "ledger": _cmd_ledger,
    "dump": _cmd_dump,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except GaplabError as exc:
        print(f"gaplab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
