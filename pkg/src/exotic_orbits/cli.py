"""Command-line entry point: verify, sample, classify."""

import argparse
import json
import sys
import traceback

from .algebra import AlgebraTag
from .bundle import DEFAULT_K
from .parity import QUATERNIONIC_NOTE, classify_range, parse_h_range
from .sampling import CloudSource, sample_orbit_space, write_cloud
from .suites import SUITES, SuiteConfig, Tolerances, run_suite
from .utils import (
    DomainError,
    UsageError,
    add_common_args,
    debug_enabled,
    default_seed,
    log,
)


def parse_k_list(text):
    """'-3,-1,1' -> (-3, -1, 1); every entry must be an odd integer."""
    try:
        ks = tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError as e:
        raise UsageError(f"--k must be a comma-separated list of integers: {e}") from e
    if not ks:
        raise UsageError("--k is empty")
    even = [k for k in ks if k % 2 == 0]
    if even:
        raise UsageError(f"k must be odd, got {', '.join(map(str, even))}")
    return ks


def _algebras(name):
    if str(name).strip().lower() == "all":
        return list(AlgebraTag)
    return [AlgebraTag.parse(name)]


def _seed(args):
    seed = args.seed if args.seed is not None else default_seed()
    if seed < 0:
        raise UsageError(f"seed must be non-negative, got {seed}")
    return seed


def summarize(reports, suite):
    """A single JSON document for one or more suite reports."""
    if len(reports) == 1:
        return reports[0].to_dict()
    checks = []
    for report in reports:
        for check in report.checks:
            checks.append(
                {
                    "suite": report.suite,
                    "algebra": report.config.tag.value,
                    **check.to_dict(),
                }
            )
    return {
        "suite": suite,
        "config": {"runs": [r.config.to_dict() for r in reports]},
        "checks": checks,
        "pass": all(r.passed for r in reports),
        "seed": reports[0].seed,
        "wall_time": round(sum(r.wall_time for r in reports), 3),
    }


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args, debug):
    seed = _seed(args)
    suites = SUITES if args.suite == "all" else (args.suite,)
    ks = parse_k_list(args.k) if args.k else DEFAULT_K
    tolerances = Tolerances() if args.tol is None else Tolerances.uniform(args.tol)
    reports = []
    for tag in _algebras(args.algebra):
        for suite in suites:
            config = SuiteConfig(
                suite,
                tag,
                ks,
                args.samples,
                seed,
                tolerances,
                shards=args.shards,
            )
            report = run_suite(config, workers=args.workers, debug=debug)
            status = "pass" if report.passed else "FAIL"
            log(
                f"{suite} [{tag.value}]: {status} "
                f"({len(report.checks)} checks, {report.wall_time:.1f}s)"
            )
            for check in report.failures():
                log(
                    f"  failed: {check.name} = {check.value:.3g} "
                    f"({check.expect} {check.tolerance:.3g})"
                )
            reports.append(report)

    doc = summarize(reports, args.suite)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if doc["pass"] else 1


def cmd_sample(args, debug):
    seed = _seed(args)
    source = CloudSource.parse(args.source)
    tag = AlgebraTag.parse(args.algebra)
    points = sample_orbit_space(source, args.n, seed, tag)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            write_cloud(points, f, args.format)
    else:
        write_cloud(points, sys.stdout, args.format)
    if debug:
        log(f"sampled {len(points)} points from {source} ({tag.value}, seed {seed})")
    return 0


def cmd_classify(args, debug):
    lo, hi = parse_h_range(args.h_range)
    rows = classify_range(lo, hi)
    if debug:
        log(f"classified h in {lo}..{hi}: {sum(r.odd_bp16 for r in rows)} odd")
    if args.format == "json":
        doc = {"rows": [r.to_dict() for r in rows], "note": QUATERNIONIC_NOTE}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        sys.stdout.write("h,k,odd_bP16\n")
        for r in rows:
            sys.stdout.write(f"{r.h},{r.k},{str(r.odd_bp16).lower()}\n")
    else:
        sys.stdout.write(f"{'h':>6} {'k':>6}  odd in bP16\n")
        for r in rows:
            sys.stdout.write(f"{r.h:>6} {r.k:>6}  {'yes' if r.odd_bp16 else 'no'}\n")
        sys.stdout.write(f"note: {QUATERNIONIC_NOTE}\n")
    return 0


# options whose values may start with a minus sign
VALUE_OPTIONS = ("--k", "--h-range")


def join_negative_values(argv):
    """Rewrite '--k -3,1' as '--k=-3,1'; argparse reads '-3,1' as a flag."""
    out = []
    it = iter(argv)
    for arg in it:
        if arg in VALUE_OPTIONS:
            value = next(it, None)
            if value and value.startswith("-") and not value.startswith("--"):
                out.append(f"{arg}={value}")
                continue
            out.append(arg)
            if value is not None:
                out.append(value)
            continue
        out.append(arg)
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="exotic-orbits",
        description="Milnor sphere orbit spaces: verification, sampling, parity",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    verify = add_common_args(
        sub.add_parser("verify", help="Run seeded verification suites")
    )
    verify.add_argument(
        "--suite",
        default="all",
        choices=SUITES + ("all",),
        help="Suite to run (default: all)",
    )
    verify.add_argument(
        "--algebra",
        default="all",
        help="quaternion, octonion or all (default: all)",
    )
    verify.add_argument(
        "--k",
        help="Comma-separated odd k values, e.g. --k -3,-1,1 (default: -3..7)",
    )
    verify.add_argument("--samples", type=int, help="Samples per suite")
    verify.add_argument("--seed", type=int, help="Seed (default: $EXOTIC_ORBITS_SEED)")
    verify.add_argument("--tol", type=float, help="Override every tolerance class")
    verify.add_argument(
        "--shards", type=int, default=1, help="Independent seed shards (default: 1)"
    )
    verify.add_argument(
        "--workers", type=int, default=1, help="Processes running shards (default: 1)"
    )
    verify.add_argument("--out", help="Write the JSON report here instead of stdout")
    verify.set_defaults(func=cmd_verify)

    sample = add_common_args(
        sub.add_parser("sample", help="Sample an orbit-space point cloud")
    )
    sample.add_argument("--source", required=True, help="round or exotic:<k>")
    sample.add_argument("--algebra", default="octonion", help="quaternion or octonion")
    sample.add_argument("--n", type=int, default=1000, help="Number of points")
    sample.add_argument("--seed", type=int, help="Seed (default: $EXOTIC_ORBITS_SEED)")
    sample.add_argument("--out", help="Output file (default: stdout)")
    sample.add_argument("--format", choices=("csv", "json"), default="csv")
    sample.set_defaults(func=cmd_sample)

    classify = add_common_args(
        sub.add_parser("classify", help="Which Sigma_k^15 are odd in bP16")
    )
    classify.add_argument(
        "--h-range",
        required=True,
        help="Inclusive range LO..HI, e.g. --h-range -3..4",
    )
    classify.add_argument("--format", choices=("text", "csv", "json"), default="text")
    classify.set_defaults(func=cmd_classify)
    return parser


def main(argv=None):
    """Entry point for exotic-orbits."""
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(join_negative_values(argv))
    debug = debug_enabled(args)
    try:
        code = args.func(args, debug)
    except UsageError as e:
        log(f"error: {e}")
        sys.exit(2)
    except DomainError as e:
        log(f"error: {e}")
        sys.exit(1)
    except OSError as e:
        log(f"error: {e}")
        sys.exit(1)
    # pylint: disable=broad-exception-caught
    except Exception as e:
        log(f"unexpected error: {e}")
        if debug:
            traceback.print_exc()
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()
