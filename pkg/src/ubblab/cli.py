"""Command-line front end: build family files, run verification suites, render reports.

Exit codes: 0 ok, 1 a check failed, 2 I/O or parse error, 3 invalid d,
4 inconclusive (or warn) without the matching --allow flag, or a long-running
suite requested without --long-running.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .certify import (
    CheckResult,
    Verdict,
    verify_biseparability,
    verify_counts,
    verify_distillability,
    verify_ges,
    verify_orthogonality,
    verify_strong_nonlocality,
    verify_unextendibility,
)
from .errors import LongRunningRequired
from .families import Role, build_ges_basis, build_ubb
from .linalg import RANK_TOL
from .report import VerificationReport, dump_family, render_human, render_machine

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_BAD_D, EXIT_UNDECIDED = 0, 1, 2, 3, 4

SUITES = ("orthogonality", "biseparability", "counts", "ges", "unextendibility", "nonlocality", "distillability")


def _check_d(d: int) -> bool:
    if d < 3:
        print(f"error: d >= 3 required, got {d}", file=sys.stderr)
        return False
    return True


def cmd_build(args) -> int:
    if not _check_d(args.d):
        return EXIT_BAD_D
    family = build_ubb(args.d) | build_ges_basis(args.d, args.g8)
    text = dump_family(family)
    try:
        with open(args.out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    counts = {r.value: len(family.select([r])) for r in Role}
    print(f"wrote {len(family)} states to {args.out}: " + ", ".join(f"{k}={v}" for k, v in counts.items() if v))
    return EXIT_OK


def run_suites(d: int, suites, tol_rank: float, tol_orth: float, seed: int, restarts: int,
               long_running: bool) -> list[CheckResult]:
    checks: list[CheckResult] = []
    if "counts" in suites:
        checks.append(verify_counts(d, tol_rank))
    if "orthogonality" in suites:
        ubb = build_ubb(d)
        checks.append(verify_orthogonality(ubb, tol_orth))
        ges = build_ges_basis(d, "literal" if d < 5 else "orthonormalized").select([Role.GES_BASIS])
        checks.append(verify_orthogonality(ubb | ges, tol_orth, name="orthogonality_with_complement"))
    if "biseparability" in suites:
        checks.append(verify_biseparability(build_ubb(d)))
    if "ges" in suites:
        checks.append(verify_ges(d, seed=seed))
    if "unextendibility" in suites:
        checks.append(verify_unextendibility(d, "both", restarts=restarts, seed=seed))
    if "nonlocality" in suites:
        checks.append(verify_strong_nonlocality(d, long_running=long_running, tau=tol_rank))
    if "distillability" in suites:
        checks.append(verify_distillability(d, "full_complement", tol_rank, seed))
        checks.append(verify_distillability(d, "psi_plus_seven", tol_rank, seed))
    return sorted(checks, key=lambda c: c.name)


def cmd_verify(args) -> int:
    if not _check_d(args.d):
        return EXIT_BAD_D
    suites = set(args.suite or ["all"])
    if "all" in suites:
        suites = set(SUITES)
    t0 = time.perf_counter()
    try:
        checks = run_suites(args.d, suites, args.tol_rank, args.tol_orth, args.seed, args.restarts,
                            args.long_running)
    except LongRunningRequired as exc:
        print(f"not run: {exc}. Re-run with --long-running.", file=sys.stderr)
        return EXIT_UNDECIDED
    config = {
        "suites": sorted(suites),
        "tol_rank": args.tol_rank,
        "tol_orth": args.tol_orth,
        "seed": args.seed,
        "restarts": args.restarts,
        "long_running": args.long_running,
        "allow_warn": args.allow_warn,
        "allow_inconclusive": args.allow_inconclusive,
    }
    report = VerificationReport(__version__, args.d, checks, config, time.perf_counter() - t0)
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(report.dumps())
        except OSError as exc:
            print(f"error: cannot write {args.report}: {exc}", file=sys.stderr)
            return EXIT_IO
    print(render_human(report), end="")
    overall = report.overall
    if overall is Verdict.FAIL:
        return EXIT_FAIL
    if overall is Verdict.INCONCLUSIVE and not args.allow_inconclusive:
        return EXIT_UNDECIDED
    if overall is Verdict.WARN and not args.allow_warn:
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.report) as fh:
            text = fh.read()
        report = VerificationReport.loads(text)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: cannot read report {args.report}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.format == "machine":
        sys.stdout.write(render_machine(report))
    else:
        sys.stdout.write(render_human(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ubblab", description="Build and verify four-qudit UBB families.")
    p.add_argument("--version", action="version", version=f"ubblab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write the UBB and complement-basis family file")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--g8", choices=("literal", "orthonormalized"), default="literal",
                   help="per-layer G8 states as written, or their Gram-Schmidt fallback")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--suite", action="append", choices=SUITES + ("all",))
    v.add_argument("--tol-rank", type=float, default=RANK_TOL)
    v.add_argument("--tol-orth", type=float, default=1e-12)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--restarts", type=int, default=200)
    v.add_argument("--long-running", action="store_true")
    v.add_argument("--allow-warn", action="store_true")
    v.add_argument("--allow-inconclusive", action="store_true")
    v.add_argument("--report", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="render a stored report")
    r.add_argument("--report", required=True)
    r.add_argument("--format", choices=("human", "machine"), default="human")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
