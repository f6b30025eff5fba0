"""Command-line front end: verification suites, derivations and reports.

Exit codes: 0 all checks pass, 1 at least one failure, 2 usage or fixture
errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .report import FAIL, Report
from .sampling import SampleConfig

VERIFY_GROUPS = {
    "all": ["pde", "lax", "wdvv", "algebra", "reductions", "tables", "numeric"],
    "pde": ["pde"],
    "lax": ["lax"],
    "wdvv": ["wdvv"],
    "algebra": ["algebra"],
    "reductions": ["reductions"],
    "tables": ["tables"],
    "numeric": ["numeric"],
}


def _common_flags() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    c.add_argument("--fixtures", help="fixtures directory (default: bundled set)")
    c.add_argument("--seed", type=int, help="sampling seed")
    c.add_argument("--digits", type=int, help="working precision in digits")
    c.add_argument("--jobs", type=int, help="parallel workers for suites")
    c.add_argument("--filter", dest="filter_substr",
                   help="only run/report checks whose id contains this")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    p = argparse.ArgumentParser(
        prog="wdvvsym",
        description=(
            "Exact symbolic verification of the Lie symmetry analysis of the "
            "WDVV associativity PDEs, with high-precision numeric cross-checks."
        ),
    )
    p.add_argument("--fixtures", default=None, help="fixtures directory (default: bundled set)")
    p.add_argument("--seed", type=int, default=20240801, help="sampling seed")
    p.add_argument("--digits", type=int, default=50, help="working precision in digits")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for suites")
    p.add_argument("--filter", dest="filter_substr", default=None,
                   help="only run/report checks whose id contains this")
    sub = p.add_subparsers(dest="command")

    v = sub.add_parser("verify", help="run verification suites", parents=[common])
    v.add_argument("suite", choices=sorted(VERIFY_GROUPS), help="suite group to run")
    v.add_argument("--json", dest="json_path", default=None, help="write the JSON report here")
    v.add_argument("--md", dest="md_path", default=None, help="write the Markdown report here")
    v.add_argument("--quiet", action="store_true", help="suppress per-check lines")

    d = sub.add_parser("derive", help="run a derivation", parents=[common])
    dsub = d.add_subparsers(dest="what", required=True)
    det = dsub.add_parser("determining", help="solve the determining equations", parents=[common])
    det.add_argument("--degree", type=int, default=3, help="polynomial ansatz degree")
    dsub.add_parser("f1-polys", help="derive the algebraic-root row's polynomials",
                    parents=[common])

    rep = sub.add_parser("report", help="run every suite and print a report", parents=[common])
    rep.add_argument("--format", choices=["json", "md"], default="json")
    return p


def _config(args) -> SampleConfig:
    return SampleConfig(seed=args.seed, digits=args.digits)


def _run(args, suites: list[str]) -> Report:
    from .suites import run_suites

    return run_suites(
        suites,
        fixtures=args.fixtures,
        cfg=_config(args),
        jobs=args.jobs,
        filter_substr=args.filter_substr,
    )


def cmd_verify(args) -> int:
    try:
        report = _run(args, VERIFY_GROUPS[args.suite])
    except Exception as exc:  # fixture/usage problems
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for rec in report.sorted_records():
        if not args.quiet or rec.status == FAIL:
            line = f"[{rec.status:>12}] {rec.id}"
            if rec.residual:
                line += f"  ({rec.residual})"
            print(line)
    c = report.counts()
    print(
        f"\n{c['pass']} pass, {c['fail']} fail, {c['inconclusive']} inconclusive, "
        f"{c['out-of-scope']} out-of-scope  [fixtures {report.fixtures_hash[:12]}]"
    )
    if args.json_path:
        Path(args.json_path).write_text(report.to_json(), encoding="utf-8")
        print(f"wrote {args.json_path}")
    if args.md_path:
        Path(args.md_path).write_text(report.to_markdown(), encoding="utf-8")
        print(f"wrote {args.md_path}")
    return 0 if report.ok else 1


def cmd_derive_determining(args) -> int:
    from .fixtures_io import fixtures_dir, load_generators
    from .kernel import render
    from .lie import same_span, solve_determining

    res = solve_determining(args.degree)
    print(f"degree {args.degree}: solution space dimension {res.dimension}")
    for i, v in enumerate(res.fields, 1):
        print(f"  w{i}: xi = {render(v.xi)}; eta = {render(v.eta)}; phi = {render(v.phi)}")
    try:
        basis = load_generators(fixtures_dir(args.fixtures))
        if res.dimension == len(basis):
            print("span equals the fixture basis:", same_span(res.fields, basis))
    except Exception as exc:
        print(f"(fixture comparison unavailable: {exc})", file=sys.stderr)
    return 0


def cmd_derive_f1(args) -> int:
    from .kernel import render
    from .solutions import derive_f1_polynomials

    d = derive_f1_polynomials()
    print("degree-4 link polynomial:")
    print("  ", render(d.p4))
    print("degree-8 partner polynomial:")
    print("  ", render(d.p8))
    return 0


def cmd_report(args) -> int:
    try:
        report = _run(args, VERIFY_GROUPS["all"])
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_markdown())
    return 0 if report.ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "derive":
        if args.what == "determining":
            return cmd_derive_determining(args)
        return cmd_derive_f1(args)
    if args.command == "report":
        return cmd_report(args)
    parser.print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
