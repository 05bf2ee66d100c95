"""Command-line driver: ``pfaffdegen <subcommand> FAMILY``.

FAMILY is a path to a family JSON file or the name of a shipped family
(x5, x7, x10, x13, x25).  Exit status: 0 all checks pass, 1 a check
failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .familyfile import SHIPPED, FamilyFileError, load_family, shipped_data_dir
from .operators import DEFAULT_HOLDOUT, DEFAULT_MAX_DEGREE, DEFAULT_MAX_ORDER
from .report import (
    Checker,
    NoFamiliesError,
    VerificationReport,
    Workbench,
    check_degenerate,
    check_hilbert_basis,
    check_operator,
    check_partition,
    check_period,
    check_polytope,
    jsonable,
    run_verify_all,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def resolve_family(arg: str):
    p = Path(arg)
    if p.suffix == ".json" or p.exists():
        return load_family(p)
    if arg.lower() in SHIPPED:
        return load_family(shipped_data_dir() / f"{arg.lower()}.json")
    raise UsageError(f"no family file {arg!r} (shipped families: {', '.join(SHIPPED)})")


def _emit(report: VerificationReport, args, extra: dict | None = None) -> int:
    print(report.render())
    if args.out:
        doc = report.to_json()
        if extra:
            doc.update(jsonable(extra))
        Path(args.out).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_polytope(args) -> int:
    w = Workbench(resolve_family(args.family))
    if w.f.rays is None and not w.f.derived:
        raise UsageError(f"{w.f.name}: family file has no rays")
    ck = Checker(w.f.name)
    check_polytope(w, ck)
    return _emit(ck.report, args)


def cmd_degenerate(args) -> int:
    w = Workbench(resolve_family(args.family))
    ck = Checker(w.f.name)
    check_degenerate(w, ck)
    for c in ck.report.checks:
        if c.name.endswith("binomials") and "blocks" in c.witness:
            for i, b in enumerate(c.witness["blocks"], start=1):
                print(f"block {i}: " + "; ".join(b["binomials"]))
    return _emit(ck.report, args)


def cmd_hilbert_basis(args) -> int:
    w = Workbench(resolve_family(args.family))
    ck = Checker(w.f.name)
    check_hilbert_basis(w, ck)
    for g in w.hilbert.generators:
        print("(" + ", ".join(map(str, g)) + ")")
    return _emit(ck.report, args)


def cmd_period(args) -> int:
    w = Workbench(resolve_family(args.family))
    if w.f.rays is None and not w.f.derived:
        raise UsageError(f"{w.f.name}: family file has no rays")
    if args.terms is not None and args.terms < 0:
        raise UsageError("--terms must be nonnegative")
    ck = Checker(w.f.name)
    check_partition(w, ck)
    series = check_period(w, ck, args.terms)
    for s, a in enumerate(series):
        print(f"a_{s} = {a}")
    return _emit(ck.report, args, {"coefficients": series})


def cmd_pf_operator(args) -> int:
    w = Workbench(resolve_family(args.family))
    ck = Checker(w.f.name)
    op = check_operator(w, ck, args.max_order, args.max_degree, args.holdout)
    if op is not None:
        print(op.render())
    return _emit(ck.report, args, {"operator": op.to_json()} if op is not None else None)


def cmd_verify_all(args) -> int:
    directory = args.directory or shipped_data_dir()
    if not Path(directory).is_dir():
        raise UsageError(f"{directory} is not a directory")
    report = run_verify_all(
        directory,
        budget=args.dilation_budget,
        terms=args.terms,
        max_order=args.max_order,
        max_degree=args.max_degree,
        holdout=args.holdout,
    )
    return _emit(report, args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfaffdegen", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def family_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("family", help="family JSON file or shipped family name")
        sp.add_argument("--out", metavar="PATH", help="write the JSON report to PATH")
        sp.set_defaults(fn=fn)
        return sp

    def operator_flags(sp):
        sp.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER, help="largest operator order tried (default %(default)s)")
        sp.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, help="largest t-degree tried (default %(default)s)")
        sp.add_argument("--holdout", type=int, default=DEFAULT_HOLDOUT, help="coefficients held out for verification (default %(default)s)")

    family_cmd("check-polytope", cmd_check_polytope, "reflexivity, terminality, class group, Picard rank, singular strata")
    family_cmd("degenerate", cmd_degenerate, "degenerate binomials, their lattice and the reconstructed polytope")
    family_cmd("hilbert-basis", cmd_hilbert_basis, "Hilbert basis of the relation cone")
    sp = family_cmd("period", cmd_period, "period coefficients with the closed-form comparison")
    sp.add_argument("--terms", type=int, default=None, help="highest coefficient index (default 10, 20 for X25)")
    sp = family_cmd("pf-operator", cmd_pf_operator, "minimal annihilating operator of the period")
    operator_flags(sp)

    sp = sub.add_parser("verify-all", help="every check on every family file in a directory")
    sp.add_argument("directory", nargs="?", help="directory of family files (default: shipped data)")
    sp.add_argument("--terms", type=int, default=None, help="closed-form comparison range (default 10, 20 for X25)")
    sp.add_argument("--dilation-budget", type=int, default=1, help="largest dilation in the Ehrhart check (default %(default)s)")
    sp.add_argument("--out", metavar="PATH", help="write the JSON report to PATH")
    operator_flags(sp)
    sp.set_defaults(fn=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.fn(args)
    except NoFamiliesError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FamilyFileError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
