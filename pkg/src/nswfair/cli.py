"""``nswfair`` command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 resource budget exceeded,
3 reproduction or suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from nswfair.core import Allocation, Instance
from nswfair.errors import NswFairError, ResourceError
from nswfair.fairness import AuditReport, audit
from nswfair.instances import (
    GeneratorParams,
    SPEC_KINDS,
    VALUATION_CLASSES,
    allocation_to_json,
    dumps,
    gen_lemma4,
    gen_lemma5,
    gen_lemma6,
    gen_lemma7,
    gen_lemma8,
    gen_random,
    instance_to_json,
    lemma8_tie_break,
    load,
    load_alloc,
)
from nswfair.setsystem import classify
from nswfair.solvers import round_robin, solve_leximin, solve_max_nsw
from nswfair.suites import BOUND_TEXT, SUITE_NAMES, alpha_summary, reproduce, run_suite
from nswfair.valuations import format_rational, nsw, parse_rational, value

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_FAIL = 0, 1, 2, 3


def decimal_text(q: Fraction | float) -> str:
    """Display-only approximation with 10 significant digits."""
    if isinstance(q, float):
        return "inf"
    with localcontext() as ctx:
        ctx.prec = 10
        return format(Decimal(q.numerator) / Decimal(q.denominator), "g")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- gen ---------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    if args.lemma is not None:
        inst = {
            4: lambda: gen_lemma4(args.k, args.delta or "1/10"),
            5: gen_lemma5,
            6: gen_lemma6,
            7: lambda: gen_lemma7(args.delta or "1/10"),
            8: lambda: gen_lemma8(args.eta)[0],
        }[args.lemma]()
    else:
        for flag in ("seed", "n", "m"):
            if getattr(args, flag) is None:
                raise NswFairError(f"gen needs --{flag} (or --lemma)")
        lo, _, hi = args.value_range.partition(",")
        params = GeneratorParams(
            seed=args.seed,
            n=args.n,
            m=args.m,
            spec_kind=args.spec,
            valuation_class=args.vals,
            a=parse_rational(args.a) if args.a else None,
            value_range=(parse_rational(lo), parse_rational(hi)),
        )
        inst = gen_random(params)
    _emit(dumps(instance_to_json(inst)), args.out)
    return EXIT_OK


# --- solve -------------------------------------------------------------------


def _tie_break(inst: Instance, spec: str | None):
    if spec is None or spec == "by-index":
        return None
    if spec == "lemma8":
        eta = inst.m // 3
        if inst.n != 2 or inst.m != 3 * eta or eta < 2:
            raise NswFairError("--tie-break lemma8 needs two agents and 3*eta items")
        return lemma8_tie_break(eta)
    # otherwise a JSON file: one entry per agent, a list of labels or "by-index"
    try:
        raw = json.loads(Path(spec).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise NswFairError(f"--tie-break: {exc}") from exc
    index = inst.label_index()
    out = []
    for pos, entry in enumerate(raw if isinstance(raw, list) else []):
        if entry == "by-index":
            out.append(entry)
        elif isinstance(entry, list) and all(lbl in index for lbl in entry):
            out.append(tuple(index[lbl] for lbl in entry))
        else:
            raise NswFairError(f"--tie-break: entry {pos} must be \"by-index\" or a list of item labels")
    return out


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load(args.instance)
    if args.objective == "nsw":
        alloc, _ = solve_max_nsw(inst, budget=args.budget)
    elif args.objective == "leximin":
        alloc = solve_leximin(inst, budget=args.budget)
    else:
        alloc = round_robin(inst, _tie_break(inst, args.tie_break))
    text = dumps(allocation_to_json(inst, alloc))
    summary = _summary(inst, alloc, args.objective)
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


def _summary(inst: Instance, alloc: Allocation, objective: str) -> str:
    if inst.mode == "lex":
        sizes = ", ".join(str(len(b)) for b in alloc.bundles)
        return f"bundle sizes=[{sizes}]"
    if objective == "nsw":
        return f"nsw={format_rational(nsw(inst.profile, alloc))}"
    utils = ", ".join(format_rational(value(v, b)) for v, b in zip(inst.profile.agents, alloc.bundles))  # type: ignore[arg-type]
    return f"utilities=[{utils}]"


# --- audit -------------------------------------------------------------------


def audit_record(inst: Instance, report: AuditReport) -> dict[str, object]:
    alpha = report.alpha_ef1
    return {
        "alpha": None if alpha is None else format_rational(alpha),
        "alpha_decimal": None if alpha is None else decimal_text(alpha),
        "complete": report.complete,
        "ef": report.is_ef,
        "ef1": report.is_ef1,
        "nsw": None if report.nsw_value is None else format_rational(report.nsw_value),
        "po": report.is_po,
        "po_dominator": None if report.po_dominator is None else allocation_to_json(inst, report.po_dominator),
        "worst_pair": None if report.worst_pair is None else list(report.worst_pair),
    }


def _cell(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def cmd_audit(args: argparse.Namespace) -> int:
    inst = load(args.instance)
    alloc = load_alloc(inst, args.allocation)
    record = audit_record(inst, audit(inst, alloc, check_po=not args.no_po, budget=args.budget))
    if args.format == "json":
        sys.stdout.write(dumps(record))
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = sorted(record)
        writer.writerow(keys)
        writer.writerow([_cell(record[k]) for k in keys])
        sys.stdout.write(buf.getvalue())
    else:
        width = max(len(k) for k in record)
        for k in sorted(record):
            print(f"{k:<{width}}  {_cell(record[k]) or '-'}")
    return EXIT_OK


# --- classify ----------------------------------------------------------------


def cmd_classify(args: argparse.Namespace) -> int:
    inst = load(args.instance)
    print(classify(inst.constraint, p_bound=args.p_bound).describe())
    return EXIT_OK


# --- reproduce ---------------------------------------------------------------


def cmd_reproduce(args: argparse.Namespace) -> int:
    rep = reproduce(args.lemma, k=args.k, delta=args.delta, eta=args.eta)
    if rep.nsw is not None:
        print(f"nsw={format_rational(rep.nsw)} (expected {format_rational(rep.golden_nsw)})")  # type: ignore[arg-type]
    verdict = "PASS" if rep.passed else "FAIL"
    line = f"alpha={format_rational(rep.alpha)} {verdict}"
    if rep.passed and args.lemma == 4:
        line += " (> 1/2, → 1/2 as k grows)"
    elif rep.passed and args.lemma == 7:
        line += " (> 1/4, → 1/4 as delta shrinks)"
    elif not rep.passed:
        line += f" (expected {format_rational(rep.golden_alpha)})"
    print(line)
    return EXIT_OK if rep.passed else EXIT_FAIL


# --- report ------------------------------------------------------------------

REPORT_COLUMNS = (
    "seed", "n", "m", "spec_kind", "valuation_class",
    "alpha_num", "alpha_den", "po", "bound_num", "bound_den", "pass",
)


def _alpha_cells(alpha: Fraction | float | None) -> tuple[str, str]:
    if alpha is None:
        return "", ""
    if isinstance(alpha, float):
        return "inf", "1"
    return str(alpha.numerator), str(alpha.denominator)


def cmd_report(args: argparse.Namespace) -> int:
    rows = sorted(run_suite(args.suite, args.count, args.seed), key=lambda r: r.seed)
    table = []
    for r in rows:
        table.append([
            str(r.seed), str(r.n), str(r.m), r.spec_kind, r.valuation_class,
            *_alpha_cells(r.alpha), _cell(r.po),
            str(r.bound.numerator), str(r.bound.denominator), _cell(r.passed),
        ])
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(table)
        sys.stdout.write(buf.getvalue())
    else:
        print("| " + " | ".join(REPORT_COLUMNS) + " |")
        print("|" + "---|" * len(REPORT_COLUMNS))
        for row in table:
            print("| " + " | ".join(row) + " |")
    violations = sum(not r.passed for r in rows)
    low, mid = alpha_summary(rows)
    if low is not None:
        print(f"min alpha: {format_rational(low)} ({decimal_text(low)})")
        print(f"median alpha: {format_rational(mid)} ({decimal_text(mid)})")  # type: ignore[arg-type]
    status = f"violations: {violations}"
    if violations == 0:
        status += ", " + BOUND_TEXT[args.suite]
    print(status)
    return EXIT_OK if violations == 0 else EXIT_FAIL


# --- wiring ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nswfair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded random or worst-case instance")
    g.add_argument("--seed", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--spec", choices=SPEC_KINDS, default="partition")
    g.add_argument("--vals", choices=VALUATION_CLASSES, default="additive")
    g.add_argument("--a", help="high value for two_valued valuations, p/q")
    g.add_argument("--value-range", default="0,10", help="lo,hi as rationals")
    g.add_argument("--lemma", type=int, choices=(4, 5, 6, 7, 8))
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--delta")
    g.add_argument("--eta", type=int, default=2)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="compute an allocation")
    s.add_argument("instance")
    s.add_argument("--objective", choices=("nsw", "leximin", "rr"), default="nsw")
    s.add_argument("--tie-break", help='Round-Robin ties: "by-index", "lemma8" or a JSON file')
    s.add_argument("--budget", type=int, default=10**7)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("audit", help="audit an allocation")
    a.add_argument("instance")
    a.add_argument("allocation")
    a.add_argument("--format", choices=("json", "csv", "table"), default="table")
    a.add_argument("--no-po", action="store_true", help="skip the exhaustive Pareto check")
    a.add_argument("--budget", type=int, default=10**7)
    a.set_defaults(func=cmd_audit)

    c = sub.add_parser("classify", help="classify the constraint of an instance")
    c.add_argument("instance")
    c.add_argument("--p-bound", type=int, default=8)
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("reproduce", help="rebuild a worst-case instance and check its ratio")
    r.add_argument("lemma", type=int, choices=(4, 5, 6, 7, 8))
    r.add_argument("--k", type=int, default=2)
    r.add_argument("--delta")
    r.add_argument("--eta", type=int, default=2)
    r.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("report", help="run a seeded property suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NswFairError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
