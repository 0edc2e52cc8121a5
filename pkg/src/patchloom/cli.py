"""Command-line interface.

Subcommands:

  index build   build a k-gram index over a corpus directory
  search        query an index with a method from a source file
  repair        run the full repair pipeline over suspicious sites
  audit-fi      check whether a fix ingredient exists locally/globally
  jcheck        compiler-style diagnostics for a program directory
  jrun          run a program directory's main class

Exit codes: 0 when a plausible patch was found (repair) or the ingredient
was found (audit-fi); 2 when the search came up empty; 1 on errors.
jcheck exits 0/1 (clean/diagnosed) and jrun propagates the program's own
exit code.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import enclosing_statement, method_at, parse_source
from .driver import RepairConfig, audit_fix_ingredient, repair
from .index import build_index, global_search, load_index, save_index
from .minijava import check_program, run_program
from .report import write_audit_report, write_report
from .tokens import make_fix_ingredient

FOUND, ERROR, NOT_FOUND = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patchloom",
        description="search-based program repair from syntactically similar code",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    index_cmd = sub.add_parser("index", help="corpus index operations")
    index_sub = index_cmd.add_subparsers(dest="index_command", required=True)
    build = index_sub.add_parser("build", help="index a corpus directory")
    build.add_argument("--corpus", required=True, help="corpus root directory")
    build.add_argument("--out", required=True, help="index file to write")
    build.add_argument("--k", type=int, default=3, help="k-gram size")

    search = sub.add_parser("search", help="query an index with a method")
    search.add_argument("--index", required=True, help="index file")
    search.add_argument("--file", required=True, help="source file holding the query")
    search.add_argument("--line", type=int, required=True,
                        help="1-based line inside the query method")
    search.add_argument("--top", type=int, default=10, help="hits to print")

    rep = sub.add_parser("repair", help="repair a program")
    rep.add_argument("--program", required=True, help="faulty program root")
    rep.add_argument("--index", required=True, help="corpus index file")
    rep.add_argument("--local", required=True, help="local search root")
    rep.add_argument("--sites", required=True,
                     help="suspicious sites file (path:line score)")
    rep.add_argument("--build-cmd", required=True, help="build shell command")
    rep.add_argument("--test-cmd", required=True, help="test shell command")
    rep.add_argument("--top", type=int, default=200, help="candidate cap")
    rep.add_argument("--budget-min", type=float, default=120.0,
                     help="wall-clock budget in minutes")
    rep.add_argument("--out-dir", default="patchloom-out",
                     help="report directory")
    rep.add_argument("--keep-work", action="store_true",
                     help="keep per-patch working copies")
    rep.add_argument("--jobs", type=int, default=1,
                     help="parallel validation jobs")

    audit = sub.add_parser("audit-fi", help="audit a fix ingredient")
    audit.add_argument("--snippet", required=True,
                       help="ingredient expression or statement")
    audit.add_argument("--class", dest="mclass", required=True,
                       choices=[f"M{i}" for i in range(6)],
                       help="modification class")
    audit.add_argument("--local", required=True, help="local program root")
    audit.add_argument("--index", required=True, help="corpus index file")
    audit.add_argument("--top", type=int, default=500,
                       help="global statements to check")
    audit.add_argument("--out-dir", default=None,
                       help="also write an audit report here")

    jcheck = sub.add_parser("jcheck", help="diagnose a program directory")
    jcheck.add_argument("root", help="program root directory")

    jrun = sub.add_parser("jrun", help="run a program directory")
    jrun.add_argument("--main", required=True, help="class with main")
    jrun.add_argument("root", help="program root directory")
    jrun.add_argument("args", nargs="*", help="program arguments")

    return parser


def _cmd_index_build(args: argparse.Namespace) -> int:
    index = build_index(args.corpus, k=args.k)
    save_index(index, args.out)
    print(f"indexed {len(index.methods)} methods from {args.corpus} "
          f"(k={index.k}) -> {args.out}")
    return FOUND


def _cmd_search(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    unit = parse_source(args.file)
    stmt = enclosing_statement(unit, args.line)
    method = stmt.method if stmt is not None else None
    if method is None:
        offset = sum(len(l) + 1 for l in unit.text.splitlines()[: args.line - 1])
        method = method_at(unit, offset)
    if method is None:
        print(f"no method at {args.file}:{args.line}", file=sys.stderr)
        return ERROR
    hits = global_search(index, method, top_n=args.top)
    for hit in hits:
        print(f"{hit.rank}\t{hit.raw_score:.6f}\t{hit.path}\t{hit.start}"
              f"\t{hit.signature}")
    return FOUND if hits else NOT_FOUND


def _cmd_repair(args: argparse.Namespace) -> int:
    config = RepairConfig(
        program_root=args.program,
        index_path=args.index,
        sites_file=args.sites,
        build_cmd=args.build_cmd,
        test_cmd=args.test_cmd,
        local_root=args.local,
        top=args.top,
        budget_minutes=args.budget_min,
        out_dir=args.out_dir,
        keep_work=args.keep_work,
        jobs=args.jobs,
    )
    report = repair(config)
    report_path = write_report(report, args.out_dir)
    for message in report.warnings:
        print(f"warning: {message}", file=sys.stderr)
    for index, site in enumerate(report.sites, start=1):
        print(f"site {index}: {site.site.path}:{site.site.line} "
              f"status={site.status} candidates={site.candidates_examined} "
              f"patches={site.patches_generated} "
              f"validated={site.patches_validated}")
    if report.plausible is not None:
        patch = report.plausible.patch
        print(f"plausible patch: {patch.kind} {patch.file} "
              f"span={patch.span[0]}..{patch.span[1]} "
              f"candidate={patch.candidate_id}")
        print(f"report: {report_path}")
        return FOUND
    print("no plausible patch found")
    print(f"report: {report_path}")
    return NOT_FOUND


def _cmd_audit_fi(args: argparse.Namespace) -> int:
    fi = make_fix_ingredient(args.snippet, args.mclass)
    index = load_index(args.index)
    result = audit_fix_ingredient(fi, args.local, index, top_n=args.top)
    categories = result.categories()
    print(f"ingredient: {fi.snippet}")
    print(f"class: {fi.mclass} ({fi.ficlass})")
    print(f"statements checked: local={result.local_statements} "
          f"global={result.global_statements}")
    flags = " ".join(f"{name}={'yes' if categories[name] else 'no'}"
                     for name in ("L-EM", "G-EM", "LG-EM", "L-PM", "G-PM", "LG-PM"))
    print(flags)
    for kind, matches in (("exact", result.exact), ("param", result.parameterized)):
        for match in matches:
            text = " ".join(match.text.split())
            if len(text) > 72:
                text = text[:69] + "..."
            print(f"{kind}\t{match.source}\t{match.path}:{match.start}\t{text}")
    if args.out_dir:
        print(f"report: {write_audit_report(result, args.out_dir)}")
    return FOUND if result.found() else NOT_FOUND


def _cmd_jcheck(args: argparse.Namespace) -> int:
    diagnostics = check_program(args.root)
    for diag in diagnostics:
        print(diag)
    return 1 if diagnostics else 0


def _cmd_jrun(args: argparse.Namespace) -> int:
    return run_program(args.root, args.main, args.args)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "index": _cmd_index_build,
        "search": _cmd_search,
        "repair": _cmd_repair,
        "audit-fi": _cmd_audit_fi,
        "jcheck": _cmd_jcheck,
        "jrun": _cmd_jrun,
    }
    try:
        return handlers[args.command](args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
