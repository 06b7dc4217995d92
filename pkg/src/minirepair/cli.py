"""Command line interface.

``minirepair repair`` searches a project for patches and writes a JSON
Lines report, a summary, dumps, and figures into the output directory.
``minirepair stats`` aggregates one or more patch reports into per-bug
statistics.  ``minirepair dump`` renders mined templates, the name model,
modification points, or suspiciousness rankings without running a search.

Exit codes for repair: 0 when at least one patch was found, 2 when the
search completed without finding any, 1 for input errors (unreadable
project, syntax or type errors, no failing test).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

from minirepair import report as report_mod
from minirepair.faultloc import EmptySuspiciousSet, NoFailingTests
from minirepair.minilang.interp import collect_tests
from minirepair.minilang.parser import ParseFailure
from minirepair.minilang.program import Program, load_project
from minirepair.minilang.typecheck import TypeCheckFailure, typecheck
from minirepair.namemodel import NameModelCache
from minirepair.search import SearchConfig, prepare, run_repair
from minirepair.templates import SCOPE_FILTERS, build_pool

logger = logging.getLogger(__name__)

EXIT_PATCHED = 0
EXIT_ERROR = 1
EXIT_NO_PATCH = 2


class CliError(Exception):
    """Input problem already explained to the user; exits with code 1."""


def add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-time", type=float, default=60.0,
                        help="wall-clock budget per trial, seconds (default 60)")
    parser.add_argument("--max-attempts", type=int, default=10_000,
                        help="candidate attempts per trial (default 10000)")
    parser.add_argument("--max-mod-points", type=int, default=1000,
                        help="cap on suspicious statements considered (default 1000)")
    parser.add_argument("--gamma", type=float, default=0.1,
                        help="strict suspiciousness threshold (default 0.1)")
    parser.add_argument("--scope", choices=SCOPE_FILTERS, default="package",
                        help="template visibility filter (default package)")
    parser.add_argument("--rho", type=int, default=1000,
                        help="instances kept per template after ranking "
                             "(default 1000)")
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5,
                        help="global vs near-the-fix name table mix (default 0.5)")
    parser.add_argument("--step-budget", type=int, default=1_000_000,
                        help="interpreter steps per test run (default 1000000)")


def add_dump_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dump-templates", action="store_true",
                        help="write templates.jsonl (mined template pool)")
    parser.add_argument("--dump-name-model", action="store_true",
                        help="write name_model.txt (co-occurrence tables)")
    parser.add_argument("--dump-modpoints", action="store_true",
                        help="write modpoints.jsonl (modification points)")
    parser.add_argument("--dump-suspiciousness", action="store_true",
                        help="write suspiciousness.tsv (ranked statements)")


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minirepair",
        description="Test-driven program repair for Mini projects")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log search progress")
    commands = parser.add_subparsers(dest="command", required=True)

    repair = commands.add_parser("repair", help="search a project for patches")
    repair.add_argument("--project", required=True,
                        help="project root directory (.mini files)")
    repair.add_argument("--out", default="out",
                        help="output directory (default ./out)")
    repair.add_argument("--seed", type=int, default=0,
                        help="base RNG seed (default 0)")
    repair.add_argument("--trials", type=int, default=1,
                        help="independent searches with seeds seed..seed+N-1")
    repair.add_argument("--max-patches", type=int, default=None,
                        help="stop a trial after this many patches")
    repair.add_argument("--dedup", action=argparse.BooleanOptionalAction,
                        default=True,
                        help="drop duplicate patches (same location and code)")
    repair.add_argument("--figures", action=argparse.BooleanOptionalAction,
                        default=True,
                        help="render figures next to the reports")
    repair.add_argument("--bug-id", default=None,
                        help="identifier for report records "
                             "(default: project directory name)")
    add_search_flags(repair)
    add_dump_flags(repair)

    stats = commands.add_parser("stats",
                                help="aggregate patch reports into per-bug stats")
    stats.add_argument("reports", nargs="+", help="patch report .jsonl files")
    stats.add_argument("--out", default=None,
                       help="directory for stats.tsv and stats.png "
                            "(default: print TSV only)")
    stats.add_argument("--figures", action=argparse.BooleanOptionalAction,
                       default=True, help="render stats.png when --out is set")

    dump = commands.add_parser("dump",
                               help="render engine state without searching")
    dump.add_argument("--project", required=True)
    dump.add_argument("--out", default="out")
    add_search_flags(dump)
    add_dump_flags(dump)
    return parser


# ---------------------------------------------------------------------------
# Shared helpers


def load_checked_project(root: str) -> Program:
    try:
        program = load_project(root)
    except FileNotFoundError as error:
        raise CliError(str(error))
    except ValueError as error:
        raise CliError(str(error))
    except ParseFailure as failure:
        lines = [str(e) for e in failure.errors]
        raise CliError("syntax errors:\n  " + "\n  ".join(lines))
    try:
        typecheck(program)
    except TypeCheckFailure as failure:
        lines = [str(e) for e in failure.errors]
        raise CliError("type errors:\n  " + "\n  ".join(lines))
    return program


def search_config(args: argparse.Namespace, seed: int) -> SearchConfig:
    return SearchConfig(
        max_time=args.max_time,
        max_attempts=args.max_attempts,
        gamma=args.gamma,
        max_mod_points=args.max_mod_points,
        scope=args.scope,
        rho=args.rho,
        lam=args.lam,
        seed=seed,
        dedup=getattr(args, "dedup", True),
        step_budget=args.step_budget,
        max_patches=getattr(args, "max_patches", None),
    )


def write_dumps(args: argparse.Namespace, program: Program, out_dir: str,
                ranked, points) -> None:
    if args.dump_templates:
        pool = build_pool(program)
        path = os.path.join(out_dir, "templates.jsonl")
        report_mod.write_jsonl(path, report_mod.template_records(pool))
        print(f"wrote {path}")
    if args.dump_name_model:
        cache = NameModelCache(program, args.lam)
        path = os.path.join(out_dir, "name_model.txt")
        sections = ["program-wide name co-occurrence",
                    report_mod.render_name_table(cache.global_table)]
        for module in program.modules:
            sections.append(f"file cache: {module.file_id}")
            sections.append(report_mod.render_name_table(
                cache.cache_table(module.loc)))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(sections))
        print(f"wrote {path}")
    if args.dump_modpoints:
        if points is None:
            raise CliError("modification points need a failing test "
                           "(run under 'repair' or fix the suite)")
        path = os.path.join(out_dir, "modpoints.jsonl")
        report_mod.write_jsonl(path, report_mod.modpoint_records(points))
        print(f"wrote {path}")
    if args.dump_suspiciousness:
        if ranked is None:
            raise CliError("suspiciousness needs a failing test")
        path = os.path.join(out_dir, "suspiciousness.tsv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report_mod.render_suspiciousness_tsv(ranked))
        print(f"wrote {path}")


def wants_dumps(args: argparse.Namespace) -> bool:
    return (args.dump_templates or args.dump_name_model
            or args.dump_modpoints or args.dump_suspiciousness)


# ---------------------------------------------------------------------------
# Commands


def cmd_repair(args: argparse.Namespace) -> int:
    program = load_checked_project(args.project)
    tests = collect_tests(program)
    if not tests:
        raise CliError(f"no test functions in {args.project!r}")
    bug_id = args.bug_id or os.path.basename(os.path.normpath(args.project))
    os.makedirs(args.out, exist_ok=True)

    merged: list[dict] = []
    seen: set[tuple] = set()
    total_attempts = 0
    total_elapsed = 0.0
    counters: dict[str, int] = {}
    first_result = None
    for k in range(args.trials):
        config = search_config(args, args.seed + k)
        try:
            result = run_repair(program, tests, config)
        except NoFailingTests:
            raise CliError("all tests pass; nothing to repair")
        except EmptySuspiciousSet:
            raise CliError("no statement exceeded the suspiciousness "
                           f"threshold gamma={args.gamma}")
        if first_result is None:
            first_result = result
        records = [report_mod.patch_record(p, bug_id) for p in result.patches]
        if args.trials > 1:
            trial_path = os.path.join(args.out, f"patches_trial{k}.jsonl")
            report_mod.write_jsonl(trial_path, records)
        for record in records:
            key = (record["file"], record["line"], record["column"],
                   record["patched"])
            if args.dedup and key in seen:
                continue
            seen.add(key)
            merged.append(record)
        total_attempts += result.stats.attempts
        total_elapsed += result.stats.elapsed_ms
        for name, value in dataclasses.asdict(result.stats).items():
            if name not in ("attempts", "elapsed_ms"):
                counters[name] = counters.get(name, 0) + value
        logger.info("trial %d (seed %d): %d patches in %d attempts",
                    k, config.seed, len(result.patches), result.stats.attempts)

    patches_path = os.path.join(args.out, "patches.jsonl")
    report_mod.write_jsonl(patches_path, merged)
    stats = {"attempts": total_attempts, "elapsed_ms": round(total_elapsed, 3),
             **counters}
    summary = report_mod.summary_dict(
        merged, stats, report_mod.config_echo(bug_id, search_config(args, args.seed),
                                              args.trials))
    summary_path = os.path.join(args.out, "summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")

    if wants_dumps(args):
        write_dumps(args, program, args.out, first_result.suspicious,
                    first_result.mod_points)
    if args.figures:
        from minirepair import figures

        figures.save_suspiciousness_figure(
            first_result.suspicious,
            os.path.join(args.out, "suspiciousness.png"))
        if merged:
            figures.save_patch_figure(
                merged, os.path.join(args.out, "patches.png"))

    print(f"{len(merged)} patch(es), {total_attempts} attempts, "
          f"{total_elapsed / 1000.0:.1f}s")
    print(f"wrote {patches_path}")
    for record in merged:
        print(f"  {record['file']}:{record['line']}:{record['column']}  "
              f"{record['original']} -> {record['patched']}")
    return EXIT_PATCHED if merged else EXIT_NO_PATCH


def cmd_stats(args: argparse.Namespace) -> int:
    records = []
    for path in args.reports:
        if not os.path.exists(path):
            raise CliError(f"no such report: {path}")
        records.extend(report_mod.read_jsonl(path))
    tsv = report_mod.render_stats_tsv(records)
    sys.stdout.write(tsv)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        tsv_path = os.path.join(args.out, "stats.tsv")
        with open(tsv_path, "w", encoding="utf-8") as fh:
            fh.write(tsv)
        print(f"wrote {tsv_path}")
        if args.figures and records:
            from minirepair import figures

            figure_path = figures.save_stats_figure(
                report_mod.stats_rows(records),
                os.path.join(args.out, "stats.png"))
            print(f"wrote {figure_path}")
    return 0


def cmd_dump(args: argparse.Namespace) -> int:
    if not wants_dumps(args):
        raise CliError("nothing to dump: pass at least one --dump-* flag")
    program = load_checked_project(args.project)
    os.makedirs(args.out, exist_ok=True)
    ranked = None
    points = None
    if args.dump_modpoints or args.dump_suspiciousness:
        tests = collect_tests(program)
        try:
            config = SearchConfig(gamma=args.gamma,
                                  max_mod_points=args.max_mod_points,
                                  step_budget=args.step_budget)
            _, _, ranked, points = prepare(program, tests, config)
        except NoFailingTests:
            ranked = None
            points = None
        except EmptySuspiciousSet:
            ranked = []
            points = []
    write_dumps(args, program, args.out, ranked, points)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "repair":
            return cmd_repair(args)
        if args.command == "stats":
            return cmd_stats(args)
        if args.command == "dump":
            return cmd_dump(args)
        raise AssertionError(args.command)
    except CliError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
