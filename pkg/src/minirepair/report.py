"""Report formats: patch records, run summaries, and dump renderings.

Patch reports are JSON Lines, one record per adequate patch, with a stable
key order so identical runs produce byte-identical files.  ``validation_ms``
is a timing measurement and is the one field excluded from reproducibility
comparisons (see record_reproducibility_key).
"""

from __future__ import annotations

import json
from typing import Iterable

from minirepair.faultloc import SuspiciousStatement
from minirepair.minilang.printer import to_source
from minirepair.modpoints import ModificationPoint
from minirepair.namemodel import NameCooccurrenceTable
from minirepair.search import Patch, SearchConfig
from minirepair.templates import TemplatePool

RECORD_FIELDS = ("bug_id", "file", "line", "column", "original", "patched",
                 "kind", "template_origin", "attempt", "seed", "validation_ms")
TIMING_FIELDS = ("validation_ms",)


def patch_record(patch: Patch, bug_id: str) -> dict:
    return {
        "bug_id": bug_id,
        "file": patch.location.file_id,
        "line": patch.location.line,
        "column": patch.location.column,
        "original": patch.original_code,
        "patched": patch.patched_code,
        "kind": patch.kind,
        "template_origin": str(patch.template_origin),
        "attempt": patch.attempt,
        "seed": patch.seed,
        "validation_ms": round(patch.validation_ms, 3),
    }


def record_reproducibility_key(record: dict) -> dict:
    """The record minus timing fields: equal across identical runs."""
    return {k: v for k, v in record.items() if k not in TIMING_FIELDS}


def render_jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(record, sort_keys=False) + "\n"
                   for record in records)


def write_jsonl(path: str, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_jsonl(records))


def read_jsonl(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


# ---------------------------------------------------------------------------
# Summaries and per-bug statistics


def distinct_locations(records: list[dict]) -> int:
    return len({(r["file"], r["line"], r["column"]) for r in records})


def distinct_kinds(records: list[dict]) -> int:
    return len({r["kind"] for r in records})


def summary_dict(records: list[dict], result_stats: dict,
                 config_echo: dict) -> dict:
    """The run summary written next to the patch report.  Timing lives in
    its own section so reproducibility checks can drop it wholesale."""
    return {
        "patches": len(records),
        "distinct_locations": distinct_locations(records),
        "distinct_kinds": distinct_kinds(records),
        "attempts": result_stats.get("attempts", 0),
        "counters": {k: v for k, v in result_stats.items()
                     if k not in ("attempts", "elapsed_ms")},
        "config": config_echo,
        "timing": {"elapsed_ms": result_stats.get("elapsed_ms", 0.0)},
    }


def config_echo(bug_id: str, config: SearchConfig, trials: int) -> dict:
    return {
        "bug_id": bug_id,
        "seed": config.seed,
        "trials": trials,
        "max_time": config.max_time,
        "max_attempts": config.max_attempts,
        "max_mod_points": config.max_mod_points,
        "gamma": config.gamma,
        "scope": config.scope,
        "rho": config.rho,
        "lambda": config.lam,
        "dedup": config.dedup,
        "step_budget": config.step_budget,
    }


def stats_rows(records: list[dict]) -> list[tuple[str, int, int, int]]:
    """Per-bug (bug_id, patches, distinct locations, distinct kinds),
    sorted by bug id."""
    by_bug: dict[str, list[dict]] = {}
    for record in records:
        by_bug.setdefault(record["bug_id"], []).append(record)
    rows = []
    for bug_id in sorted(by_bug):
        group = by_bug[bug_id]
        rows.append((bug_id, len(group), distinct_locations(group),
                     distinct_kinds(group)))
    return rows


def render_stats_tsv(records: list[dict]) -> str:
    lines = ["bug_id\tpatches\tlocations\tkinds"]
    for bug_id, n, locations, kinds in stats_rows(records):
        lines.append(f"{bug_id}\t{n}\t{locations}\t{kinds}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Dump renderings


def template_records(pool: TemplatePool) -> list[dict]:
    records = []
    for template in pool.templates:
        records.append({
            "template": template.render(),
            "return_type": template.return_type.spelling(),
            "kind": template.target_kind,
            "placeholders": len(template.placeholders),
            "support": template.support,
            "origin": str(template.origin),
            "occurrences": [str(loc) for loc in template.occurrences],
        })
    return records


def modpoint_records(points: list[ModificationPoint]) -> list[dict]:
    records = []
    for mp in points:
        records.append({
            "mp_id": mp.mp_id,
            "location": str(mp.location),
            "code": to_source(mp.expr),
            "return_type": mp.return_type.spelling(),
            "kind": mp.target_kind,
            "parent_kind": mp.parent_kind,
            "weight": round(mp.weight, 6),
            "scope_vars": [f"{name}: {ty.spelling()}"
                           for name, ty in mp.scope_vars],
        })
    return records


def render_suspiciousness_tsv(ranked: list[SuspiciousStatement]) -> str:
    lines = ["rank\tfile\tline\tcolumn\tsuspiciousness\tnode_id"]
    for i, entry in enumerate(ranked, start=1):
        loc = entry.location
        lines.append(f"{i}\t{loc.file_id}\t{loc.line}\t{loc.column}\t"
                     f"{entry.suspiciousness:.6f}\t{entry.node_id}")
    return "\n".join(lines) + "\n"


def render_name_table(table: NameCooccurrenceTable, top: int = 5) -> str:
    """Per subset size, the most frequent name sets with their counts and
    probabilities."""
    lines = []
    for size in sorted(table.counts):
        denominator = table.denominators.get(size, 0)
        if denominator == 0:
            continue
        lines.append(f"subsets of size {size} "
                     f"(statements with >= {size} names: {denominator})")
        bucket = table.counts[size]
        entries = sorted(bucket.items(),
                         key=lambda kv: (-kv[1], tuple(sorted(kv[0]))))
        for names, count in entries[:top]:
            shown = ", ".join(sorted(names))
            lines.append(f"  {{{shown}}}  count={count}  "
                         f"p={count / denominator:.4f}")
    return "\n".join(lines) + "\n"
