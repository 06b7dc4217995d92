"""End-to-end command line tests, driven through main(argv)."""

import json
import os

from minirepair import report
from minirepair.cli import EXIT_ERROR, EXIT_NO_PATCH, EXIT_PATCHED, main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

BUGGY = {
    "src/diff.mini": (
        "fun absDiff(a: Int, b: Int): Int {\n"
        "    if (a > b) {\n"
        "        return a - b;\n"
        "    }\n"
        "    return a - b;\n"
        "}\n"),
    "tests/test_diff.mini": (
        "fun test_hi() {\n    assert(absDiff(5, 2) == 3);\n}\n"
        "fun test_lo() {\n    assert(absDiff(2, 5) == 3);\n}\n"),
}

FIXED = {
    "src/diff.mini": (
        "fun absDiff(a: Int, b: Int): Int {\n"
        "    if (a > b) {\n"
        "        return a - b;\n"
        "    }\n"
        "    return b - a;\n"
        "}\n"),
    "tests/test_diff.mini": BUGGY["tests/test_diff.mini"],
}

# the only same-package template for the literal is the literal itself,
# so the search can never produce a non-identity candidate
UNFIXABLE = {
    "src/one.mini": "fun one(): Int {\n    return 1;\n}\n",
    "tests/test_one.mini": "fun test_one() {\n    assert(one() == 2);\n}\n",
}


def write_project(tmp_path, sources, name="proj"):
    root = tmp_path / name
    for rel, text in sources.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return str(root)


def repair_argv(root, out, *extra):
    return ["repair", "--project", root, "--out", out,
            "--max-attempts", "2000", "--seed", "1", *extra]


def is_png(path):
    with open(path, "rb") as fh:
        return fh.read(8) == PNG_MAGIC


# -- repair ------------------------------------------------------------------------


def test_repair_writes_report_summary_and_figures(tmp_path, capsys):
    root = write_project(tmp_path, BUGGY)
    out = str(tmp_path / "out")
    assert main(repair_argv(root, out)) == EXIT_PATCHED

    records = report.read_jsonl(os.path.join(out, "patches.jsonl"))
    assert records
    for record in records:
        assert tuple(record) == report.RECORD_FIELDS
        assert record["bug_id"] == "proj"
        assert record["seed"] == 1
    assert any(r["patched"] == "b - a" for r in records)

    with open(os.path.join(out, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["patches"] == len(records)
    assert summary["config"]["seed"] == 1
    assert summary["counters"]["type_errors"] == 0
    assert summary["timing"]["elapsed_ms"] > 0

    assert is_png(os.path.join(out, "suspiciousness.png"))
    assert is_png(os.path.join(out, "patches.png"))

    stdout = capsys.readouterr().out
    assert "patch(es)" in stdout
    assert "a - b -> b - a" in stdout


def test_repair_can_skip_figures(tmp_path):
    root = write_project(tmp_path, BUGGY)
    out = str(tmp_path / "out")
    assert main(repair_argv(root, out, "--no-figures")) == EXIT_PATCHED
    assert not os.path.exists(os.path.join(out, "suspiciousness.png"))
    assert not os.path.exists(os.path.join(out, "patches.png"))


def test_repair_bug_id_override(tmp_path):
    root = write_project(tmp_path, BUGGY)
    out = str(tmp_path / "out")
    assert main(repair_argv(root, out, "--bug-id", "diff-1",
                            "--max-patches", "1")) == EXIT_PATCHED
    records = report.read_jsonl(os.path.join(out, "patches.jsonl"))
    assert [r["bug_id"] for r in records] == ["diff-1"]


def test_repair_trials_write_per_trial_reports_and_merge(tmp_path):
    root = write_project(tmp_path, BUGGY)
    out = str(tmp_path / "out")
    assert main(repair_argv(root, out, "--trials", "2",
                            "--max-patches", "2")) == EXIT_PATCHED

    trial0 = report.read_jsonl(os.path.join(out, "patches_trial0.jsonl"))
    trial1 = report.read_jsonl(os.path.join(out, "patches_trial1.jsonl"))
    assert {r["seed"] for r in trial0} == {1}
    assert {r["seed"] for r in trial1} == {2}

    merged = report.read_jsonl(os.path.join(out, "patches.jsonl"))
    keys = [(r["file"], r["line"], r["column"], r["patched"]) for r in merged]
    assert len(keys) == len(set(keys))
    assert len(merged) <= len(trial0) + len(trial1)

    with open(os.path.join(out, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["config"]["trials"] == 2


def test_repair_is_reproducible_across_runs(tmp_path):
    root = write_project(tmp_path, BUGGY)

    def run(out):
        assert main(repair_argv(root, out)) == EXIT_PATCHED
        records = report.read_jsonl(os.path.join(out, "patches.jsonl"))
        return [report.record_reproducibility_key(r) for r in records]

    assert run(str(tmp_path / "out1")) == run(str(tmp_path / "out2"))


def test_repair_exit_2_when_no_patch_found(tmp_path, capsys):
    root = write_project(tmp_path, UNFIXABLE)
    out = str(tmp_path / "out")
    argv = ["repair", "--project", root, "--out", out,
            "--max-attempts", "200"]
    assert main(argv) == EXIT_NO_PATCH
    assert report.read_jsonl(os.path.join(out, "patches.jsonl")) == []
    # no patch distribution to draw, but the localization figure exists
    assert not os.path.exists(os.path.join(out, "patches.png"))
    assert is_png(os.path.join(out, "suspiciousness.png"))


def test_repair_errors_when_all_tests_pass(tmp_path, capsys):
    root = write_project(tmp_path, FIXED)
    assert main(repair_argv(root, str(tmp_path / "out"))) == EXIT_ERROR
    assert "all tests pass" in capsys.readouterr().err


def test_repair_errors_without_tests(tmp_path, capsys):
    root = write_project(tmp_path, {"src/diff.mini": BUGGY["src/diff.mini"]})
    assert main(repair_argv(root, str(tmp_path / "out"))) == EXIT_ERROR
    assert "no test functions" in capsys.readouterr().err


def test_repair_reports_syntax_errors(tmp_path, capsys):
    root = write_project(tmp_path, {"src/bad.mini": "fun f( {\n"})
    assert main(repair_argv(root, str(tmp_path / "out"))) == EXIT_ERROR
    assert "syntax errors" in capsys.readouterr().err


def test_repair_reports_type_errors(tmp_path, capsys):
    root = write_project(tmp_path, {
        "src/bad.mini": "fun f(): Int {\n    return true;\n}\n"})
    assert main(repair_argv(root, str(tmp_path / "out"))) == EXIT_ERROR
    assert "type errors" in capsys.readouterr().err


def test_repair_reports_missing_project(tmp_path, capsys):
    missing = str(tmp_path / "nowhere")
    assert main(repair_argv(missing, str(tmp_path / "out"))) == EXIT_ERROR
    assert "not a directory" in capsys.readouterr().err


# -- stats -------------------------------------------------------------------------


def stats_inputs(tmp_path):
    a = str(tmp_path / "a.jsonl")
    b = str(tmp_path / "b.jsonl")
    report.write_jsonl(a, [
        {"bug_id": "diff", "file": "src/d.mini", "line": 5, "column": 12,
         "kind": "BinaryOp|ReturnStmt"},
        {"bug_id": "diff", "file": "src/d.mini", "line": 5, "column": 12,
         "kind": "Call|ReturnStmt"},
    ])
    report.write_jsonl(b, [
        {"bug_id": "clamp", "file": "src/c.mini", "line": 2, "column": 5,
         "kind": "BinaryOp|ReturnStmt"},
    ])
    return a, b


def test_stats_prints_tsv_and_writes_outputs(tmp_path, capsys):
    a, b = stats_inputs(tmp_path)
    out = str(tmp_path / "statsout")
    assert main(["stats", a, b, "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "bug_id\tpatches\tlocations\tkinds" in stdout
    assert "clamp\t1\t1\t1" in stdout
    assert "diff\t2\t1\t2" in stdout
    with open(os.path.join(out, "stats.tsv")) as fh:
        assert fh.read().startswith("bug_id\t")
    assert is_png(os.path.join(out, "stats.png"))


def test_stats_without_out_only_prints(tmp_path, capsys):
    a, b = stats_inputs(tmp_path)
    assert main(["stats", a, b]) == 0
    assert "diff\t2" in capsys.readouterr().out


def test_stats_missing_report_errors(tmp_path, capsys):
    assert main(["stats", str(tmp_path / "gone.jsonl")]) == EXIT_ERROR
    assert "no such report" in capsys.readouterr().err


# -- dump --------------------------------------------------------------------------


def test_dump_writes_all_requested_renderings(tmp_path):
    root = write_project(tmp_path, BUGGY)
    out = str(tmp_path / "dump")
    argv = ["dump", "--project", root, "--out", out,
            "--dump-templates", "--dump-name-model",
            "--dump-modpoints", "--dump-suspiciousness"]
    assert main(argv) == 0

    templates = report.read_jsonl(os.path.join(out, "templates.jsonl"))
    assert any(t["template"] == "_Int_0 - _Int_1" for t in templates)

    points = report.read_jsonl(os.path.join(out, "modpoints.jsonl"))
    assert any(p["code"] == "a - b" for p in points)

    with open(os.path.join(out, "suspiciousness.tsv")) as fh:
        assert fh.readline().startswith("rank\t")

    with open(os.path.join(out, "name_model.txt")) as fh:
        text = fh.read()
    assert "program-wide name co-occurrence" in text
    assert "file cache: src/diff.mini" in text


def test_dump_requires_a_flag(tmp_path, capsys):
    root = write_project(tmp_path, BUGGY)
    assert main(["dump", "--project", root]) == EXIT_ERROR
    assert "nothing to dump" in capsys.readouterr().err


def test_dump_localization_needs_a_failing_test(tmp_path, capsys):
    root = write_project(tmp_path, FIXED)
    argv = ["dump", "--project", root, "--out", str(tmp_path / "d"),
            "--dump-suspiciousness"]
    assert main(argv) == EXIT_ERROR
    assert "needs a failing test" in capsys.readouterr().err


def test_dump_templates_work_on_a_green_project(tmp_path):
    root = write_project(tmp_path, FIXED)
    out = str(tmp_path / "d")
    argv = ["dump", "--project", root, "--out", out, "--dump-templates"]
    assert main(argv) == 0
    assert report.read_jsonl(os.path.join(out, "templates.jsonl"))
