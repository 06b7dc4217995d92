"""Search tests: selection primitives, instantiation, validation, the loop,
enumeration, and report replay."""

import random

import pytest

from minirepair.faultloc import EmptySuspiciousSet, NoFailingTests
from minirepair.minilang.ast import FLOAT, INT, SourceLocation
from minirepair.minilang.interp import collect_tests, run_tests
from minirepair.minilang.parser import parse_expression
from minirepair.minilang.printer import to_source
from minirepair.minilang.typecheck import TypeCheckFailure, typecheck
from minirepair.modpoints import ModificationPoint, extract_modification_points
from minirepair.namemodel import NameModel, build_table
from minirepair.search import (
    AllZeroWeights,
    Patch,
    SearchConfig,
    SearchStats,
    SterileTemplate,
    apply_report_patch,
    enumerate_adequate_patches,
    instantiate,
    patch_kind,
    prepare,
    prioritize,
    repair_loop,
    run_repair,
    substitute,
    synthesize,
    validate,
    weighted_choice,
)
from minirepair.templates import mine_template

from conftest import checked_sources
from oracles import count_instances


def template_of(ret, params, expr_text):
    program = checked_sources({
        "m/t.mini": f"fun tf({params}): {ret} {{\n    return {expr_text};\n}}\n"})
    return mine_template(program.functions["tf"].body.stmts[0].value)


def make_mp(scope_vars, return_type=INT, parent_kind="ReturnStmt", expr=None):
    return ModificationPoint(
        mp_id=0, expr=expr, return_type=return_type, target_kind="BinaryOp",
        weight=1.0, scope_vars=scope_vars, parent_kind=parent_kind,
        location=SourceLocation("m/a.mini", "m", 1, 1))


ABSDIFF = {
    "proj/diff.mini": (
        "fun absDiff(a: Int, b: Int): Int {\n"
        "    if (a > b) {\n"
        "        return a - b;\n"
        "    }\n"
        "    return a - b;\n"
        "}\n"),
    "proj/diff_test.mini": (
        "fun test_hi() {\n    assert(absDiff(5, 2) == 3);\n}\n"
        "fun test_lo() {\n    assert(absDiff(2, 5) == 3);\n}\n"),
}


def absdiff_parts():
    """Fresh program plus the buggy expression's point and its template."""
    program = checked_sources(dict(ABSDIFF))
    tests = collect_tests(program)
    config = SearchConfig()
    failing, passing, suspicious, points = prepare(program, tests, config)
    buggy = next(p for p in points
                 if p.location.line == 5 and to_source(p.expr) == "a - b")
    return program, failing, passing, buggy


# -- weighted choice -----------------------------------------------------------


def test_weighted_choice_is_seed_deterministic():
    draws_a = [weighted_choice(random.Random(3), "abc", [1, 2, 3])
               for _ in range(20)]
    draws_b = [weighted_choice(random.Random(3), "abc", [1, 2, 3])
               for _ in range(20)]
    assert draws_a == draws_b


def test_zero_weight_items_never_selected():
    rng = random.Random(0)
    assert all(weighted_choice(rng, ["a", "b"], [1.0, 0.0]) == "a"
               for _ in range(5000))


def test_all_zero_weights_raise():
    with pytest.raises(AllZeroWeights):
        weighted_choice(random.Random(0), ["a", "b"], [0.0, 0.0])
    with pytest.raises(AllZeroWeights):
        weighted_choice(random.Random(0), [], [])


def test_draw_frequencies_track_weights():
    rng = random.Random(11)
    draws = [weighted_choice(rng, ["x", "y"], [1, 3]) for _ in range(20000)]
    assert draws.count("y") / 20000 == pytest.approx(0.75, abs=0.02)


# -- instantiation ----------------------------------------------------------------


def test_instances_are_the_typed_cartesian_product():
    template = template_of("Int", "p: Int, q: Int", "p + q")
    mp = make_mp([("a", INT), ("b", INT), ("f1", FLOAT)])
    instances = instantiate(mp, template)
    assert [i.bindings for i in instances] == [
        ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert len(instances) == count_instances(mp.scope_vars,
                                             [p.ptype for p in template.placeholders])


def test_shared_placeholders_count_once():
    template = template_of("Bool", "a: Int, b: Int, c: Int",
                           "(a > b) && (c > a)")
    assert len(template.placeholders) == 3
    mp = make_mp([(n, INT) for n in "xyzw"])
    assert len(instantiate(mp, template)) == 4 ** 3


def test_placeholderless_template_yields_one_instance():
    template = template_of("Int", "", "40 + 2")
    (instance,) = instantiate(make_mp([("a", INT)]), template)
    assert instance.bindings == ()


def test_sterile_template_raises():
    template = template_of("Float", "x: Float", "x * 2.0")
    mp = make_mp([("a", INT)], return_type=FLOAT)
    with pytest.raises(SterileTemplate) as exc:
        instantiate(mp, template)
    assert exc.value.template is template
    assert exc.value.placeholder.ptype == FLOAT
    assert "no variable of type Float" in str(exc.value)


def test_instance_count_on_the_solver_fixture(solver_program):
    config = SearchConfig()
    tests = collect_tests(solver_program)
    # no failing tests in the pristine fixture; drive extraction directly
    from minirepair.faultloc import SuspiciousStatement

    target = next(s for s in solver_program.statements
                  if s.kind == "IfStmt" and s.loc.line == 45)
    points = extract_modification_points(
        [SuspiciousStatement(target.node_id, 1.0, target.loc)], solver_program)
    cond = points[0]
    assert to_source(cond.expr) == "absValue(max - min) <= absoluteAccuracy"
    template = template_of("Bool", "fm: Float, fmin: Float", "fm * fmin > 0.0")
    floats = [n for n, ty in cond.scope_vars if ty == FLOAT]
    assert len(floats) == 13
    assert len(instantiate(cond, template)) == 169


# -- prioritization ----------------------------------------------------------------


def test_prioritize_orders_by_probability_with_lexical_ties():
    table = build_table([frozenset({"p", "q"}), frozenset({"p", "q"}),
                         frozenset({"p", "r"})])
    model = NameModel(table, table, lam=0.5)
    template = template_of("Int", "u: Int, v: Int", "u + v")
    # declaration order r, q, p: tie order must come from the names alone
    mp = make_mp([("r", INT), ("q", INT), ("p", INT)])
    ranked = prioritize(instantiate(mp, template), model, rho=4)
    assert [i.bindings for i in ranked] == [
        ("p", "p"),                          # {p} alone is most common
        ("p", "q"), ("q", "p"), ("q", "q"),  # ties sort by bound names
    ]
    assert ranked[0].score == 1.0
    assert ranked[1].score == 2 / 3


def test_prioritize_caps_at_rho():
    model = NameModel(build_table([]), build_table([]), lam=0.5)
    template = template_of("Int", "u: Int, v: Int", "u + v")
    mp = make_mp([(n, INT) for n in "abcde"])
    kept = prioritize(instantiate(mp, template), model, rho=7)
    assert len(kept) == 7
    assert all(i.score == 0.0 for i in kept)


# -- synthesis ----------------------------------------------------------------------


def test_substitute_fills_placeholders():
    template = template_of("Int", "p: Int, q: Int", "p + q * p")
    expr = substitute(template, ("x", "y"))
    assert to_source(expr) == "x + y * x"
    # the template body is untouched and reusable
    assert template.render() == "_Int_0 + _Int_1 * _Int_0"
    assert to_source(substitute(template, ("m", "n"))) == "m + n * m"


def test_substitute_handles_function_placeholders():
    template = template_of("Int", "h: (Int) -> Int, v: Int", "h(h(v))")
    assert to_source(substitute(template, ("twice", "seed"))) == \
        "twice(twice(seed))"


def test_synthesize_fills_patch_fields():
    program, _, _, buggy = absdiff_parts()
    template = mine_template(buggy.expr)
    instance = next(i for i in instantiate(buggy, template)
                    if i.bindings == ("b", "a"))
    patch = synthesize(instance, attempt=17, seed=4)
    assert patch.original_code == "a - b"
    assert patch.patched_code == "b - a"
    assert patch.kind == "BinaryOp|ReturnStmt"
    assert patch.location.line == 5
    assert patch.template_origin == template.origin
    assert (patch.attempt, patch.seed) == (17, 4)


def test_patch_kind_format():
    replacement = parse_expression("f(x)")
    mp = make_mp([], parent_kind="LocalVarDecl")
    assert patch_kind(mp, replacement) == "Call|LocalVarDecl"


# -- validation ---------------------------------------------------------------------


def manual_patch(mp, replacement_text):
    replacement = parse_expression(replacement_text)
    return Patch(
        location=mp.location, original_code=to_source(mp.expr),
        patched_code=replacement_text, kind=patch_kind(mp, replacement),
        template_origin=mp.location, attempt=0, seed=0,
        mp=mp, replacement=replacement)


def test_validate_accepts_the_fix_and_restores_the_program():
    program, failing, passing, buggy = absdiff_parts()
    before = to_source(program.module_of("proj/diff.mini"))
    patch = manual_patch(buggy, "b - a")
    assert validate(program, patch, failing, passing) == 0
    assert to_source(program.module_of("proj/diff.mini")) == before
    assert run_tests(program).n_failed == 1


def test_validate_counts_remaining_failures():
    program, failing, passing, buggy = absdiff_parts()
    patch = manual_patch(buggy, "b - b")
    assert validate(program, patch, failing, passing) >= 1


def test_validate_catches_regressions():
    program = checked_sources({"m/a.mini": (
        "fun scale(n: Int): Int {\n    return n * 2;\n}\n"
        "fun test_three() {\n    assert(scale(2) == 6);\n}\n"
        "fun test_two() {\n    assert(scale(1) == 2);\n}\n")})
    tests = collect_tests(program)
    failing, passing, _, points = prepare(program, tests, SearchConfig())
    mp = next(p for p in points if to_source(p.expr) == "n * 2")
    # fixes the failing test but breaks the passing one
    assert validate(program, manual_patch(mp, "n * 3"), failing, passing) == 1
    assert run_tests(program).failing_names() == ["test_three"]


def test_validate_rejects_illtyped_candidates_without_running():
    program = checked_sources({"m/a.mini": (
        "fun f(n: Int, flag: Bool): Int {\n    return n + 1;\n}\n"
        "fun test_f() {\n    assert(f(1, true) == 3);\n}\n")})
    tests = collect_tests(program)
    failing, passing, _, points = prepare(program, tests, SearchConfig())
    mp = next(p for p in points if to_source(p.expr) == "n + 1")
    stats = SearchStats()
    patch = manual_patch(mp, "flag")
    assert validate(program, patch, failing, passing, stats=stats) == \
        len(failing) + len(passing)
    assert stats.type_errors == 1
    typecheck(program)  # restored and still well-typed


# -- preparing the search ---------------------------------------------------------


def test_prepare_splits_tests_and_ranks_the_bug():
    program = checked_sources(dict(ABSDIFF))
    failing, passing, suspicious, points = prepare(
        program, collect_tests(program), SearchConfig())
    assert [t.name for t in failing] == ["test_lo"]
    assert [t.name for t in passing] == ["test_hi"]
    top = program.node(suspicious[0].node_id)
    assert (top.kind, top.loc.line) == ("ReturnStmt", 5)
    assert any(to_source(p.expr) == "a - b" and p.location.line == 5
               for p in points)


def test_prepare_excludes_statements_inside_test_functions():
    program = checked_sources(dict(ABSDIFF))
    _, _, suspicious, points = prepare(program, collect_tests(program),
                                       SearchConfig())
    for entry in suspicious:
        fn = program.function_of(program.node(entry.node_id))
        assert not fn.is_test
    assert all(p.location.file_id == "proj/diff.mini" for p in points)


def test_prepare_requires_a_failing_test():
    program = checked_sources({"m/a.mini": (
        "fun f(): Int {\n    return 1;\n}\n"
        "fun test_f() {\n    assert(f() == 1);\n}\n")})
    with pytest.raises(NoFailingTests):
        prepare(program, collect_tests(program), SearchConfig())


def test_prepare_raises_when_only_test_code_is_suspicious():
    program = checked_sources({"m/a.mini": (
        "fun test_doom() {\n    assert(false);\n}\n")})
    with pytest.raises(EmptySuspiciousSet):
        prepare(program, collect_tests(program), SearchConfig())


# -- the search loop ----------------------------------------------------------------


def repair_config(**kw):
    defaults = dict(max_attempts=2000, max_time=30.0, seed=1)
    defaults.update(kw)
    return SearchConfig(**defaults)


def test_run_repair_finds_the_fix():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config())
    fixes = [p for p in result.patches if p.patched_code == "b - a"]
    assert fixes, [p.patched_code for p in result.patches]
    fix = fixes[0]
    assert fix.location.line == 5 and fix.original_code == "a - b"
    assert fix.validation_ms > 0.0
    # the program under repair is left unpatched
    assert run_tests(program).n_failed == 1


def test_repair_loop_returns_only_patches():
    program = checked_sources(dict(ABSDIFF))
    patches = repair_loop(program, config=repair_config(max_patches=1))
    assert len(patches) == 1


def test_every_reported_patch_passes_the_whole_suite():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config())
    assert result.patches
    for patch in result.patches:
        fresh = checked_sources(dict(ABSDIFF))
        apply_report_patch(fresh, {
            "file": patch.location.file_id, "line": patch.location.line,
            "column": patch.location.column, "original": patch.original_code,
            "patched": patch.patched_code})
        assert run_tests(fresh).n_failed == 0, patch.patched_code


def test_search_is_deterministic_for_a_seed():
    def run():
        program = checked_sources(dict(ABSDIFF))
        result = run_repair(program, config=repair_config(seed=9))
        summary = [(p.location.line, p.location.column, p.original_code,
                    p.patched_code, p.kind, p.attempt) for p in result.patches]
        counters = (result.stats.attempts, result.stats.no_templates,
                    result.stats.sterile, result.stats.identity,
                    result.stats.validated, result.stats.type_errors,
                    result.stats.duplicates)
        return summary, counters

    assert run() == run()


def test_attempt_accounting_is_complete():
    program = checked_sources(dict(ABSDIFF))
    stats = run_repair(program, config=repair_config()).stats
    assert stats.attempts == 2000
    assert stats.attempts == (stats.no_templates + stats.sterile
                              + stats.identity + stats.validated)
    assert stats.identity > 0
    assert stats.type_errors == 0
    assert stats.elapsed_ms > 0.0


def test_dedup_reports_each_patch_once():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config())
    keys = [(p.location.file_id, p.location.line, p.location.column,
             p.patched_code) for p in result.patches]
    assert len(keys) == len(set(keys))
    assert result.stats.duplicates > 0


def test_dedup_can_be_disabled():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config(dedup=False))
    keys = [(p.location.line, p.patched_code) for p in result.patches]
    assert len(keys) > len(set(keys))
    assert result.stats.duplicates == 0


def test_max_patches_stops_the_search_early():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config(max_patches=1))
    assert len(result.patches) == 1
    assert result.stats.attempts < 2000


def test_identity_candidates_are_never_validated():
    program = checked_sources(dict(ABSDIFF))
    result = run_repair(program, config=repair_config())
    for patch in result.patches:
        assert patch.patched_code != patch.original_code


# -- exhaustive enumeration ------------------------------------------------------------


def test_enumeration_includes_the_fix_and_is_deterministic():
    first = enumerate_adequate_patches(checked_sources(dict(ABSDIFF)))
    second = enumerate_adequate_patches(checked_sources(dict(ABSDIFF)))
    renders = [(p.location.line, p.patched_code) for p in first]
    assert (5, "b - a") in renders
    assert renders == [(p.location.line, p.patched_code) for p in second]
    keys = [(p.location.line, p.location.column, p.patched_code) for p in first]
    assert len(keys) == len(set(keys))


def test_enumeration_candidate_cap():
    with pytest.raises(RuntimeError, match="candidate space exceeds"):
        enumerate_adequate_patches(checked_sources(dict(ABSDIFF)),
                                   max_candidates=3)


# -- replaying reports ------------------------------------------------------------------


def fix_record(**overrides):
    record = {"file": "proj/diff.mini", "line": 5, "column": 12,
              "original": "a - b", "patched": "b - a"}
    record.update(overrides)
    return record


def test_apply_report_patch_repairs_the_program():
    program = checked_sources(dict(ABSDIFF))
    target = next(p for p in extract_points(program))
    apply_report_patch(program, fix_record(column=target.loc.column))
    assert run_tests(program).n_failed == 0
    line = to_source(program.functions["absDiff"]).splitlines()[-2]
    assert line.strip() == "return b - a;"


def extract_points(program):
    """Locations of the second 'a - b' read from the tree, for the record."""
    fn = program.functions["absDiff"]
    stmt = fn.body.stmts[1]
    yield stmt.value


def test_apply_report_patch_reindexes():
    program = checked_sources(dict(ABSDIFF))
    column = next(extract_points(program)).loc.column
    before = program.node_count
    apply_report_patch(program, fix_record(column=column))
    assert program.node_count == before
    assert any(to_source(s) == "return b - a;" for s in program.statements)


def test_apply_report_patch_rejects_drifted_source():
    program = checked_sources(dict(ABSDIFF))
    column = next(extract_points(program)).loc.column
    with pytest.raises(ValueError, match="no expression matching"):
        apply_report_patch(program, fix_record(column=column,
                                               original="a + b"))


def test_apply_report_patch_rejects_wrong_position():
    program = checked_sources(dict(ABSDIFF))
    with pytest.raises(ValueError):
        apply_report_patch(program, fix_record(line=99))


def test_apply_report_patch_rejects_illtyped_replacement():
    program = checked_sources(dict(ABSDIFF))
    column = next(extract_points(program)).loc.column
    with pytest.raises(TypeCheckFailure):
        apply_report_patch(program, fix_record(column=column,
                                               patched="a > b"))
