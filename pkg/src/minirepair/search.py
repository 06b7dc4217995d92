"""Weighted-random navigation of the candidate patch space.

One attempt is one pass through: pick a modification point (weighted by
suspiciousness), pick a compatible template (weighted by support), bind
every placeholder to an in-scope variable (the Cartesian product of
type-compatible choices), keep the most probable bindings under the name
model, pick one (weighted by probability), and validate the resulting
patch against the originally failing tests first and the rest of the suite
after.  Candidates that fail anywhere cost one attempt and nothing else;
candidates that pass everywhere are collected and the search continues
until its attempt or time budget runs out.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from dataclasses import dataclass, field

from minirepair.faultloc import (
    EmptySuspiciousSet,
    FaultLocConfig,
    SuspiciousStatement,
    collect_spectra,
    rank_statements,
)
from minirepair.minilang.ast import (
    Expr,
    Node,
    PlaceholderExpr,
    SourceLocation,
    VarRead,
    walk,
)
from minirepair.minilang.interp import (
    TestCase,
    collect_tests,
    run_tests,
)
from minirepair.minilang.parser import parse_expression
from minirepair.minilang.printer import to_source
from minirepair.minilang.program import Program
from minirepair.minilang.typecheck import TypeCheckFailure, typecheck
from minirepair.modpoints import (
    ModificationPoint,
    TargetConfig,
    extract_modification_points,
)
from minirepair.namemodel import NameModel, NameModelCache
from minirepair.templates import (
    Placeholder,
    Template,
    build_pool,
    query,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_TIME = 60.0
DEFAULT_MAX_ATTEMPTS = 10_000
DEFAULT_RHO = 1000


class AllZeroWeights(ValueError):
    """weighted_choice needs at least one positive weight."""


class SterileTemplate(Exception):
    """A placeholder had no type-compatible variable in scope at the point."""

    def __init__(self, template: Template, mp: ModificationPoint,
                 placeholder: Placeholder):
        self.template = template
        self.mp = mp
        self.placeholder = placeholder
        super().__init__(
            f"template '{template.render()}' is sterile at {mp.location}: "
            f"no variable of type {placeholder.ptype.spelling()} in scope")


@dataclass(frozen=True)
class SearchConfig:
    max_time: float = DEFAULT_MAX_TIME
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    #: strict suspiciousness threshold and cap on ranked statements
    gamma: float = 0.1
    max_mod_points: int = 1000
    #: template visibility: "local" (same file), "package", or "global"
    scope: str = "package"
    #: keep the rho most probable instances of a template at a point
    rho: int = DEFAULT_RHO
    #: weight of the program-wide name table vs the near-the-fix table
    lam: float = 0.5
    cache_granularity: str = "file"
    seed: int = 0
    #: drop patches identical (same location, same new code) to one already found
    dedup: bool = True
    #: interpreter steps per test run; bounds runaway candidates
    step_budget: int = 1_000_000
    #: stop early after this many patches (None: keep searching)
    max_patches: int | None = None
    target: TargetConfig = field(default_factory=TargetConfig)


@dataclass
class TemplateInstance:
    template: Template
    mp: ModificationPoint
    #: placeholder index -> variable name
    bindings: tuple[str, ...]
    score: float = 0.0

    def names(self) -> frozenset[str]:
        return frozenset(self.bindings)


@dataclass
class Patch:
    location: SourceLocation
    original_code: str
    patched_code: str
    kind: str
    template_origin: SourceLocation
    attempt: int
    seed: int
    validation_ms: float = 0.0
    mp: ModificationPoint = field(default=None, repr=False)  # type: ignore[assignment]
    replacement: Expr = field(default=None, repr=False)  # type: ignore[assignment]


@dataclass
class SearchStats:
    attempts: int = 0
    no_templates: int = 0
    sterile: int = 0
    identity: int = 0
    validated: int = 0
    #: candidates the type checker rejected; instantiation makes this 0
    type_errors: int = 0
    duplicates: int = 0
    elapsed_ms: float = 0.0


@dataclass
class RepairResult:
    patches: list[Patch]
    stats: SearchStats
    suspicious: list[SuspiciousStatement]
    mod_points: list[ModificationPoint]


# ---------------------------------------------------------------------------
# Selection primitives


def weighted_choice(rng: random.Random, items: list, weights: list[float]):
    """One draw proportional to weights.  Zero-weight items are never
    selected; all-zero (or empty) weights raise AllZeroWeights."""
    if not items or sum(weights) <= 0.0:
        raise AllZeroWeights(f"no positive weight among {len(items)} items")
    return rng.choices(items, weights=weights, k=1)[0]


# ---------------------------------------------------------------------------
# Instantiation and prioritization


def instantiate(mp: ModificationPoint, template: Template) -> list[TemplateInstance]:
    """Every way to bind the template's placeholders to in-scope variables
    of matching type, in deterministic order (scope order per placeholder,
    rightmost placeholder varying fastest).

    Raises SterileTemplate when any placeholder has no candidate.  A
    template with no placeholders yields exactly one instance.
    """
    domains: list[list[str]] = []
    for ph in template.placeholders:
        names = [name for name, ty in mp.scope_vars if ty == ph.ptype]
        if not names:
            raise SterileTemplate(template, mp, ph)
        domains.append(names)
    instances = []
    for combo in itertools.product(*domains):
        instances.append(TemplateInstance(template, mp, tuple(combo)))
    return instances


def prioritize(instances: list[TemplateInstance], model: NameModel,
               rho: int = DEFAULT_RHO) -> list[TemplateInstance]:
    """Score every instance with the name model and keep the ``rho`` most
    probable.  Equal scores are ordered by the bound names, so ranking
    never depends on instantiation order."""
    for instance in instances:
        instance.score = model.probability(instance.names())
    ranked = sorted(instances, key=lambda i: (-i.score, i.bindings))
    return ranked[:rho]


def substitute(template: Template, bindings: tuple[str, ...]) -> Expr:
    """A fresh expression tree: the template body with each placeholder
    replaced by a read of its bound variable."""

    def fill(node):
        if isinstance(node, PlaceholderExpr):
            read = VarRead(bindings[node.index], node.loc)
            read.static_type = node.ptype
            return read
        for name in node._child_fields:
            value = getattr(node, name)
            if isinstance(value, Node):
                setattr(node, name, fill(value))
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    value[i] = fill(item)
        return node

    return fill(template.body.clone())


def synthesize(instance: TemplateInstance, attempt: int = 0,
               seed: int = 0) -> Patch:
    """Build the concrete patch for one instance."""
    replacement = substitute(instance.template, instance.bindings)
    return Patch(
        location=instance.mp.location,
        original_code=to_source(instance.mp.expr),
        patched_code=to_source(replacement),
        kind=patch_kind(instance.mp, replacement),
        template_origin=instance.template.origin,
        attempt=attempt,
        seed=seed,
        mp=instance.mp,
        replacement=replacement,
    )


def patch_kind(mp: ModificationPoint, replacement: Expr) -> str:
    """Classification tag "<expression kind>|<parent statement-or-expression
    kind>", e.g. "Call|LocalVarDecl"."""
    return f"{replacement.kind}|{mp.parent_kind}"


# ---------------------------------------------------------------------------
# Validation


class _applied:
    """Swap a replacement expression in for the duration of a with-block."""

    def __init__(self, program: Program, target: Expr, replacement: Expr):
        self.parent = program.parent_of(target)
        self.target = target
        self.replacement = replacement

    def __enter__(self):
        self.parent.replace_child(self.target, self.replacement)
        return self

    def __exit__(self, *exc):
        self.parent.replace_child(self.replacement, self.target)
        return False


def validate(program: Program, patch: Patch, failing: list[TestCase],
             passing: list[TestCase], step_budget: int = 1_000_000,
             stats: SearchStats | None = None) -> int:
    """Number of failing tests under the patch: originally failing tests
    run first, and the passing (regression) half runs only when all of
    those now pass.  The program is restored afterwards.

    A candidate that does not type-check never reaches execution; it counts
    as failing everything.
    """
    with _applied(program, patch.mp.expr, patch.replacement):
        try:
            typecheck(program)
        except TypeCheckFailure as failure:
            logger.debug("candidate at %s rejected by type checker: %s",
                         patch.location, failure.errors[0])
            if stats is not None:
                stats.type_errors += 1
            return len(failing) + len(passing)
        report = run_tests(program, failing, step_budget=step_budget)
        if report.n_failed:
            return report.n_failed
        regression = run_tests(program, passing, step_budget=step_budget)
        return regression.n_failed


# ---------------------------------------------------------------------------
# The search loop


def prepare(program: Program, tests: list[TestCase],
            config: SearchConfig) -> tuple[list[TestCase], list[TestCase],
                                           list[SuspiciousStatement],
                                           list[ModificationPoint]]:
    """Baseline run, localization, and modification point extraction.

    Statements inside test functions are excluded as repair sites: tests
    are the oracle, not the subject.  Raises NoFailingTests or
    EmptySuspiciousSet when repair cannot start.
    """
    baseline = run_tests(program, tests, record_coverage=True,
                         step_budget=config.step_budget)
    failing_names = set(baseline.failing_names())
    failing = [t for t in tests if t.name in failing_names]
    passing = [t for t in tests if t.name not in failing_names]
    spectra = collect_spectra(baseline)
    ranked = rank_statements(spectra, program,
                             FaultLocConfig(config.gamma, config.max_mod_points))
    repairable = []
    for entry in ranked:
        fn = program.function_of(program.node(entry.node_id))
        if fn is not None and fn.is_test:
            continue
        repairable.append(entry)
    if not repairable:
        raise EmptySuspiciousSet()
    points = extract_modification_points(repairable, program, config.target)
    return failing, passing, repairable, points


def run_repair(program: Program, tests: list[TestCase] | None = None,
               config: SearchConfig = SearchConfig()) -> RepairResult:
    """Search for patches until the attempt, time, or patch budget is hit."""
    if tests is None:
        tests = collect_tests(program)
    rng = random.Random(config.seed)
    started = time.monotonic()
    failing, passing, suspicious, points = prepare(program, tests, config)
    pool = build_pool(program, config.target.target_kinds)
    models = NameModelCache(program, config.lam, config.cache_granularity)
    stats = SearchStats()
    patches: list[Patch] = []
    seen: set[tuple[str, int, int, str]] = set()
    point_weights = [mp.weight for mp in points]
    logger.info("search over %d modification points, %d templates, "
                "%d failing / %d passing tests",
                len(points), len(pool), len(failing), len(passing))

    while (stats.attempts < config.max_attempts
           and time.monotonic() - started < config.max_time
           and (config.max_patches is None or len(patches) < config.max_patches)
           and points):
        stats.attempts += 1
        mp = weighted_choice(rng, points, point_weights)
        candidates = query(pool, mp, config.scope)
        if not candidates:
            stats.no_templates += 1
            continue
        template = weighted_choice(rng, candidates,
                                   [t.support for t in candidates])
        try:
            instances = instantiate(mp, template)
        except SterileTemplate:
            stats.sterile += 1
            continue
        kept = prioritize(instances, models.model_at(mp.location), config.rho)
        scores = [i.score for i in kept]
        if sum(scores) > 0.0:
            instance = weighted_choice(rng, kept, scores)
        else:
            instance = kept[rng.randrange(len(kept))]
        patch = synthesize(instance, attempt=stats.attempts, seed=config.seed)
        if patch.patched_code == patch.original_code:
            stats.identity += 1
            continue
        validation_started = time.perf_counter()
        nb_failing = validate(program, patch, failing, passing,
                              config.step_budget, stats)
        patch.validation_ms = (time.perf_counter() - validation_started) * 1000.0
        stats.validated += 1
        if nb_failing:
            continue
        key = (patch.location.file_id, patch.location.line,
               patch.location.column, patch.patched_code)
        if config.dedup and key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        patches.append(patch)
        logger.info("attempt %d: adequate patch at %s: %s -> %s",
                    stats.attempts, patch.location, patch.original_code,
                    patch.patched_code)

    stats.elapsed_ms = (time.monotonic() - started) * 1000.0
    return RepairResult(patches, stats, suspicious, points)


def repair_loop(program: Program, tests: list[TestCase] | None = None,
                config: SearchConfig = SearchConfig()) -> list[Patch]:
    """The patches found by run_repair."""
    return run_repair(program, tests, config).patches


# ---------------------------------------------------------------------------
# Exhaustive enumeration (ground truth for fixtures and experiments)


def enumerate_adequate_patches(program: Program,
                               tests: list[TestCase] | None = None,
                               config: SearchConfig = SearchConfig(),
                               max_candidates: int | None = None) -> list[Patch]:
    """Validate every instance of every compatible template at every
    modification point, in deterministic order, and return the distinct
    adequate patches.  Intended for small fixtures: the candidate space is
    the full Cartesian product."""
    if tests is None:
        tests = collect_tests(program)
    failing, passing, _, points = prepare(program, tests, config)
    pool = build_pool(program, config.target.target_kinds)
    patches = []
    seen = set()
    examined = 0
    for mp in points:
        for template in query(pool, mp, config.scope):
            try:
                instances = instantiate(mp, template)
            except SterileTemplate:
                continue
            for instance in instances:
                examined += 1
                if max_candidates is not None and examined > max_candidates:
                    raise RuntimeError(
                        f"candidate space exceeds {max_candidates}")
                patch = synthesize(instance)
                if patch.patched_code == patch.original_code:
                    continue
                key = (patch.location.file_id, patch.location.line,
                       patch.location.column, patch.patched_code)
                if key in seen:
                    continue
                if validate(program, patch, failing, passing,
                            config.step_budget) == 0:
                    seen.add(key)
                    patches.append(patch)
    return patches


# ---------------------------------------------------------------------------
# Replaying reported patches


def apply_report_patch(program: Program, record: dict) -> None:
    """Permanently apply one patch record {file, line, column, original,
    patched} to a program, then re-check and re-index it.

    The original expression is located by position and source text; a
    mismatch (program drifted since the report) raises ValueError.
    """
    module = program.module_of(record["file"])
    target = None
    for node in walk(module):
        if not isinstance(node, Expr):
            continue
        if node.loc.line == record["line"] and node.loc.column == record["column"]:
            if to_source(node) == record["original"]:
                target = node
                break
    if target is None:
        raise ValueError(
            f"no expression matching {record['original']!r} at "
            f"{record['file']}:{record['line']}:{record['column']}")
    replacement = parse_expression(record["patched"], record["file"],
                                   module.package_id)
    parent = program.parent_of(target)
    parent.replace_child(target, replacement)
    typecheck(program)
    program.reindex()
