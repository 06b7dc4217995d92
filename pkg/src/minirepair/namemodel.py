"""Probability model over variable-name combinations.

For a statement set, ``pml_i(S)`` is the fraction of statements that
contain all names in S among statements containing at least i = |S|
distinct names.  The model scores a candidate binding by mixing the
probability measured over the whole program with one measured over
statements near the modification point (its file or package): names that
co-occur locally get favored, which is what ranks plausible variable
combinations above havoc.

Subset counting is capped at size 4; larger queries fall back to a product
of single-name probabilities.  Queries larger than the largest statement
ever seen score 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from minirepair.minilang.ast import (
    Assign,
    SourceLocation,
    Stmt,
    VarDecl,
    VarRead,
    direct_expressions,
    walk,
)
from minirepair.minilang.program import Program

SUBSET_SIZE_CAP = 4
DEFAULT_LAMBDA = 0.5
CACHE_GRANULARITIES = ("file", "package")


def statement_names(stmt: Stmt) -> frozenset[str]:
    """The distinct variable names a statement mentions: reads in its own
    expressions plus the name it assigns or declares.  Function references
    are not variable names."""
    names = set()
    if isinstance(stmt, (VarDecl, Assign)):
        names.add(stmt.name)
    for root in direct_expressions(stmt):
        for node in walk(root):
            if isinstance(node, VarRead) and node.resolution not in ("func", "builtin"):
                names.add(node.name)
    return frozenset(names)


@dataclass
class NameCooccurrenceTable:
    """Subset counts for one statement population."""

    #: subset size -> name set -> number of statements containing the set
    counts: dict[int, dict[frozenset[str], int]] = field(default_factory=dict)
    #: subset size -> number of statements with at least that many names
    denominators: dict[int, int] = field(default_factory=dict)
    #: largest distinct-name count of any statement
    n_max: int = 0

    def pml(self, names: frozenset[str]) -> float:
        """P(a statement contains all of ``names``), conditioned on it
        having at least |names| distinct names."""
        size = len(names)
        if size == 0 or size > self.n_max:
            return 0.0
        if size > SUBSET_SIZE_CAP:
            product = 1.0
            for name in names:
                product *= self.pml(frozenset((name,)))
            return product
        denominator = self.denominators.get(size, 0)
        if denominator == 0:
            return 0.0
        return self.counts.get(size, {}).get(names, 0) / denominator


def build_table(name_sets: Iterable[frozenset[str]]) -> NameCooccurrenceTable:
    """Count name subsets over one statement population.

    ``name_sets`` holds one entry per statement (from statement_names);
    statements with no variable names still belong to the population but
    contribute to no subset."""
    table = NameCooccurrenceTable()
    for names in name_sets:
        size = len(names)
        if size == 0:
            continue
        table.n_max = max(table.n_max, size)
        ordered = sorted(names)
        for i in range(1, min(size, SUBSET_SIZE_CAP) + 1):
            table.denominators[i] = table.denominators.get(i, 0) + 1
            bucket = table.counts.setdefault(i, {})
            for combo in itertools.combinations(ordered, i):
                key = frozenset(combo)
                bucket[key] = bucket.get(key, 0) + 1
        for i in range(SUBSET_SIZE_CAP + 1, size + 1):
            table.denominators[i] = table.denominators.get(i, 0) + 1
    return table


@dataclass
class NameModel:
    """Mixture of a program-wide table and a near-the-fix table."""

    global_table: NameCooccurrenceTable
    cache_table: NameCooccurrenceTable
    lam: float = DEFAULT_LAMBDA

    def probability(self, names: frozenset[str]) -> float:
        return (self.lam * self.global_table.pml(names)
                + (1.0 - self.lam) * self.cache_table.pml(names))


class NameModelCache:
    """Builds the global table once and one cache table per file (or
    package), on demand."""

    def __init__(self, program: Program, lam: float = DEFAULT_LAMBDA,
                 granularity: str = "file"):
        if granularity not in CACHE_GRANULARITIES:
            raise ValueError(f"unknown cache granularity {granularity!r}, "
                             f"expected one of {CACHE_GRANULARITIES}")
        self.program = program
        self.lam = lam
        self.granularity = granularity
        self._names_by_stmt = [(stmt.loc, statement_names(stmt))
                               for stmt in program.statements]
        self.global_table = build_table(names for _, names in self._names_by_stmt)
        self._caches: dict[str, NameCooccurrenceTable] = {}

    def _cache_key(self, location: SourceLocation) -> str:
        if self.granularity == "file":
            return location.file_id
        return location.package_id

    def cache_table(self, location: SourceLocation) -> NameCooccurrenceTable:
        key = self._cache_key(location)
        table = self._caches.get(key)
        if table is None:
            if self.granularity == "file":
                selected = (names for loc, names in self._names_by_stmt
                            if loc.file_id == key)
            else:
                selected = (names for loc, names in self._names_by_stmt
                            if loc.package_id == key)
            table = build_table(selected)
            self._caches[key] = table
        return table

    def model_at(self, location: SourceLocation) -> NameModel:
        return NameModel(self.global_table, self.cache_table(location), self.lam)


def build_model(program: Program, location: SourceLocation,
                lam: float = DEFAULT_LAMBDA,
                granularity: str = "file") -> NameModel:
    """One-shot model for a single location (the cache is worth keeping
    when scoring many points; see NameModelCache)."""
    return NameModelCache(program, lam, granularity).model_at(location)
