"""Spectrum-based fault localization.

Statement coverage from passing and failing test runs is folded into
per-statement spectra (ef, ep, nf, np) and scored with the Ochiai formula.
Statements scoring above a strict threshold, best first, are the candidate
repair sites; their scores later weight how often the search visits them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from minirepair.minilang.ast import SourceLocation
from minirepair.minilang.interp import TestReport
from minirepair.minilang.program import Program


class NoFailingTests(Exception):
    """The suite is green: there is nothing to repair."""


class EmptySuspiciousSet(Exception):
    """No statement scored above the suspiciousness threshold."""


@dataclass(frozen=True)
class Spectrum:
    """Execution counts for one statement: failing/passing tests that
    executed it (ef/ep) and failing/passing tests that did not (nf/np)."""

    node_id: int
    ef: int
    ep: int
    nf: int
    np: int


@dataclass(frozen=True)
class SuspiciousStatement:
    node_id: int
    suspiciousness: float
    location: SourceLocation


@dataclass(frozen=True)
class FaultLocConfig:
    #: strict lower bound: statements with suspiciousness <= gamma are dropped
    gamma: float = 0.1
    #: keep at most this many statements, best first
    max_statements: int = 1000


def ochiai(spectrum: Spectrum) -> float:
    """ef / sqrt((ef + nf) * (ef + ep)), and 0.0 when that is undefined.

    The score is 0 exactly when no failing test executed the statement, and
    1 exactly when all failing and no passing tests executed it.
    """
    denominator = (spectrum.ef + spectrum.nf) * (spectrum.ef + spectrum.ep)
    if spectrum.ef == 0 or denominator == 0:
        return 0.0
    return spectrum.ef / math.sqrt(denominator)


def collect_spectra(report: TestReport) -> list[Spectrum]:
    """Spectra for every statement covered by at least one test.

    Raises NoFailingTests when the report has no failing test: spectra
    would be meaningless (and the program needs no repair).
    """
    total_failing = report.n_failed
    total_passing = report.n_passed
    if total_failing == 0:
        raise NoFailingTests()
    failing = set(report.failing_names())
    ef: dict[int, int] = {}
    ep: dict[int, int] = {}
    for test_name, covered in report.coverage.items():
        bucket = ef if test_name in failing else ep
        for node_id in covered:
            bucket[node_id] = bucket.get(node_id, 0) + 1
    spectra = []
    for node_id in sorted(ef.keys() | ep.keys()):
        e_f = ef.get(node_id, 0)
        e_p = ep.get(node_id, 0)
        spectra.append(Spectrum(node_id, e_f, e_p,
                                total_failing - e_f, total_passing - e_p))
    return spectra


def rank_statements(spectra: list[Spectrum], program: Program,
                    config: FaultLocConfig = FaultLocConfig()) -> list[SuspiciousStatement]:
    """Score, filter, and order statements for repair.

    Ordering is by descending suspiciousness; ties break by source position
    (file, line, column) so runs are reproducible.  Raises
    EmptySuspiciousSet when nothing survives the gamma filter.
    """
    scored = []
    for spectrum in spectra:
        score = ochiai(spectrum)
        if score <= config.gamma:
            continue
        stmt = program.node(spectrum.node_id)
        scored.append(SuspiciousStatement(spectrum.node_id, score, stmt.loc))
    scored.sort(key=lambda s: (-s.suspiciousness, s.location.file_id,
                               s.location.line, s.location.column))
    if not scored:
        raise EmptySuspiciousSet()
    return scored[:config.max_statements]
