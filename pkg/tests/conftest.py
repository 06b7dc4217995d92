import os

import pytest

from minirepair.minilang.program import Program, load_project, program_from_sources
from minirepair.minilang.typecheck import typecheck

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
CORPUS = os.path.join(FIXTURES, "corpus")
PARSE_FIXTURES = os.path.join(FIXTURES, "parse")
MATH70 = os.path.join(FIXTURES, "math70")


def corpus_projects() -> list[str]:
    return sorted(d for d in os.listdir(CORPUS)
                  if os.path.isdir(os.path.join(CORPUS, d)))


def load_checked(root: str) -> Program:
    program = load_project(root)
    typecheck(program)
    return program


def checked_sources(sources: dict[str, str]) -> Program:
    program = program_from_sources(sources)
    typecheck(program)
    return program


@pytest.fixture
def solver_program() -> Program:
    return load_checked(MATH70)
