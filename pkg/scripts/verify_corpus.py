#!/usr/bin/env python3
"""Verify the seeded-bug corpus by exhaustive enumeration.

For every project under tests/fixtures/corpus/ this enumerates the full
candidate space (every instance of every in-scope template at every
modification point) and validates each candidate, printing the distinct
adequate patches.  A project with zero adequate patches is a broken
fixture: the search could never repair it.

Run after any change to the corpus:

    python3 scripts/verify_corpus.py
"""

import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from minirepair.minilang.program import load_project
from minirepair.minilang.typecheck import typecheck
from minirepair.search import SearchConfig, enumerate_adequate_patches

CORPUS = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures",
                      "corpus")
STEP_BUDGET = 200_000


def main() -> int:
    bugs = sorted(d for d in os.listdir(CORPUS)
                  if os.path.isdir(os.path.join(CORPUS, d)))
    print(f"verifying {len(bugs)} corpus projects\n")
    broken = []
    for bug in bugs:
        root = os.path.join(CORPUS, bug)
        started = time.monotonic()
        program = load_project(root)
        typecheck(program)
        patches = enumerate_adequate_patches(
            program, config=SearchConfig(step_budget=STEP_BUDGET))
        elapsed = time.monotonic() - started
        locations = {(p.location.file_id, p.location.line, p.location.column)
                     for p in patches}
        status = "ok" if patches else "BROKEN"
        print(f"{bug}: {len(patches)} adequate patch(es) at "
              f"{len(locations)} location(s) in {elapsed:.1f}s  [{status}]")
        for p in patches:
            print(f"    {p.location}  {p.original_code} -> {p.patched_code}")
        if not patches:
            broken.append(bug)
        print()
    if broken:
        print(f"BROKEN fixtures (no reachable fix): {', '.join(broken)}")
        return 1
    print("corpus ok: every project has at least one reachable fix")
    return 0


if __name__ == "__main__":
    sys.exit(main())
