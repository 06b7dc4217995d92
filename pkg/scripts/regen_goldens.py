"""Regenerate the golden s-expression files for the parse fixtures.

Run after a deliberate grammar or printer change, then review the diff:

    python3 scripts/regen_goldens.py
"""

import os

from minirepair.minilang.parser import parse_module
from minirepair.minilang.printer import to_sexpr
from minirepair.minilang.typecheck import typecheck

PARSE_DIR = os.path.normpath(os.path.join(
    os.path.dirname(__file__), "..", "tests", "fixtures", "parse"))
GOLDEN_DIR = os.path.join(PARSE_DIR, "golden")


def main() -> None:
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    names = sorted(n for n in os.listdir(PARSE_DIR) if n.endswith(".mini"))
    for name in names:
        with open(os.path.join(PARSE_DIR, name)) as fh:
            text = fh.read()
        module = parse_module(text, name, ".")
        typecheck([module])
        out = to_sexpr(module) + "\n"
        golden = os.path.join(GOLDEN_DIR, name[:-5] + ".sexp")
        with open(golden, "w") as fh:
            fh.write(out)
        print(f"wrote {os.path.relpath(golden, PARSE_DIR)}")


if __name__ == "__main__":
    main()
