"""Code templates mined from the program under repair.

A template is an expression with every variable read replaced by a typed,
numbered placeholder such as ``_Int_0``: repeated reads of the same
variable share one placeholder, numbering follows first occurrence left to
right, and literals keep their values.  References to globally declared
functions stay concrete (they are valid anywhere in the project), while
reads of function-typed parameters and locals are abstracted like any other
variable, including in callee position.

The pool holds one entry per distinct template shape, with every location
it was mined from; how often a shape occurs (its support) weights how
likely the search is to try it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from minirepair.minilang.ast import (
    Expr,
    MiniType,
    Node,
    PlaceholderExpr,
    SourceLocation,
    VarRead,
    direct_expressions,
    walk,
)
from minirepair.minilang.printer import to_sexpr, to_source
from minirepair.minilang.program import Program
from minirepair.modpoints import DEFAULT_TARGET_KINDS, ModificationPoint

SCOPE_FILTERS = ("local", "package", "global")


@dataclass(frozen=True)
class Placeholder:
    ptype: MiniType
    index: int

    def render(self) -> str:
        return f"_{self.ptype.placeholder_name()}_{self.index}"


@dataclass
class Template:
    """One mined shape.  ``body`` owns fresh nodes (not shared with the
    program); placeholders appear in it as PlaceholderExpr leaves."""

    body: Expr
    placeholders: tuple[Placeholder, ...]
    return_type: MiniType
    target_kind: str
    occurrences: list[SourceLocation] = field(default_factory=list)

    @property
    def origin(self) -> SourceLocation:
        return self.occurrences[0]

    @property
    def support(self) -> int:
        return len(self.occurrences)

    def render(self) -> str:
        return to_source(self.body)

    def structural_key(self) -> str:
        # Placeholder types print with their full spelling here, so two
        # shapes that render alike but bind differently typed functions
        # stay distinct.
        return f"{self.return_type.spelling()}||{to_sexpr(self.body, locations=False)}"


def mine_template(expr: Expr) -> Template:
    """Abstract one type-checked expression into a template."""
    placeholders: list[Placeholder] = []
    by_name: dict[str, Placeholder] = {}

    def abstract(node: Node) -> Node:
        if isinstance(node, VarRead) and node.resolution not in ("func", "builtin"):
            ph = by_name.get(node.name)
            if ph is None:
                ph = Placeholder(node.static_type, len(placeholders))
                placeholders.append(ph)
                by_name[node.name] = ph
            replacement = PlaceholderExpr(ph.ptype, ph.index, node.loc)
            replacement.static_type = node.static_type
            return replacement
        for name in node._child_fields:
            value = getattr(node, name)
            if isinstance(value, Node):
                setattr(node, name, abstract(value))
            elif isinstance(value, list):
                for i, item in enumerate(value):
                    value[i] = abstract(item)
        return node

    body = abstract(expr.clone())
    return Template(
        body=body,  # type: ignore[arg-type]
        placeholders=tuple(placeholders),
        return_type=expr.static_type,
        target_kind=expr.kind,
        occurrences=[expr.loc],
    )


@dataclass
class TemplatePool:
    templates: list[Template] = field(default_factory=list)
    _by_key: dict[str, Template] = field(default_factory=dict, repr=False)
    _by_return_type: dict[MiniType, list[Template]] = field(default_factory=dict,
                                                            repr=False)

    def add(self, template: Template) -> Template:
        """Merge a freshly mined template into the pool; returns the pool's
        entry (existing entry gains the new occurrence)."""
        key = template.structural_key()
        existing = self._by_key.get(key)
        if existing is not None:
            existing.occurrences.extend(template.occurrences)
            return existing
        self._by_key[key] = template
        self.templates.append(template)
        self._by_return_type.setdefault(template.return_type, []).append(template)
        return template

    def of_return_type(self, ty: MiniType) -> list[Template]:
        return self._by_return_type.get(ty, [])

    def __len__(self) -> int:
        return len(self.templates)


def build_pool(program: Program,
               target_kinds: frozenset[str] = DEFAULT_TARGET_KINDS) -> TemplatePool:
    """Mine every qualifying expression of every statement in the program.

    The whole program contributes, test functions included: tests encode
    correct usage and are a rich source of shapes.  Deduplication is
    structural; each duplicate adds an occurrence to the existing entry.
    """
    pool = TemplatePool()
    for stmt in program.statements:
        for root in direct_expressions(stmt):
            for expr in walk(root):
                if isinstance(expr, Expr) and expr.kind in target_kinds:
                    pool.add(mine_template(expr))
    return pool


def _in_scope(occurrence: SourceLocation, mp_location: SourceLocation,
              scope: str) -> bool:
    if scope == "global":
        return True
    if scope == "package":
        return occurrence.package_id == mp_location.package_id
    if scope == "local":
        return occurrence.file_id == mp_location.file_id
    raise ValueError(f"unknown scope filter {scope!r}, expected one of "
                     f"{SCOPE_FILTERS}")


def query(pool: TemplatePool, mp: ModificationPoint,
          scope: str = "package") -> list[Template]:
    """Templates usable at a modification point: return type exactly equal
    to the point's type, and at least one occurrence within the scope
    filter (same file for "local", same directory for "package")."""
    result = []
    for template in pool.of_return_type(mp.return_type):
        if any(_in_scope(occ, mp.location, scope) for occ in template.occurrences):
            result.append(template)
    return result


def template_weight(template: Template, candidates: list[Template]) -> float:
    """Support of ``template`` as a proportion of total candidate support.
    Weights over ``candidates`` sum to 1."""
    total = sum(t.support for t in candidates)
    if total == 0:
        return 0.0
    return template.support / total
