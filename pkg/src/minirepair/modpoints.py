"""Modification points: the expressions the search is allowed to rewrite.

Each suspicious statement contributes the qualifying expressions inside the
statement's own expressions (an if statement contributes from its condition
only, not from its nested body, which has its own statements).  A
modification point remembers its expression, static type, suspiciousness
weight, and the variables in scope at its location, which instantiation
later binds template placeholders to.
"""

from __future__ import annotations

from dataclasses import dataclass

from minirepair.faultloc import SuspiciousStatement
from minirepair.minilang.ast import (
    Block,
    Expr,
    FunctionDecl,
    IfStmt,
    MiniType,
    Module,
    Node,
    SourceLocation,
    VarDecl,
    direct_expressions,
    walk,
)
from minirepair.minilang.program import Program

#: Expression kinds the search may rewrite.  Literals are excluded: bare
#: constants carry no variable structure for templates to generalize.
DEFAULT_TARGET_KINDS = frozenset(
    {"BinaryOp", "UnaryOp", "Call", "VarRead", "CondExpr"})


@dataclass(frozen=True)
class TargetConfig:
    """What counts as a modification point.

    ``return_types`` of None admits every expression type; a set restricts
    points to expressions of those types.
    """

    target_kinds: frozenset[str] = DEFAULT_TARGET_KINDS
    return_types: frozenset[MiniType] | None = None

    def admits(self, expr: Expr) -> bool:
        if expr.kind not in self.target_kinds:
            return False
        if self.return_types is not None and expr.static_type not in self.return_types:
            return False
        return True


@dataclass
class ModificationPoint:
    mp_id: int
    expr: Expr
    return_type: MiniType
    target_kind: str
    #: suspiciousness of the owning statement; drives weighted selection
    weight: float
    #: name, type pairs visible at the expression, in declaration order
    scope_vars: list[tuple[str, MiniType]]
    location: SourceLocation
    #: kind tag of the expression's parent node; classifies emitted patches
    parent_kind: str


def variables_in_scope(program: Program, at: SourceLocation) -> list[tuple[str, MiniType]]:
    """Every variable readable at a source position, in declaration order:
    module variables of the file first, then parameters, then locals of each
    enclosing block, outermost first.

    Function names are not variables and are not included; parameters and
    locals of function type are.  A local is in scope only at positions
    after its declaration's last character.  Shadowing keeps the innermost
    binding: each name appears once.
    """
    module = program.module_of(at.file_id)
    fn = _innermost_function(module, at)
    collected: list[tuple[str, MiniType]] = []
    for decl in module.decls:
        if not isinstance(decl, VarDecl):
            continue
        # Positions inside functions see every module variable of the file;
        # positions inside a module initializer see only those declared above.
        if fn is not None or decl.end <= at.pos():
            collected.append((decl.name, decl.declared_type))
    if fn is not None:
        for param in fn.params:
            collected.append((param.name, param.ty))
        _collect_block_vars(fn.body, at, collected)
    by_name: dict[str, MiniType] = {}
    for name, ty in collected:
        by_name[name] = ty  # later (inner) declarations shadow earlier ones
    seen = set()
    result = []
    for name, _ in collected:
        if name not in seen:
            seen.add(name)
            result.append((name, by_name[name]))
    return result


def _innermost_function(module: Module, at: SourceLocation) -> FunctionDecl | None:
    for decl in module.decls:
        if isinstance(decl, FunctionDecl) and _contains(decl, at):
            return decl
    return None


def _contains(node: Node, at: SourceLocation) -> bool:
    return node.loc.pos() <= at.pos() <= node.end


def _collect_block_vars(block: Block, at: SourceLocation,
                        collected: list[tuple[str, MiniType]]) -> None:
    for stmt in block.stmts:
        _collect_stmt_vars(stmt, at, collected)


def _collect_stmt_vars(stmt, at: SourceLocation,
                       collected: list[tuple[str, MiniType]]) -> None:
    if isinstance(stmt, VarDecl):
        if stmt.end <= at.pos():
            collected.append((stmt.name, stmt.declared_type))
        return
    if isinstance(stmt, Block):
        if _contains(stmt, at):
            _collect_block_vars(stmt, at, collected)
        return
    if not _contains(stmt, at):
        return
    # Descend into the branch that holds the position: block bodies and
    # else-if chains.
    for child in stmt.children():
        if isinstance(child, (Block, IfStmt)) and _contains(child, at):
            _collect_stmt_vars(child, at, collected)


def extract_modification_points(
        suspicious: list[SuspiciousStatement], program: Program,
        config: TargetConfig = TargetConfig()) -> list[ModificationPoint]:
    """Qualifying expressions of each suspicious statement, in the given
    statement order and preorder within a statement.

    Each expression yields at most one point even when nested inside
    another qualifying expression; both the outer and the inner expression
    become separate points.
    """
    points: list[ModificationPoint] = []
    for entry in suspicious:
        stmt = program.node(entry.node_id)
        for root in direct_expressions(stmt):
            for expr in walk(root):
                if not isinstance(expr, Expr) or not config.admits(expr):
                    continue
                parent = program.parent_of(expr)
                points.append(ModificationPoint(
                    mp_id=len(points),
                    expr=expr,
                    return_type=expr.static_type,
                    target_kind=expr.kind,
                    weight=entry.suspiciousness,
                    scope_vars=variables_in_scope(program, expr.loc),
                    location=expr.loc,
                    parent_kind=parent.kind if parent is not None else "?",
                ))
    return points
