"""AST node and static type definitions for Mini.

Nodes are plain dataclasses with identity equality (``eq=False``): the same
expression text can occur at many places in a program and each occurrence is
a distinct node.  Structural comparison is explicit via
:func:`structurally_equal`.

Every node carries a source location (``loc``) and the position of its last
character (``end``, filled in by the parser), which lets scope queries decide
whether a declaration precedes a given point without re-walking the token
stream.  After assembly each node also has a unique ``node_id``; after type
checking each expression has a ``static_type``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, fields
from typing import ClassVar, Iterator, Optional, Union


# ---------------------------------------------------------------------------
# Source locations


@dataclass(frozen=True, order=True)
class SourceLocation:
    """A 1-based position of a construct's first character in a project file."""

    file_id: str
    package_id: str
    line: int
    column: int

    def pos(self) -> tuple[int, int]:
        return (self.line, self.column)

    def __str__(self) -> str:
        return f"{self.file_id}:{self.line}:{self.column}"


# ---------------------------------------------------------------------------
# Static types


@dataclass(frozen=True)
class MiniType:
    """Base class for Mini static types.  Equality is structural."""

    def spelling(self) -> str:
        raise NotImplementedError

    def placeholder_name(self) -> str:
        """Short name used when rendering typed placeholders."""
        raise NotImplementedError


@dataclass(frozen=True)
class BaseType(MiniType):
    name: str

    def spelling(self) -> str:
        return self.name

    def placeholder_name(self) -> str:
        return self.name


@dataclass(frozen=True)
class FunType(MiniType):
    """Structural function type: ``(Int, Float) -> Bool``."""

    params: tuple[MiniType, ...]
    ret: MiniType

    def spelling(self) -> str:
        inner = ", ".join(p.spelling() for p in self.params)
        return f"({inner}) -> {self.ret.spelling()}"

    def placeholder_name(self) -> str:
        return "Fun"


INT = BaseType("Int")
FLOAT = BaseType("Float")
BOOL = BaseType("Bool")
STRING = BaseType("String")
# Internal only: the type of calls to functions without a declared return
# type.  Not spellable in source.
VOID = BaseType("Void")

#: Types a variable or parameter may be declared with.
DECLARABLE_BASE_TYPES = {"Int": INT, "Float": FLOAT, "Bool": BOOL, "String": STRING}


# ---------------------------------------------------------------------------
# Nodes


class Node:
    """Common behaviour for all AST nodes.

    ``kind`` is a stable tag used by the repair engine to classify targets
    and patches.  ``_child_fields`` names the dataclass fields that hold
    child nodes (single node, optional node, or list of nodes), in source
    order.
    """

    kind: ClassVar[str] = "?"
    _child_fields: ClassVar[tuple[str, ...]] = ()

    loc: SourceLocation  # every concrete node declares this field

    def __post_init__(self) -> None:
        self.node_id: int = -1
        self.end: tuple[int, int] = self.loc.pos()

    def children(self) -> Iterator["Node"]:
        for name in self._child_fields:
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, list):
                yield from value
            else:
                yield value

    def replace_child(self, old: "Node", new: "Node") -> None:
        """Swap ``old`` for ``new`` in place.  ``old`` is matched by identity."""
        for name in self._child_fields:
            value = getattr(self, name)
            if value is old:
                setattr(self, name, new)
                return
            if isinstance(value, list):
                for i, item in enumerate(value):
                    if item is old:
                        value[i] = new
                        return
        raise ValueError(f"node {old!r} is not a child of {self!r}")

    def clone(self) -> "Node":
        """Deep copy of this subtree; node ids are not preserved as unique."""
        return copy.deepcopy(self)


class Expr(Node):
    """Every expression gets a ``static_type`` during type checking."""

    def __post_init__(self) -> None:
        super().__post_init__()
        self.static_type: Optional[MiniType] = None


class Stmt(Node):
    pass


@dataclass(eq=False)
class Literal(Expr):
    value: object  # int, float, bool or str, matching ty
    ty: MiniType
    loc: SourceLocation

    kind = "Literal"


@dataclass(eq=False)
class VarRead(Expr):
    name: str
    loc: SourceLocation

    kind = "VarRead"

    def __post_init__(self) -> None:
        super().__post_init__()
        # One of "param", "local", "modvar", "func", "builtin"; set by the
        # type checker.  Distinguishes true variable reads from references
        # to globally named functions.
        self.resolution: Optional[str] = None


@dataclass(eq=False)
class UnaryOp(Expr):
    op: str  # "-" or "!"
    operand: Expr
    loc: SourceLocation

    kind = "UnaryOp"
    _child_fields = ("operand",)


@dataclass(eq=False)
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr
    loc: SourceLocation

    kind = "BinaryOp"
    _child_fields = ("left", "right")


@dataclass(eq=False)
class Call(Expr):
    """A call ``callee(args...)``.

    The callee is syntactically a name but semantically an expression: it
    may read a function-typed variable.  Keeping it as a node lets template
    mining abstract function-typed variables while leaving references to
    globally declared functions concrete.
    """

    callee: VarRead
    args: list[Expr]
    loc: SourceLocation

    kind = "Call"
    _child_fields = ("callee", "args")


@dataclass(eq=False)
class CondExpr(Expr):
    """Ternary conditional ``cond ? then : else``."""

    cond: Expr
    then_expr: Expr
    else_expr: Expr
    loc: SourceLocation

    kind = "CondExpr"
    _child_fields = ("cond", "then_expr", "else_expr")


@dataclass(eq=False)
class PlaceholderExpr(Expr):
    """A typed hole in a mined template, e.g. ``_Int_0``.

    Placeholders never appear in parsed programs; they exist only inside
    template bodies, and instantiation replaces them with variable reads.
    """

    ptype: MiniType
    index: int
    loc: SourceLocation

    kind = "Placeholder"


@dataclass(eq=False)
class VarDecl(Stmt):
    """``var name: Type = init;`` at module or block level."""

    name: str
    declared_type: MiniType
    init: Expr
    loc: SourceLocation

    kind = "LocalVarDecl"
    _child_fields = ("init",)


@dataclass(eq=False)
class Assign(Stmt):
    name: str
    value: Expr
    loc: SourceLocation

    kind = "Assign"
    _child_fields = ("value",)

    def __post_init__(self) -> None:
        super().__post_init__()
        self.resolution: Optional[str] = None  # as for VarRead, set by typecheck


@dataclass(eq=False)
class ExprStmt(Stmt):
    expr: Expr
    loc: SourceLocation

    kind = "ExprStmt"
    _child_fields = ("expr",)


@dataclass(eq=False)
class ReturnStmt(Stmt):
    # Mini has no bare "return;": functions without a return type simply
    # fall off the end of their body.
    value: Expr
    loc: SourceLocation

    kind = "ReturnStmt"
    _child_fields = ("value",)


@dataclass(eq=False)
class Block(Stmt):
    stmts: list[Stmt]
    loc: SourceLocation

    kind = "Block"
    _child_fields = ("stmts",)


@dataclass(eq=False)
class IfStmt(Stmt):
    cond: Expr
    then_block: Block
    else_block: Union[Block, "IfStmt", None]
    loc: SourceLocation

    kind = "IfStmt"
    _child_fields = ("cond", "then_block", "else_block")


@dataclass(eq=False)
class WhileStmt(Stmt):
    cond: Expr
    body: Block
    loc: SourceLocation

    kind = "WhileStmt"
    _child_fields = ("cond", "body")


@dataclass(frozen=True)
class Param:
    name: str
    ty: MiniType
    loc: SourceLocation


@dataclass(eq=False)
class FunctionDecl(Node):
    name: str
    params: list[Param]
    return_type: MiniType  # VOID when no return type was declared
    body: Block
    loc: SourceLocation

    kind = "FunctionDecl"
    _child_fields = ("body",)

    @property
    def fun_type(self) -> FunType:
        return FunType(tuple(p.ty for p in self.params), self.return_type)

    @property
    def is_test(self) -> bool:
        return self.name.startswith("test_")


@dataclass(eq=False)
class Module(Node):
    """One parsed ``.mini`` file: a sequence of module variables and functions."""

    file_id: str
    package_id: str
    decls: list[Union[VarDecl, FunctionDecl]]
    loc: SourceLocation

    kind = "Module"
    _child_fields = ("decls",)


# ---------------------------------------------------------------------------
# Tree helpers


def walk(node: Node) -> Iterator[Node]:
    """Preorder traversal of ``node`` and all descendants."""
    yield node
    for child in node.children():
        yield from walk(child)


def direct_expressions(stmt: Stmt) -> list[Expr]:
    """The expressions a statement directly owns, excluding those of nested
    statements.

    This is the granularity at which statements are associated with
    expressions throughout the engine: an assignment owns its right-hand
    side, an ``if`` or ``while`` owns only its condition, and so on.  Blocks
    own nothing.
    """
    if isinstance(stmt, VarDecl):
        return [stmt.init]
    if isinstance(stmt, Assign):
        return [stmt.value]
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    if isinstance(stmt, ReturnStmt):
        return [stmt.value]
    if isinstance(stmt, (IfStmt, WhileStmt)):
        return [stmt.cond]
    return []


_NON_STRUCTURAL_FIELDS = {"loc"}


def structurally_equal(a: Node, b: Node) -> bool:
    """True when two subtrees have the same shape, names, operators, literal
    values and literal types, ignoring source locations."""
    if type(a) is not type(b):
        return False
    for f in fields(a):
        if f.name in _NON_STRUCTURAL_FIELDS:
            continue
        va, vb = getattr(a, f.name), getattr(b, f.name)
        if isinstance(va, Node):
            if not isinstance(vb, Node) or not structurally_equal(va, vb):
                return False
        elif isinstance(va, list):
            if len(va) != len(vb):
                return False
            for xa, xb in zip(va, vb):
                if isinstance(xa, Node):
                    if not structurally_equal(xa, xb):
                        return False
                elif xa != xb:
                    return False
        elif va != vb:
            return False
    return True
