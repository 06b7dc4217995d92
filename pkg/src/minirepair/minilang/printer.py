"""Source and s-expression rendering of Mini ASTs.

``to_source`` produces canonical source text: single spaces around binary
operators, parentheses only where precedence requires them.  Canonical text
is what patch reports store and compare, so two expressions render equal
exactly when they are structurally equal.
"""

from __future__ import annotations

from minirepair.minilang.ast import (
    Assign,
    BinaryOp,
    Block,
    Call,
    CondExpr,
    Expr,
    ExprStmt,
    FunctionDecl,
    IfStmt,
    Literal,
    Module,
    Node,
    PlaceholderExpr,
    ReturnStmt,
    Stmt,
    UnaryOp,
    VOID,
    VarDecl,
    VarRead,
    WhileStmt,
)

_TERNARY_PREC = 1
_UNARY_PREC = 8
_ATOM_PREC = 9

_BINARY_PREC = {
    "||": 2, "&&": 3,
    "==": 4, "!=": 4,
    "<": 5, "<=": 5, ">": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7, "%": 7,
}

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def _quote(s: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(ch, ch) for ch in s) + '"'


def _float_text(value: float) -> str:
    # repr() round-trips; normalize the exponent-free cases Mini can parse.
    text = repr(value)
    return text


def _literal_text(node: Literal) -> str:
    if node.ty.spelling() == "Bool":
        return "true" if node.value else "false"
    if node.ty.spelling() == "String":
        return _quote(str(node.value))
    if node.ty.spelling() == "Float":
        return _float_text(float(node.value))
    return str(node.value)


def _expr(node: Expr) -> tuple[str, int]:
    """Render an expression, returning (text, precedence of its top node)."""
    if isinstance(node, Literal):
        return _literal_text(node), _ATOM_PREC
    if isinstance(node, VarRead):
        return node.name, _ATOM_PREC
    if isinstance(node, PlaceholderExpr):
        return f"_{node.ptype.placeholder_name()}_{node.index}", _ATOM_PREC
    if isinstance(node, Call):
        callee, _ = _expr(node.callee)
        args = ", ".join(_expr(a)[0] for a in node.args)
        return f"{callee}({args})", _ATOM_PREC
    if isinstance(node, UnaryOp):
        text, prec = _expr(node.operand)
        if prec < _UNARY_PREC:
            text = f"({text})"
        return f"{node.op}{text}", _UNARY_PREC
    if isinstance(node, BinaryOp):
        my = _BINARY_PREC[node.op]
        left, lp = _expr(node.left)
        right, rp = _expr(node.right)
        if lp < my:
            left = f"({left})"
        if rp <= my:  # binary operators associate left
            right = f"({right})"
        return f"{left} {node.op} {right}", my
    if isinstance(node, CondExpr):
        cond, cp = _expr(node.cond)
        if cp <= _TERNARY_PREC:
            cond = f"({cond})"
        then_text, _ = _expr(node.then_expr)
        else_text, _ = _expr(node.else_expr)
        return f"{cond} ? {then_text} : {else_text}", _TERNARY_PREC
    raise TypeError(f"not an expression node: {node!r}")


def to_source(node: Node, indent: int = 0) -> str:
    """Canonical source text for any node."""
    if isinstance(node, Expr):
        return _expr(node)[0]
    if isinstance(node, Stmt):
        return "\n".join(_stmt_lines(node, indent))
    if isinstance(node, FunctionDecl):
        return "\n".join(_function_lines(node, indent))
    if isinstance(node, Module):
        chunks = [to_source(d, indent) for d in node.decls]
        return "\n\n".join(chunks) + ("\n" if chunks else "")
    raise TypeError(f"cannot print {node!r}")


def statement_source(stmt: Stmt) -> str:
    """One statement rendered without leading indentation."""
    return to_source(stmt, 0)


def _pad(indent: int) -> str:
    return "    " * indent


def _stmt_lines(stmt: Stmt, indent: int) -> list[str]:
    pad = _pad(indent)
    if isinstance(stmt, VarDecl):
        return [f"{pad}var {stmt.name}: {stmt.declared_type.spelling()} = "
                f"{to_source(stmt.init)};"]
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.name} = {to_source(stmt.value)};"]
    if isinstance(stmt, ExprStmt):
        return [f"{pad}{to_source(stmt.expr)};"]
    if isinstance(stmt, ReturnStmt):
        return [f"{pad}return {to_source(stmt.value)};"]
    if isinstance(stmt, Block):
        return [f"{pad}{{", *_block_body(stmt, indent + 1), f"{pad}}}"]
    if isinstance(stmt, IfStmt):
        lines = [f"{pad}if ({to_source(stmt.cond)}) {{",
                 *_block_body(stmt.then_block, indent + 1)]
        if stmt.else_block is None:
            lines.append(f"{pad}}}")
        elif isinstance(stmt.else_block, IfStmt):
            nested = _stmt_lines(stmt.else_block, indent)
            lines.append(f"{pad}}} else " + nested[0][len(pad):])
            lines.extend(nested[1:])
        else:
            lines.append(f"{pad}}} else {{")
            lines.extend(_block_body(stmt.else_block, indent + 1))
            lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, WhileStmt):
        return [f"{pad}while ({to_source(stmt.cond)}) {{",
                *_block_body(stmt.body, indent + 1),
                f"{pad}}}"]
    raise TypeError(f"not a statement node: {stmt!r}")


def _block_body(block: Block, indent: int) -> list[str]:
    lines: list[str] = []
    for s in block.stmts:
        lines.extend(_stmt_lines(s, indent))
    return lines


def _function_lines(fn: FunctionDecl, indent: int) -> list[str]:
    pad = _pad(indent)
    params = ", ".join(f"{p.name}: {p.ty.spelling()}" for p in fn.params)
    ret = "" if fn.return_type == VOID else f": {fn.return_type.spelling()}"
    return [f"{pad}fun {fn.name}({params}){ret} {{",
            *_block_body(fn.body, indent + 1),
            f"{pad}}}"]


# ---------------------------------------------------------------------------
# S-expressions (used for golden parse tests and structural keys)


def to_sexpr(node: Node, locations: bool = True) -> str:
    """A stable, human-diffable serialization of a subtree."""
    return "\n".join(_sexpr_lines(node, 0, locations))


def _at(node: Node, locations: bool) -> str:
    return f" @{node.loc.line}:{node.loc.column}" if locations else ""


def _sexpr_lines(node: Node, depth: int, locs: bool) -> list[str]:
    pad = "  " * depth
    at = _at(node, locs)

    def nested(head: str, children: list[Node]) -> list[str]:
        lines = [f"{pad}({head}{at}"]
        for child in children:
            lines.extend(_sexpr_lines(child, depth + 1, locs))
        lines[-1] += ")"
        return lines

    if isinstance(node, Literal):
        return [f"{pad}(Literal {node.ty.spelling()} {_literal_text(node)}{at})"]
    if isinstance(node, VarRead):
        return [f"{pad}(VarRead {node.name}{at})"]
    if isinstance(node, PlaceholderExpr):
        return [f"{pad}(Placeholder {node.ptype.spelling()} {node.index}{at})"]
    if isinstance(node, UnaryOp):
        return nested(f'UnaryOp "{node.op}"', [node.operand])
    if isinstance(node, BinaryOp):
        return nested(f'BinaryOp "{node.op}"', [node.left, node.right])
    if isinstance(node, Call):
        return nested("Call", [node.callee, *node.args])
    if isinstance(node, CondExpr):
        return nested("CondExpr", [node.cond, node.then_expr, node.else_expr])
    if isinstance(node, VarDecl):
        return nested(f"LocalVarDecl {node.name} {node.declared_type.spelling()}",
                      [node.init])
    if isinstance(node, Assign):
        return nested(f"Assign {node.name}", [node.value])
    if isinstance(node, ExprStmt):
        return nested("ExprStmt", [node.expr])
    if isinstance(node, ReturnStmt):
        return nested("ReturnStmt", [node.value])
    if isinstance(node, Block):
        return nested("Block", list(node.stmts))
    if isinstance(node, IfStmt):
        children = [node.cond, node.then_block]
        if node.else_block is not None:
            children.append(node.else_block)
        return nested("IfStmt", children)
    if isinstance(node, WhileStmt):
        return nested("WhileStmt", [node.cond, node.body])
    if isinstance(node, FunctionDecl):
        params = " ".join(f"({p.name} {p.ty.spelling()})" for p in node.params)
        head = f"FunctionDecl {node.name} ({params}) {node.return_type.spelling()}"
        return nested(head, [node.body])
    if isinstance(node, Module):
        return nested(f"Module {node.file_id}", list(node.decls))
    raise TypeError(f"cannot serialize {node!r}")
