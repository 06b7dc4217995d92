"""Recursive-descent parser for Mini.

Parsing collects as many syntax errors as it can: a malformed statement or
declaration is reported, the token stream is resynchronized at the next
statement boundary, and parsing continues.  :func:`parse_module` raises
:class:`ParseFailure` with every collected error if there was at least one.
"""

from __future__ import annotations

from dataclasses import dataclass

from minirepair.minilang.ast import (
    DECLARABLE_BASE_TYPES,
    BOOL,
    FLOAT,
    INT,
    STRING,
    VOID,
    Assign,
    BinaryOp,
    Block,
    Call,
    CondExpr,
    Expr,
    ExprStmt,
    FunType,
    FunctionDecl,
    IfStmt,
    Literal,
    MiniType,
    Module,
    Param,
    ReturnStmt,
    SourceLocation,
    Stmt,
    UnaryOp,
    VarDecl,
    VarRead,
    WhileStmt,
)
from minirepair.minilang.lexer import Token, tokenize


@dataclass(frozen=True)
class ParseError:
    location: SourceLocation
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


class ParseFailure(Exception):
    """Raised when a source file contains one or more syntax errors."""

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


class _Bail(Exception):
    """Internal: unwinds to the nearest recovery point."""


# Binary operator precedence, loosest first.
_BINARY_LEVELS = [
    ["||"],
    ["&&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["+", "-"],
    ["*", "/", "%"],
]

_STMT_SYNC = {";", "}", "fun", "var", "if", "while", "return", "EOF"}
_TOP_SYNC = {"fun", "var", "EOF"}


class _Parser:
    def __init__(self, tokens: list[Token], file_id: str, package_id: str):
        self.tokens = tokens
        self.pos = 0
        self.file_id = file_id
        self.package_id = package_id
        self.errors: list[ParseError] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, ttype: str) -> bool:
        return self.peek().type == ttype

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def expect(self, ttype: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.type != ttype:
            found = tok.value if tok.type != "EOF" else "end of file"
            context = f" {what}" if what else ""
            self.error(tok, f"expected '{ttype}'{context}, found '{found}'")
        return self.advance()

    def loc_of(self, tok: Token) -> SourceLocation:
        return SourceLocation(self.file_id, self.package_id, tok.line, tok.col)

    def error(self, tok: Token, message: str) -> None:
        self.errors.append(ParseError(self.loc_of(tok), message))
        raise _Bail()

    def prev_end(self) -> tuple[int, int]:
        tok = self.tokens[max(self.pos - 1, 0)]
        return (tok.end_line, tok.end_col)

    def finish(self, node):
        node.end = self.prev_end()
        return node

    def synchronize(self, sync: set[str], entry_pos: int) -> None:
        while self.peek().type not in sync:
            self.advance()
        if self.at(";"):
            self.advance()
        # The offending token may itself be a sync token; force progress so
        # recovery cannot retry the exact same parse.
        if self.pos == entry_pos and not self.at("EOF"):
            self.advance()

    # -- declarations ------------------------------------------------------

    def parse_module(self) -> Module:
        first = self.peek()
        decls: list = []
        while not self.at("EOF"):
            entry = self.pos
            try:
                if self.at("fun"):
                    decls.append(self.parse_function())
                elif self.at("var"):
                    decls.append(self.parse_var_decl())
                else:
                    self.error(self.peek(), "expected 'fun' or 'var' at top level")
            except _Bail:
                self.synchronize(_TOP_SYNC, entry)
        module = Module(self.file_id, self.package_id, decls, self.loc_of(first))
        return self.finish(module)

    def parse_function(self) -> FunctionDecl:
        start = self.expect("fun")
        name = self.expect("IDENT", "for function name")
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            while True:
                pname = self.expect("IDENT", "for parameter name")
                self.expect(":", "after parameter name")
                pty = self.parse_type()
                params.append(Param(pname.value, pty, self.loc_of(pname)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        ret: MiniType = VOID
        if self.at(":"):
            self.advance()
            ret = self.parse_type()
        body = self.parse_block()
        fn = FunctionDecl(name.value, params, ret, body, self.loc_of(start))
        return self.finish(fn)

    def parse_var_decl(self) -> VarDecl:
        start = self.expect("var")
        name = self.expect("IDENT", "for variable name")
        self.expect(":", "after variable name")
        ty = self.parse_type()
        self.expect("=", "before initializer")
        init = self.parse_expr()
        self.expect(";")
        return self.finish(VarDecl(name.value, ty, init, self.loc_of(start)))

    def parse_type(self) -> MiniType:
        tok = self.peek()
        if tok.type == "IDENT":
            ty = DECLARABLE_BASE_TYPES.get(tok.value)
            if ty is None:
                self.error(tok, f"unknown type '{tok.value}'")
            self.advance()
            return ty
        if tok.type == "(":
            self.advance()
            params: list[MiniType] = []
            if not self.at(")"):
                while True:
                    params.append(self.parse_type())
                    if not self.at(","):
                        break
                    self.advance()
            self.expect(")")
            self.expect("->", "in function type")
            ret = self.parse_type()
            return FunType(tuple(params), ret)
        self.error(tok, f"expected a type, found '{tok.value or tok.type}'")
        raise AssertionError  # unreachable, error() always raises

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> Block:
        start = self.expect("{")
        stmts: list[Stmt] = []
        while not self.at("}") and not self.at("EOF"):
            entry = self.pos
            try:
                stmts.append(self.parse_stmt())
            except _Bail:
                self.synchronize(_STMT_SYNC, entry)
        self.expect("}")
        return self.finish(Block(stmts, self.loc_of(start)))

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.type == "var":
            return self.parse_var_decl()
        if tok.type == "if":
            return self.parse_if()
        if tok.type == "while":
            start = self.advance()
            self.expect("(", "after 'while'")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_block()
            return self.finish(WhileStmt(cond, body, self.loc_of(start)))
        if tok.type == "return":
            start = self.advance()
            value = self.parse_expr()
            self.expect(";")
            return self.finish(ReturnStmt(value, self.loc_of(start)))
        if tok.type == "{":
            return self.parse_block()
        if tok.type == "IDENT" and self.peek(1).type == "=":
            name = self.advance()
            self.advance()
            value = self.parse_expr()
            self.expect(";")
            return self.finish(Assign(name.value, value, self.loc_of(name)))
        expr = self.parse_expr()
        self.expect(";")
        stmt = ExprStmt(expr, SourceLocation(self.file_id, self.package_id,
                                             tok.line, tok.col))
        return self.finish(stmt)

    def parse_if(self) -> IfStmt:
        start = self.expect("if")
        self.expect("(", "after 'if'")
        cond = self.parse_expr()
        self.expect(")")
        then_block = self.parse_block()
        else_block = None
        if self.at("else"):
            self.advance()
            if self.at("if"):
                else_block = self.parse_if()
            else:
                else_block = self.parse_block()
        return self.finish(IfStmt(cond, then_block, else_block, self.loc_of(start)))

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_binary(0)
        if not self.at("?"):
            return cond
        self.advance()
        then_expr = self.parse_expr()
        self.expect(":", "in conditional expression")
        else_expr = self.parse_expr()
        return self.finish(CondExpr(cond, then_expr, else_expr, cond.loc))

    def parse_binary(self, level: int) -> Expr:
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        expr = self.parse_binary(level + 1)
        while self.peek().type in _BINARY_LEVELS[level]:
            op = self.advance()
            right = self.parse_binary(level + 1)
            expr = self.finish(BinaryOp(op.value, expr, right, expr.loc))
        return expr

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.type in ("-", "!"):
            self.advance()
            operand = self.parse_unary()
            return self.finish(UnaryOp(tok.value, operand, self.loc_of(tok)))
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.type == "INT":
            self.advance()
            return self.finish(Literal(int(tok.value), INT, self.loc_of(tok)))
        if tok.type == "FLOAT":
            self.advance()
            return self.finish(Literal(float(tok.value), FLOAT, self.loc_of(tok)))
        if tok.type == "STRING":
            self.advance()
            return self.finish(Literal(tok.value, STRING, self.loc_of(tok)))
        if tok.type in ("true", "false"):
            self.advance()
            return self.finish(Literal(tok.type == "true", BOOL, self.loc_of(tok)))
        if tok.type == "IDENT":
            self.advance()
            if self.at("("):
                self.advance()
                args: list[Expr] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.at(","):
                            break
                        self.advance()
                self.expect(")")
                callee = VarRead(tok.value, self.loc_of(tok))
                callee.end = (tok.end_line, tok.end_col)
                return self.finish(Call(callee, args, self.loc_of(tok)))
            read = VarRead(tok.value, self.loc_of(tok))
            return self.finish(read)
        if tok.type == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            expr.end = self.prev_end()
            return expr
        found = tok.value if tok.type != "EOF" else "end of file"
        self.error(tok, f"expected an expression, found '{found}'")
        raise AssertionError  # unreachable


def parse_module(text: str, file_id: str = "main.mini", package_id: str = ".") -> Module:
    """Parse one file's source text.  Raises ParseFailure on any syntax error."""
    tokens, lex_errors = tokenize(text)
    parser = _Parser(tokens, file_id, package_id)
    module = parser.parse_module()
    errors = [ParseError(SourceLocation(file_id, package_id, e.line, e.col), e.message)
              for e in lex_errors]
    errors.extend(parser.errors)
    if errors:
        errors.sort(key=lambda e: (e.location.line, e.location.column))
        raise ParseFailure(errors)
    return module


def parse_expression(text: str, file_id: str = "<expr>", package_id: str = ".") -> Expr:
    """Parse a standalone expression, e.g. a patched snippet from a report."""
    tokens, lex_errors = tokenize(text)
    parser = _Parser(tokens, file_id, package_id)
    try:
        expr = parser.parse_expr()
        if not parser.at("EOF"):
            parser.error(parser.peek(), "trailing input after expression")
    except _Bail:
        pass
    errors = [ParseError(SourceLocation(file_id, package_id, e.line, e.col), e.message)
              for e in lex_errors]
    errors.extend(parser.errors)
    if errors:
        raise ParseFailure(errors)
    return expr
