"""Static type checking and name resolution for Mini programs.

Checking annotates every expression node with ``static_type`` and every
name reference with how it resolved ("param", "local", "modvar", "func",
or "builtin").  All errors in a program are collected before
:class:`TypeCheckFailure` is raised.

Scope rules:

* Functions are global to the whole project and may be referenced from any
  file, including before their declaration.
* A module variable is visible anywhere in its own file, except that the
  initializer of a module variable sees only module variables declared
  above it.
* Parameters and locals are lexically scoped within their function; a
  declaration is visible from the statement after it to the end of its
  block and may shadow outer names.  Duplicate names within one scope are
  errors, as is a parameter list naming the same parameter twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from minirepair.minilang.ast import (
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
    PlaceholderExpr,
    ReturnStmt,
    SourceLocation,
    Stmt,
    UnaryOp,
    VarDecl,
    VarRead,
    WhileStmt,
)

ASSERT_TYPE = FunType((BOOL,), VOID)

_NUMERIC = (INT, FLOAT)
_EQUALITY_TYPES = (INT, FLOAT, BOOL, STRING)
_ORDERED = (INT, FLOAT)


@dataclass(frozen=True)
class TypeCheckError:
    location: SourceLocation
    message: str
    expected: Optional[str] = None
    found: Optional[str] = None

    def __str__(self) -> str:
        detail = ""
        if self.expected is not None:
            detail = f" (expected {self.expected}, found {self.found})"
        return f"{self.location}: {self.message}{detail}"


class TypeCheckFailure(Exception):
    def __init__(self, errors: list[TypeCheckError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


@dataclass
class _FileEnv:
    modvars: dict[str, MiniType] = field(default_factory=dict)


class _Checker:
    def __init__(self, modules: list[Module]):
        self.modules = modules
        self.errors: list[TypeCheckError] = []
        self.functions: dict[str, FunctionDecl] = {}
        self.file_envs: dict[str, _FileEnv] = {}

    # -- error helpers -------------------------------------------------------

    def error(self, loc: SourceLocation, message: str,
              expected: Optional[MiniType] = None,
              found: Optional[MiniType] = None) -> None:
        self.errors.append(TypeCheckError(
            loc, message,
            expected.spelling() if expected is not None else None,
            found.spelling() if found is not None else None))

    def mismatch(self, loc: SourceLocation, message: str,
                 expected: MiniType, found: MiniType) -> None:
        self.error(loc, message, expected, found)

    # -- entry ---------------------------------------------------------------

    def check(self) -> None:
        for module in self.modules:
            self.file_envs[module.file_id] = _FileEnv()
            for decl in module.decls:
                if isinstance(decl, FunctionDecl):
                    if decl.name in self.functions:
                        other = self.functions[decl.name]
                        self.error(decl.loc,
                                   f"function '{decl.name}' already declared "
                                   f"at {other.loc}")
                    else:
                        self.functions[decl.name] = decl
        for module in self.modules:
            self.check_module(module)

    def check_module(self, module: Module) -> None:
        env = self.file_envs[module.file_id]
        for decl in module.decls:
            if isinstance(decl, VarDecl):
                # The initializer sees only module variables declared above.
                self.current_file = module.file_id
                self.scopes = []
                self.params = {}
                self.check_var_decl_into(decl, env.modvars, "module variable")
        for decl in module.decls:
            if isinstance(decl, FunctionDecl):
                self.check_function(decl, module)

    def check_var_decl_into(self, decl: VarDecl, scope: dict[str, MiniType],
                            what: str) -> None:
        found = self.check_expr(decl.init)
        if found is not None and found != decl.declared_type:
            self.mismatch(decl.init.loc, f"initializer for '{decl.name}'",
                          decl.declared_type, found)
        if decl.name in scope:
            self.error(decl.loc, f"duplicate {what} '{decl.name}'")
        else:
            scope[decl.name] = decl.declared_type

    def check_function(self, fn: FunctionDecl, module: Module) -> None:
        self.current_file = module.file_id
        self.params = {}
        self.scopes = [{}]
        self.return_type = fn.return_type
        for p in fn.params:
            if p.name in self.params:
                self.error(p.loc, f"duplicate parameter '{p.name}'")
            self.params[p.name] = p.ty
        if fn.is_test and fn.params:
            self.error(fn.loc, f"test function '{fn.name}' must not take parameters")
        for stmt in fn.body.stmts:
            self.check_stmt(stmt)

    # -- statements ------------------------------------------------------------

    def check_stmt(self, stmt: Stmt) -> None:
        if isinstance(stmt, VarDecl):
            self.check_var_decl_into(stmt, self.scopes[-1], "local variable")
        elif isinstance(stmt, Assign):
            found = self.check_expr(stmt.value)
            target = self.resolve_assign_target(stmt)
            if target is not None and found is not None and found != target:
                self.mismatch(stmt.value.loc, f"assignment to '{stmt.name}'",
                              target, found)
        elif isinstance(stmt, ExprStmt):
            self.check_expr(stmt.expr)
        elif isinstance(stmt, ReturnStmt):
            found = self.check_expr(stmt.value)
            if self.return_type == VOID:
                self.error(stmt.loc, "cannot return a value from a function "
                                     "with no declared return type")
            elif found is not None and found != self.return_type:
                self.mismatch(stmt.value.loc, "return value",
                              self.return_type, found)
        elif isinstance(stmt, IfStmt):
            self.check_condition(stmt.cond, "'if' condition")
            self.check_block(stmt.then_block)
            if isinstance(stmt.else_block, Block):
                self.check_block(stmt.else_block)
            elif isinstance(stmt.else_block, IfStmt):
                self.check_stmt(stmt.else_block)
        elif isinstance(stmt, WhileStmt):
            self.check_condition(stmt.cond, "'while' condition")
            self.check_block(stmt.body)
        elif isinstance(stmt, Block):
            self.check_block(stmt)
        else:
            raise TypeError(f"unexpected statement {stmt!r}")

    def check_block(self, block: Block) -> None:
        self.scopes.append({})
        for stmt in block.stmts:
            self.check_stmt(stmt)
        self.scopes.pop()

    def check_condition(self, cond: Expr, what: str) -> None:
        found = self.check_expr(cond)
        if found is not None and found != BOOL:
            self.mismatch(cond.loc, what, BOOL, found)

    def resolve_assign_target(self, stmt: Assign) -> Optional[MiniType]:
        for scope in reversed(self.scopes):
            if stmt.name in scope:
                stmt.resolution = "local"
                return scope[stmt.name]
        if stmt.name in self.params:
            stmt.resolution = "param"
            return self.params[stmt.name]
        modvars = self.file_envs[self.current_file].modvars
        if stmt.name in modvars:
            stmt.resolution = "modvar"
            return modvars[stmt.name]
        if stmt.name in self.functions:
            self.error(stmt.loc, f"cannot assign to function '{stmt.name}'")
        else:
            self.error(stmt.loc, f"assignment to undeclared variable '{stmt.name}'")
        return None

    # -- expressions ------------------------------------------------------------

    def check_expr(self, expr: Expr) -> Optional[MiniType]:
        """Returns the expression's type, or None if it failed to check.
        Annotates ``expr.static_type`` on success."""
        ty = self._infer(expr)
        expr.static_type = ty
        return ty

    def _infer(self, expr: Expr) -> Optional[MiniType]:
        if isinstance(expr, Literal):
            return expr.ty
        if isinstance(expr, PlaceholderExpr):
            return expr.ptype
        if isinstance(expr, VarRead):
            return self.resolve_read(expr)
        if isinstance(expr, UnaryOp):
            return self.check_unary(expr)
        if isinstance(expr, BinaryOp):
            return self.check_binary(expr)
        if isinstance(expr, CondExpr):
            return self.check_cond_expr(expr)
        if isinstance(expr, Call):
            return self.check_call(expr)
        raise TypeError(f"unexpected expression {expr!r}")

    def resolve_read(self, expr: VarRead) -> Optional[MiniType]:
        for scope in reversed(self.scopes):
            if expr.name in scope:
                expr.resolution = "local"
                return scope[expr.name]
        if expr.name in self.params:
            expr.resolution = "param"
            return self.params[expr.name]
        modvars = self.file_envs[self.current_file].modvars
        if expr.name in modvars:
            expr.resolution = "modvar"
            return modvars[expr.name]
        if expr.name in self.functions:
            expr.resolution = "func"
            return self.functions[expr.name].fun_type
        self.error(expr.loc, f"undeclared name '{expr.name}'")
        return None

    def check_unary(self, expr: UnaryOp) -> Optional[MiniType]:
        found = self.check_expr(expr.operand)
        if found is None:
            return None
        if expr.op == "-":
            if found in _NUMERIC:
                return found
            self.error(expr.loc, "operand of unary '-' must be Int or Float",
                       found=found)
        elif expr.op == "!":
            if found == BOOL:
                return BOOL
            self.mismatch(expr.loc, "operand of '!'", BOOL, found)
        return None

    def check_binary(self, expr: BinaryOp) -> Optional[MiniType]:
        lt = self.check_expr(expr.left)
        rt = self.check_expr(expr.right)
        if lt is None or rt is None:
            return None
        op = expr.op
        if op in ("&&", "||"):
            ok = lt == BOOL and rt == BOOL
            if not ok:
                self.mismatch(expr.loc, f"operands of '{op}'", BOOL,
                              lt if lt != BOOL else rt)
                return None
            return BOOL
        if op in ("==", "!="):
            if lt != rt or lt not in _EQUALITY_TYPES:
                self.error(expr.loc, f"cannot compare {lt.spelling()} "
                                     f"and {rt.spelling()} with '{op}'")
                return None
            return BOOL
        if op in ("<", "<=", ">", ">="):
            if lt != rt or lt not in _ORDERED:
                self.error(expr.loc, f"cannot order {lt.spelling()} "
                                     f"and {rt.spelling()} with '{op}'")
                return None
            return BOOL
        if op == "+":
            if lt == rt and lt in (INT, FLOAT, STRING):
                return lt
            self.error(expr.loc, f"cannot add {lt.spelling()} and {rt.spelling()}")
            return None
        if op in ("-", "*", "/"):
            if lt == rt and lt in _NUMERIC:
                return lt
            self.error(expr.loc, f"operands of '{op}' must both be Int "
                                 f"or both Float, found {lt.spelling()} "
                                 f"and {rt.spelling()}")
            return None
        if op == "%":
            if lt == INT and rt == INT:
                return INT
            self.error(expr.loc, f"operands of '%' must be Int, found "
                                 f"{lt.spelling()} and {rt.spelling()}")
            return None
        raise ValueError(f"unknown operator {op!r}")

    def check_cond_expr(self, expr: CondExpr) -> Optional[MiniType]:
        self.check_condition(expr.cond, "conditional expression condition")
        tt = self.check_expr(expr.then_expr)
        et = self.check_expr(expr.else_expr)
        if tt is None or et is None:
            return None
        if tt != et:
            self.mismatch(expr.else_expr.loc,
                          "conditional expression arms must have the same type",
                          tt, et)
            return None
        if tt == VOID:
            self.error(expr.loc, "conditional expression arms cannot be calls "
                                 "to functions with no return type")
            return None
        return tt

    def check_call(self, expr: Call) -> Optional[MiniType]:
        callee = expr.callee
        fun_type = self.resolve_callee(callee)
        arg_types = [self.check_expr(a) for a in expr.args]
        if fun_type is None:
            return None
        if len(expr.args) != len(fun_type.params):
            self.error(expr.loc,
                       f"'{callee.name}' expects {len(fun_type.params)} "
                       f"argument(s), got {len(expr.args)}")
            return None
        ok = True
        for i, (arg, want, got) in enumerate(zip(expr.args, fun_type.params,
                                                 arg_types)):
            if got is not None and got != want:
                self.mismatch(arg.loc, f"argument {i + 1} of '{callee.name}'",
                              want, got)
                ok = False
        return fun_type.ret if ok else None

    def resolve_callee(self, callee: VarRead) -> Optional[FunType]:
        # A call's callee resolves like any name, except that the builtin
        # assert is visible everywhere and callable only.
        for scope in reversed(self.scopes):
            if callee.name in scope:
                ty = scope[callee.name]
                return self.callee_var(callee, ty, "local")
        if callee.name in self.params:
            return self.callee_var(callee, self.params[callee.name], "param")
        modvars = self.file_envs[self.current_file].modvars
        if callee.name in modvars:
            return self.callee_var(callee, modvars[callee.name], "modvar")
        if callee.name in self.functions:
            callee.resolution = "func"
            ty = self.functions[callee.name].fun_type
            callee.static_type = ty
            return ty
        if callee.name == "assert":
            callee.resolution = "builtin"
            callee.static_type = ASSERT_TYPE
            return ASSERT_TYPE
        self.error(callee.loc, f"call to undeclared function '{callee.name}'")
        return None

    def callee_var(self, callee: VarRead, ty: MiniType,
                   resolution: str) -> Optional[FunType]:
        if not isinstance(ty, FunType):
            self.error(callee.loc,
                       f"'{callee.name}' is not callable (type {ty.spelling()})")
            return None
        callee.resolution = resolution
        callee.static_type = ty
        return ty


def typecheck(program) -> None:
    """Check a whole program (a ``Program`` or a list of modules) in place.

    Raises TypeCheckFailure listing every error found.
    """
    modules = program.modules if hasattr(program, "modules") else program
    checker = _Checker(list(modules))
    checker.check()
    if checker.errors:
        checker.errors.sort(key=lambda e: (e.location.file_id, e.location.line,
                                           e.location.column))
        raise TypeCheckFailure(checker.errors)
