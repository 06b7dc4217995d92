"""Tree-walking interpreter and test runner for Mini programs.

Execution is metered: every statement and expression evaluation costs one
step, and exceeding the step budget aborts the current test as a failure
("timeout").  This is what keeps candidate patches that introduce infinite
loops from hanging validation.

Tests are the functions named ``test_*``.  Each test runs in a fresh
environment (module variables are re-initialized), so tests are isolated
and their outcomes do not depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

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
    PlaceholderExpr,
    ReturnStmt,
    SourceLocation,
    Stmt,
    UnaryOp,
    VOID,
    VarDecl,
    VarRead,
    WhileStmt,
)
from minirepair.minilang.program import Program

DEFAULT_STEP_BUDGET = 1_000_000
MAX_CALL_DEPTH = 200


class MiniRuntimeError(Exception):
    def __init__(self, location: SourceLocation, message: str):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}")


class AssertFailure(MiniRuntimeError):
    pass


class StepLimitExceeded(Exception):
    """The step budget ran out; the test is treated as a failure."""


class _Return(Exception):
    def __init__(self, value):
        self.value = value


@dataclass(frozen=True)
class TestCase:
    name: str
    body: FunctionDecl
    package_id: str


@dataclass(frozen=True)
class TestOutcome:
    name: str
    passed: bool
    reason: Optional[str] = None


@dataclass
class TestReport:
    outcomes: list[TestOutcome]
    #: test name -> ids of statements executed at least once by that test
    coverage: dict[str, frozenset[int]] = field(default_factory=dict)
    program: Optional[Program] = None

    @property
    def n_passed(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    @property
    def n_failed(self) -> int:
        return len(self.outcomes) - self.n_passed

    def failing_names(self) -> list[str]:
        return [o.name for o in self.outcomes if not o.passed]

    def passing_names(self) -> list[str]:
        return [o.name for o in self.outcomes if o.passed]


def collect_tests(program: Program) -> list[TestCase]:
    """All test functions, in node-id (file, then position) order."""
    tests = []
    for module in program.modules:
        for decl in module.decls:
            if isinstance(decl, FunctionDecl) and decl.is_test:
                tests.append(TestCase(decl.name, decl, module.package_id))
    return tests


class Interpreter:
    def __init__(self, program: Program, step_budget: int = DEFAULT_STEP_BUDGET,
                 record_coverage: bool = False):
        self.program = program
        self.step_budget = step_budget
        self.record_coverage = record_coverage
        self.steps = 0
        self.covered: set[int] = set()
        self.call_depth = 0
        # file id -> {module var name: value}; filled by reset()
        self.module_envs: dict[str, dict[str, object]] = {}

    # -- plumbing -----------------------------------------------------------

    def step(self) -> None:
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepLimitExceeded()

    def reset(self) -> None:
        """Re-initialize module variables, running their initializers."""
        self.steps = 0
        self.call_depth = 0
        self.module_envs = {m.file_id: {} for m in self.program.modules}
        for module in self.program.modules:
            for decl in module.decls:
                if isinstance(decl, VarDecl):
                    self.exec_stmt(decl, [self.module_envs[module.file_id]],
                                   module.file_id)

    def run_test(self, test: TestCase) -> TestOutcome:
        self.covered = set()
        try:
            self.reset()
            self.call_function(test.body, [])
            return TestOutcome(test.name, True)
        except AssertFailure as failure:
            return TestOutcome(test.name, False, str(failure))
        except MiniRuntimeError as error:
            return TestOutcome(test.name, False, str(error))
        except StepLimitExceeded:
            return TestOutcome(test.name, False,
                               f"step budget of {self.step_budget} exceeded")
        except RecursionError:
            return TestOutcome(test.name, False, "call depth exceeded")

    # -- execution ------------------------------------------------------------

    def call_function(self, fn: FunctionDecl, args: list) -> object:
        self.call_depth += 1
        if self.call_depth > MAX_CALL_DEPTH:
            self.call_depth -= 1
            raise MiniRuntimeError(fn.loc, f"call depth exceeds {MAX_CALL_DEPTH}")
        scopes: list[dict[str, object]] = [
            {p.name: v for p, v in zip(fn.params, args)}]
        file_id = fn.loc.file_id
        try:
            for stmt in fn.body.stmts:
                self.exec_stmt(stmt, scopes, file_id)
        except _Return as ret:
            return ret.value
        finally:
            self.call_depth -= 1
        if fn.return_type != VOID:
            raise MiniRuntimeError(
                fn.loc, f"function '{fn.name}' finished without returning")
        return None

    def exec_stmt(self, stmt: Stmt, scopes: list, file_id: str) -> None:
        self.step()
        if self.record_coverage and not isinstance(stmt, Block):
            self.covered.add(stmt.node_id)
        if isinstance(stmt, VarDecl):
            scopes[-1][stmt.name] = self.eval(stmt.init, scopes, file_id)
        elif isinstance(stmt, Assign):
            value = self.eval(stmt.value, scopes, file_id)
            self.assign(stmt, value, scopes, file_id)
        elif isinstance(stmt, ExprStmt):
            self.eval(stmt.expr, scopes, file_id)
        elif isinstance(stmt, ReturnStmt):
            raise _Return(self.eval(stmt.value, scopes, file_id))
        elif isinstance(stmt, IfStmt):
            if self.eval(stmt.cond, scopes, file_id):
                self.exec_block(stmt.then_block, scopes, file_id)
            elif isinstance(stmt.else_block, IfStmt):
                self.exec_stmt(stmt.else_block, scopes, file_id)
            elif stmt.else_block is not None:
                self.exec_block(stmt.else_block, scopes, file_id)
        elif isinstance(stmt, WhileStmt):
            while self.eval(stmt.cond, scopes, file_id):
                self.exec_block(stmt.body, scopes, file_id)
        elif isinstance(stmt, Block):
            self.exec_block(stmt, scopes, file_id)
        else:
            raise TypeError(f"unexpected statement {stmt!r}")

    def exec_block(self, block: Block, scopes: list, file_id: str) -> None:
        scopes.append({})
        try:
            for stmt in block.stmts:
                self.exec_stmt(stmt, scopes, file_id)
        finally:
            scopes.pop()

    def assign(self, stmt: Assign, value: object, scopes: list,
               file_id: str) -> None:
        for scope in reversed(scopes):
            if stmt.name in scope:
                scope[stmt.name] = value
                return
        modvars = self.module_envs[file_id]
        if stmt.name in modvars:
            modvars[stmt.name] = value
            return
        raise MiniRuntimeError(stmt.loc, f"assignment to unknown name '{stmt.name}'")

    # -- evaluation ---------------------------------------------------------

    def eval(self, expr: Expr, scopes: list, file_id: str) -> object:
        self.step()
        if isinstance(expr, Literal):
            return expr.value
        if isinstance(expr, VarRead):
            return self.read(expr, scopes, file_id)
        if isinstance(expr, UnaryOp):
            value = self.eval(expr.operand, scopes, file_id)
            return -value if expr.op == "-" else not value
        if isinstance(expr, BinaryOp):
            return self.binary(expr, scopes, file_id)
        if isinstance(expr, CondExpr):
            if self.eval(expr.cond, scopes, file_id):
                return self.eval(expr.then_expr, scopes, file_id)
            return self.eval(expr.else_expr, scopes, file_id)
        if isinstance(expr, Call):
            return self.call(expr, scopes, file_id)
        if isinstance(expr, PlaceholderExpr):
            raise MiniRuntimeError(expr.loc, "cannot execute a template placeholder")
        raise TypeError(f"unexpected expression {expr!r}")

    def read(self, expr: VarRead, scopes: list, file_id: str) -> object:
        for scope in reversed(scopes):
            if expr.name in scope:
                return scope[expr.name]
        modvars = self.module_envs.get(file_id, {})
        if expr.name in modvars:
            return modvars[expr.name]
        if expr.name in self.program.functions:
            return self.program.functions[expr.name]
        raise MiniRuntimeError(expr.loc, f"read of uninitialized name '{expr.name}'")

    def binary(self, expr: BinaryOp, scopes: list, file_id: str) -> object:
        op = expr.op
        left = self.eval(expr.left, scopes, file_id)
        if op == "&&":
            return bool(left) and bool(self.eval(expr.right, scopes, file_id))
        if op == "||":
            return bool(left) or bool(self.eval(expr.right, scopes, file_id))
        right = self.eval(expr.right, scopes, file_id)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if isinstance(left, int) and isinstance(right, int):
                if right == 0:
                    raise MiniRuntimeError(expr.loc, "integer division by zero")
                quotient = abs(left) // abs(right)  # truncate toward zero
                return quotient if (left >= 0) == (right >= 0) else -quotient
            return self.float_div(float(left), float(right))
        if op == "%":
            if right == 0:
                raise MiniRuntimeError(expr.loc, "integer remainder by zero")
            remainder = abs(left) % abs(right)  # sign follows the dividend
            return remainder if left >= 0 else -remainder
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        raise ValueError(f"unknown operator {op!r}")

    @staticmethod
    def float_div(left: float, right: float) -> float:
        if right == 0.0:
            if left == 0.0 or math.isnan(left):
                return math.nan
            return math.copysign(math.inf, left) * math.copysign(1.0, right)
        return left / right

    def call(self, expr: Call, scopes: list, file_id: str) -> object:
        if expr.callee.resolution == "builtin":
            value = self.eval(expr.args[0], scopes, file_id)
            if not value:
                raise AssertFailure(expr.loc, "assertion failed")
            return None
        target = self.read(expr.callee, scopes, file_id)
        if not isinstance(target, FunctionDecl):
            raise MiniRuntimeError(expr.loc,
                                   f"'{expr.callee.name}' is not a function")
        args = [self.eval(a, scopes, file_id) for a in expr.args]
        return self.call_function(target, args)


def run_tests(program: Program, tests: Optional[list[TestCase]] = None,
              record_coverage: bool = False,
              step_budget: int = DEFAULT_STEP_BUDGET) -> TestReport:
    """Run tests in order, each isolated, and collect outcomes and coverage."""
    if tests is None:
        tests = collect_tests(program)
    interp = Interpreter(program, step_budget=step_budget,
                         record_coverage=record_coverage)
    outcomes = []
    coverage: dict[str, frozenset[int]] = {}
    for test in tests:
        outcome = interp.run_test(test)
        outcomes.append(outcome)
        if record_coverage:
            coverage[test.name] = frozenset(interp.covered)
    return TestReport(outcomes, coverage, program)
