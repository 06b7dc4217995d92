"""The Mini language: parsing, type checking, printing, and interpretation.

Mini is a small statically typed imperative language used as the substrate
for the repair engine.  A project is a directory tree of ``.mini`` files;
each directory is a package, each file a module.  Functions are global to
the project, module variables are visible within their file, and functions
whose names start with ``test_`` form the project's test suite.
"""

from minirepair.minilang.ast import (
    BOOL,
    FLOAT,
    INT,
    STRING,
    VOID,
    Assign,
    BaseType,
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
    Node,
    Param,
    PlaceholderExpr,
    ReturnStmt,
    SourceLocation,
    Stmt,
    UnaryOp,
    VarDecl,
    VarRead,
    WhileStmt,
    direct_expressions,
    structurally_equal,
    walk,
)
from minirepair.minilang.lexer import LexError, Token, tokenize
from minirepair.minilang.parser import (
    ParseError,
    ParseFailure,
    parse_expression,
    parse_module,
)
from minirepair.minilang.printer import statement_source, to_sexpr, to_source
from minirepair.minilang.program import Program, assemble, load_project, program_from_sources
from minirepair.minilang.typecheck import TypeCheckError, TypeCheckFailure, typecheck
from minirepair.minilang.interp import (
    AssertFailure,
    Interpreter,
    MiniRuntimeError,
    StepLimitExceeded,
    TestCase,
    TestOutcome,
    TestReport,
    collect_tests,
    run_tests,
)

__all__ = [
    "INT", "FLOAT", "BOOL", "STRING", "VOID",
    "MiniType", "BaseType", "FunType",
    "SourceLocation", "Node", "Expr", "Stmt",
    "Literal", "VarRead", "UnaryOp", "BinaryOp", "Call", "CondExpr",
    "PlaceholderExpr", "VarDecl", "Assign", "ExprStmt", "ReturnStmt",
    "IfStmt", "WhileStmt", "Block", "Param", "FunctionDecl", "Module",
    "direct_expressions", "structurally_equal", "walk",
    "Token", "LexError", "tokenize",
    "ParseError", "ParseFailure", "parse_module", "parse_expression",
    "to_source", "to_sexpr", "statement_source",
    "TypeCheckError", "TypeCheckFailure", "typecheck",
    "Program", "assemble", "load_project", "program_from_sources",
    "Interpreter", "MiniRuntimeError", "AssertFailure", "StepLimitExceeded",
    "TestCase", "TestOutcome", "TestReport", "collect_tests", "run_tests",
]
