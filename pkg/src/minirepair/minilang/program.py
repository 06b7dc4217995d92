"""Whole-program representation: assembly, indexing, and project loading.

A :class:`Program` owns the modules of one project plus the derived indexes
the repair engine relies on: stable node ids (preorder over modules sorted
by file path), a parent map, the flat list of statements, and the global
function table.  Node ids are what coverage, fault localization, and
modification points use to refer to program elements.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from minirepair.minilang.ast import (
    Block,
    FunctionDecl,
    Module,
    Node,
    Stmt,
)
from minirepair.minilang.parser import ParseError, ParseFailure, parse_module


@dataclass
class Program:
    modules: list[Module]
    functions: dict[str, FunctionDecl] = field(default_factory=dict)
    statements: list[Stmt] = field(default_factory=list)
    _nodes: list[Node] = field(default_factory=list, repr=False)
    _parents: dict[int, Optional[Node]] = field(default_factory=dict, repr=False)

    # -- indexes ---------------------------------------------------------------

    def node(self, node_id: int) -> Node:
        return self._nodes[node_id]

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def parent_of(self, node: Node) -> Optional[Node]:
        return self._parents.get(id(node))

    def statement_of(self, node: Node) -> Optional[Stmt]:
        """Innermost enclosing statement (the node itself if it is one);
        blocks do not count."""
        current: Optional[Node] = node
        while current is not None:
            if isinstance(current, Stmt) and not isinstance(current, Block):
                return current
            current = self.parent_of(current)
        return None

    def function_of(self, node: Node) -> Optional[FunctionDecl]:
        current: Optional[Node] = node
        while current is not None:
            if isinstance(current, FunctionDecl):
                return current
            current = self.parent_of(current)
        return None

    def module_of(self, file_id: str) -> Module:
        for module in self.modules:
            if module.file_id == file_id:
                return module
        raise KeyError(file_id)

    def reindex(self) -> None:
        """Rebuild ids, parents, statements, and the function table.

        Must be called after any structural edit that should become
        permanent.  Candidate validation does not reindex: it swaps an
        expression in and out, and ids of unaffected nodes stay valid.
        """
        self._nodes = []
        self._parents = {}
        self.statements = []
        self.functions = {}
        for module in self.modules:
            self._index_subtree(module, None)
        for module in self.modules:
            for decl in module.decls:
                if isinstance(decl, FunctionDecl) and decl.name not in self.functions:
                    self.functions[decl.name] = decl

    def _index_subtree(self, node: Node, parent: Optional[Node]) -> None:
        node.node_id = len(self._nodes)
        self._nodes.append(node)
        self._parents[id(node)] = parent
        if isinstance(node, Stmt) and not isinstance(node, Block):
            self.statements.append(node)
        for child in node.children():
            self._index_subtree(child, node)


def assemble(modules: list[Module]) -> Program:
    """Index a set of parsed modules into a Program.

    Modules are kept in the given order; load_project sorts by file path
    first so ids are stable for a project on disk.
    """
    program = Program(list(modules))
    program.reindex()
    return program


def load_project(root: str) -> Program:
    """Parse every ``.mini`` file under ``root`` into one Program.

    File ids are paths relative to ``root`` (always with forward slashes);
    package ids are the containing directories.  Raises FileNotFoundError
    if the root does not exist, ValueError if it contains no ``.mini``
    files, and ParseFailure with all syntax errors across all files.
    """
    if not os.path.isdir(root):
        raise FileNotFoundError(f"project root {root!r} is not a directory")
    paths = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in sorted(filenames):
            if name.endswith(".mini"):
                paths.append(os.path.join(dirpath, name))
    if not paths:
        raise ValueError(f"no .mini files under {root!r}")
    sources = {}
    for path in paths:
        rel = os.path.relpath(path, root).replace(os.sep, "/")
        with open(path, "r", encoding="utf-8") as fh:
            sources[rel] = fh.read()
    return program_from_sources(sources)


def program_from_sources(sources: dict[str, str]) -> Program:
    """Assemble a program from {relative file path: source text}."""
    modules = []
    errors: list[ParseError] = []
    for rel in sorted(sources):
        package_id = os.path.dirname(rel) or "."
        try:
            modules.append(parse_module(sources[rel], rel, package_id))
        except ParseFailure as failure:
            errors.extend(failure.errors)
    if errors:
        raise ParseFailure(errors)
    return assemble(modules)
