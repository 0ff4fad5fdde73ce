"""Reference adapter: classes, functions, imports, calls and bases via :mod:`ast`."""

from __future__ import annotations

import ast
import warnings

from ..graph import NodeKind
from .model import BaseRef, CallRef, FileParse, ImportRef, Symbol

EXTENSIONS = (".py", ".pyi")


def dotted_parts(expr: ast.expr) -> tuple[str, ...]:
    """``a.b.c`` -> ("a", "b", "c"); unknown receivers become ""."""
    attrs = []
    while isinstance(expr, ast.Attribute):
        attrs.append(expr.attr)
        expr = expr.value
    if isinstance(expr, ast.Name):
        attrs.append(expr.id)
    else:
        attrs.append("")
    return tuple(reversed(attrs))


class _Collector(ast.NodeVisitor):
    def __init__(self, parse: FileParse, lines: list[str]) -> None:
        self.parse = parse
        self.lines = lines
        # stack of (qualified name, kind)
        self.stack: list[tuple[str, NodeKind]] = []

    def _qual(self, name: str) -> str:
        return f"{self.stack[-1][0]}.{name}" if self.stack else name

    def _signature(self, lineno: int) -> str:
        if 0 < lineno <= len(self.lines):
            return self.lines[lineno - 1].strip()[:160]
        return ""

    def _symbol(self, node, kind: NodeKind) -> None:
        qual = self._qual(node.name)
        start = min([node.lineno] + [d.lineno for d in node.decorator_list])
        owner = self.stack[-1][0] if self.stack and self.stack[-1][1] is NodeKind.CLASS else None
        self.parse.symbols.append(
            Symbol(qual, kind, (start, node.end_lineno or node.lineno), owner, self._signature(node.lineno))
        )
        doc = ast.get_docstring(node, clean=True)
        if doc:
            self.parse.docstrings[qual] = doc.strip().splitlines()[0][:160]
        if kind is NodeKind.CLASS:
            for base in node.bases:
                parts = dotted_parts(base)
                if parts[0]:
                    self.parse.bases.append(BaseRef(qual, parts))
        for deco in node.decorator_list:
            self.visit(deco)
        self.stack.append((qual, kind))
        for stmt in node.body:
            self.visit(stmt)
        self.stack.pop()

    def visit_FunctionDef(self, node: ast.FunctionDef) -> None:
        for default in node.args.defaults + node.args.kw_defaults:
            if default is not None:
                self.visit(default)
        self._symbol(node, NodeKind.FUNCTION)

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        self._symbol(node, NodeKind.CLASS)

    def visit_Import(self, node: ast.Import) -> None:
        for alias in node.names:
            self.parse.imports.append(
                ImportRef(alias.name, 0, (), (alias.asname,), node.lineno)
            )

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        names = tuple(a.name for a in node.names)
        aliases = tuple(a.asname for a in node.names)
        self.parse.imports.append(
            ImportRef(node.module or "", node.level or 0, names, aliases, node.lineno)
        )

    def visit_Call(self, node: ast.Call) -> None:
        parts = dotted_parts(node.func)
        if parts[-1]:
            scope = self.stack[-1][0] if self.stack else ""
            self.parse.calls.append(CallRef(scope, parts, node.lineno))
        self.generic_visit(node)


def parse_python(path: str, text: str) -> FileParse:
    """Raises :class:`SyntaxError` (or ValueError for NUL bytes) on unparsable input."""
    lines = text.splitlines()
    with warnings.catch_warnings():
        # invalid escapes and similar in the indexed code are not our warnings
        warnings.simplefilter("ignore", SyntaxWarning)
        warnings.simplefilter("ignore", DeprecationWarning)
        tree = ast.parse(text, filename=path)
    parse = FileParse(path, "python", max(1, len(lines)))
    _Collector(parse, lines).visit(tree)
    return parse
