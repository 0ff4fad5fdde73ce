"""Two-pass extraction of a :class:`~repograph.graph.RepoGraph` from a worktree.

Pass one parses every file on its own (symbols, imports, calls, bases, and
the mentions found in docs and config files).  Pass two resolves those
references against a symbol table built from *all* pass-one output, which
yields the semantic edges and the cross-artifact links.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..graph import NodeId, Provenance, RepoGraph, Unit
from .confidence import CONFIDENCE, TABLE_VALUES, confidence_of, make_edge
from .config import IndexConfig, is_config_path, is_doc_path, is_test_path, load_config
from .crossref import parse_config, parse_doc
from .linker import SymbolTable, directory_units, link_file, module_names, nodes_for, provided_keys
from .model import FileParse
from .python_adapter import EXTENSIONS as PY_EXTENSIONS, parse_python
from .regex_adapter import EXTENSIONS as REGEX_EXTENSIONS, parse_python_imports, parse_regex
from .walker import content_hash, read_worktree, snapshot_hash


@dataclass(frozen=True)
class LanguageAdapter:
    language_id: str
    file_extensions: tuple[str, ...]
    capabilities: frozenset[str]
    parse: Callable[[str, str], FileParse]


ADAPTERS: dict[str, LanguageAdapter] = {
    "python": LanguageAdapter(
        "python", PY_EXTENSIONS, frozenset({"symbols", "imports", "invokes", "inherits"}), parse_python
    ),
    "regex": LanguageAdapter("regex", REGEX_EXTENSIONS, frozenset({"imports"}), parse_regex),
}


@dataclass
class ExtractionReport:
    files_parsed: int = 0
    files_skipped: int = 0
    edges_by_provenance: dict[str, int] = field(default_factory=dict)
    unresolved_references: int = 0
    parse_errors: dict[str, str] = field(default_factory=dict)
    file_hashes: dict[str, str] = field(default_factory=dict)

    @property
    def files_visited(self) -> int:
        return self.files_parsed + self.files_skipped

    def summary(self) -> str:
        edges = ", ".join(f"{k}={v}" for k, v in sorted(self.edges_by_provenance.items()))
        return (
            f"files parsed={self.files_parsed} skipped={self.files_skipped} "
            f"unresolved={self.unresolved_references} edges: {edges or 'none'}"
        )

    def to_json(self) -> dict:
        return {
            "files_parsed": self.files_parsed,
            "files_skipped": self.files_skipped,
            "edges_by_provenance": dict(sorted(self.edges_by_provenance.items())),
            "unresolved_references": self.unresolved_references,
            "parse_errors": dict(sorted(self.parse_errors.items())),
        }


def parse_file(path: str, data: bytes, config: IndexConfig) -> FileParse:
    """Pass one for a single file.  Never raises on bad content."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return FileParse(path, "none", 1, error="not utf-8")
    lowered = path.lower()
    py = ADAPTERS["python"]
    if "python" in config.adapters and lowered.endswith(py.file_extensions):
        try:
            return py.parse(path, text)
        except (SyntaxError, ValueError, RecursionError) as exc:
            return parse_python_imports(path, text, f"{type(exc).__name__}: {exc}")
    rx = ADAPTERS["regex"]
    if "regex" in config.adapters and lowered.endswith(rx.file_extensions):
        return rx.parse(path, text)
    if is_doc_path(path):
        return parse_doc(path, text)
    if is_config_path(path):
        return parse_config(path, text)
    return FileParse(path, "none", max(1, len(text.splitlines())))


def build_graph(
    worktree_root: str | os.PathLike,
    config: IndexConfig | None = None,
    skip: Path | None = None,
) -> tuple[RepoGraph, ExtractionReport]:
    """Parse a worktree from scratch.

    ``skip`` names a directory (usually the index directory) to leave out of
    the walk.  Raises :class:`~repograph.errors.IoError` if the root is unreadable.
    """
    config = config or IndexConfig()
    files = read_worktree(worktree_root, config, skip)
    report = ExtractionReport()
    parses: dict[str, FileParse] = {}
    node_sets: dict[str, tuple[NodeId, ...]] = {}
    table = SymbolTable()
    for path, data in files.items():
        report.file_hashes[path] = content_hash(data)
        parse = parse_file(path, data, config)
        parses[path] = parse
        if parse.parsed:
            report.files_parsed += 1
        else:
            report.files_skipped += 1
        if parse.error:
            report.parse_errors[path] = parse.error
        node_sets[path] = nodes_for(parse)
        table.add(path, node_sets[path])
    units: dict[str, Unit] = {}
    for path, parse in parses.items():
        unit, unresolved = link_file(parse, node_sets[path], table)
        units[path] = unit
        report.unresolved_references += unresolved
    units.update(directory_units({p: u.head for p, u in units.items()}))
    snapshot = config.snapshot_id or snapshot_hash(report.file_hashes)
    graph = RepoGraph(snapshot, units)
    graph.__dict__["_symbol_table"] = table
    counts = Counter(e.provenance.value for e in graph.edges)
    report.edges_by_provenance = dict(counts)
    return graph, report


def symbol_table(g: RepoGraph) -> SymbolTable:
    """The (cached) lookup table for a graph's current file set."""
    table = g.__dict__.get("_symbol_table")
    if table is None:
        table = SymbolTable.from_units(g.units)
        g.__dict__["_symbol_table"] = table
    return table


def resolve_reference(
    name: str, context: NodeId, table: SymbolTable | RepoGraph
) -> tuple[NodeId, Provenance] | None:
    """Resolve a bare or dotted symbol reference made from ``context``.

    Without the importing file's bindings only same-file and repo-wide
    unique-name resolution apply; full import-aware resolution happens in
    :func:`link_file`.
    """
    from .linker import _FileLinker

    if isinstance(table, RepoGraph):
        table = symbol_table(table)
    nodes = table.files.get(context.path)
    if nodes is None:
        return None
    parse = FileParse(context.path, "python", nodes[0].span[1])
    linker = _FileLinker(parse, nodes, table)
    scope = context.qualified_name if context.is_symbol else ""
    hit = linker.resolve(tuple(name.split(".")), scope)
    if hit is None:
        return None
    target, exact = hit
    if exact is True:
        return target, Provenance.SAME_FILE_COOCCURRENCE
    if exact is False:
        return target, Provenance.RESOLVED_IMPORT
    return target, Provenance.FUZZY_NAME_MATCH


__all__ = [
    "ADAPTERS",
    "CONFIDENCE",
    "ExtractionReport",
    "IndexConfig",
    "LanguageAdapter",
    "SymbolTable",
    "TABLE_VALUES",
    "build_graph",
    "confidence_of",
    "is_config_path",
    "is_doc_path",
    "is_test_path",
    "link_file",
    "load_config",
    "make_edge",
    "module_names",
    "nodes_for",
    "parse_file",
    "provided_keys",
    "resolve_reference",
    "symbol_table",
]
