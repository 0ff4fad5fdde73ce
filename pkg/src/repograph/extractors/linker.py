"""Second stage of extraction: resolve per-file parses against a repo-wide symbol table.

Every lookup a file makes goes through a string key (``mod:pkg.a``,
``name:helper``, ``path:docs/x.md``).  The keys consulted are recorded on the
resulting :class:`Unit`, and the keys a file *provides* are a pure function of
its path and nodes.  Alignment re-links exactly the files whose consulted keys
intersect the keys provided by changed files.
"""

from __future__ import annotations

import posixpath
from typing import Iterable, Mapping

from ..graph import NodeId, NodeKind, Provenance, RelationKind, Unit, directory_node, make_unit, ROOT_PATH
from .config import is_test_path
from .confidence import contains, make_edge
from .model import FileParse, ImportRef

PY_SUFFIXES = (".py", ".pyi")
_JS_EXTS = (".js", ".ts", ".jsx", ".tsx", ".mjs", ".cjs")


def module_names(path: str) -> tuple[str, ...]:
    if not path.endswith(PY_SUFFIXES):
        return ()
    parts = path.rsplit(".", 1)[0].split("/")
    if parts[-1] == "__init__":
        parts = parts[:-1]
    if not parts:
        return ()
    names = [".".join(parts)]
    if parts[0] == "src" and len(parts) > 1:
        names.append(".".join(parts[1:]))
    return tuple(names)


def provided_keys(path: str, nodes: Iterable[NodeId]) -> set[str]:
    keys = {"path:" + path}
    keys.update("mod:" + m for m in module_names(path))
    keys.update("name:" + n.basename for n in nodes if n.is_symbol)
    return keys


class SymbolTable:
    """Repo-wide lookup structure shared by all files during linking.

    Values are frozensets so that :meth:`copy` can share them between an old
    and a new table; updates always rebind instead of mutating.
    """

    def __init__(self) -> None:
        self.modules: dict[str, frozenset[str]] = {}
        self.names: dict[str, frozenset[NodeId]] = {}
        self.files: dict[str, tuple[NodeId, ...]] = {}

    @classmethod
    def from_units(cls, units: Mapping[str, Unit]) -> SymbolTable:
        table = cls()
        for path, unit in units.items():
            if unit.head.kind is NodeKind.FILE:
                table.add(path, unit.nodes)
        return table

    def copy(self) -> SymbolTable:
        other = SymbolTable()
        other.modules = dict(self.modules)
        other.names = dict(self.names)
        other.files = dict(self.files)
        return other

    def add(self, path: str, nodes: tuple[NodeId, ...]) -> None:
        self.files[path] = nodes
        for m in module_names(path):
            self.modules[m] = self.modules.get(m, frozenset()) | {path}
        for n in nodes:
            if n.is_symbol:
                self.names[n.basename] = self.names.get(n.basename, frozenset()) | {n}

    def remove(self, path: str) -> None:
        nodes = self.files.pop(path, ())
        for m in module_names(path):
            left = self.modules.get(m, frozenset()) - {path}
            if left:
                self.modules[m] = left
            else:
                self.modules.pop(m, None)
        for n in nodes:
            if n.is_symbol:
                left = self.names.get(n.basename, frozenset()) - {n}
                if left:
                    self.names[n.basename] = left
                else:
                    self.names.pop(n.basename, None)

    def module(self, name: str) -> str | None:
        hits = self.modules.get(name)
        if hits and len(hits) == 1:
            return next(iter(hits))
        return None

    def unique_name(self, name: str) -> NodeId | None:
        hits = self.names.get(name)
        if hits and len(hits) == 1:
            return next(iter(hits))
        return None

    def symbol_in(self, path: str, qualified_name: str) -> NodeId | None:
        hits = [n for n in self.files.get(path, ()) if n.is_symbol and n.qualified_name == qualified_name]
        return hits[0] if len(hits) == 1 else None

    def head(self, path: str) -> NodeId | None:
        nodes = self.files.get(path)
        return nodes[0] if nodes else None


def nodes_for(parse: FileParse) -> tuple[NodeId, ...]:
    head = NodeId(parse.path, NodeKind.FILE, "", (1, parse.line_count))
    symbols = [NodeId(parse.path, s.kind, s.qualified_name, s.span) for s in parse.symbols]
    return (head, *sorted(symbols, key=lambda n: (n.span, n.qualified_name, n.kind.value)))


class _FileLinker:
    def __init__(self, parse: FileParse, nodes: tuple[NodeId, ...], table: SymbolTable) -> None:
        self.parse = parse
        self.table = table
        self.head = nodes[0]
        self.nodes = nodes
        self.refs: set[str] = set()
        self.edges: set = set()
        self.unresolved = 0
        self.local: dict[str, list[NodeId]] = {}
        for n in nodes[1:]:
            self.local.setdefault(n.qualified_name, []).append(n)
        self.classes = {n.qualified_name for n in nodes[1:] if n.kind is NodeKind.CLASS}
        self.module_alias: dict[str, str] = {}
        self.symbol_alias: dict[str, tuple[str, str]] = {}

    # -- table access, with key bookkeeping --------------------------------

    def module(self, name: str) -> str | None:
        self.refs.add("mod:" + name)
        return self.table.module(name)

    def fuzzy(self, name: str) -> NodeId | None:
        if not name or (name.startswith("__") and name.endswith("__")):
            return None
        self.refs.add("name:" + name)
        return self.table.unique_name(name)

    def path_lookup(self, path: str) -> NodeId | None:
        self.refs.add("path:" + path)
        return self.table.head(path)

    def emit(self, src: NodeId, relation: RelationKind, dst: NodeId, provenance: Provenance) -> None:
        if src != dst:
            self.edges.add(make_edge(src, relation, dst, provenance))

    # -- structure ---------------------------------------------------------

    def structure(self) -> None:
        owner_of = {s.qualified_name: s.owner_class for s in self.parse.symbols}
        for n in self.nodes[1:]:
            owner = owner_of.get(n.qualified_name)
            parent = None
            if n.kind is NodeKind.FUNCTION and owner is not None:
                parent = self._local_unique(owner)
            self.edges.add(contains(parent or self.head, n))

    def _local_unique(self, qual: str) -> NodeId | None:
        hits = self.local.get(qual)
        return hits[0] if hits and len(hits) == 1 else None

    # -- python imports ----------------------------------------------------

    def _absolute(self, ref: ImportRef) -> str | None:
        if ref.level == 0:
            return ref.module
        # containing package; for __init__ files that is the package itself
        parts = self.parse.path.rsplit(".", 1)[0].split("/")[:-1]
        drop = ref.level - 1
        if drop > len(parts):
            return None
        base = parts[: len(parts) - drop] if drop else parts
        tail = [p for p in ref.module.split(".") if p] if ref.module else []
        full = base + tail
        return ".".join(full) if full else None

    def imports(self) -> None:
        for ref in self.parse.imports:
            full = self._absolute(ref)
            if full is None:
                self.unresolved += 1
                continue
            verbatim = ref.level == 0
            if not ref.is_from:
                target = self.module(full)
                if target is None:
                    self.unresolved += 1
                    continue
                self._import_edge(target, verbatim)
                alias = ref.aliases[0] if ref.aliases else None
                if alias:
                    self.module_alias[alias] = full
                else:
                    parts = full.split(".")
                    for i in range(1, len(parts) + 1):
                        self.module_alias[".".join(parts[:i])] = ".".join(parts[:i])
                continue
            hit = False
            needs_base = False
            for name, alias in zip(ref.names, ref.aliases or (None,) * len(ref.names)):
                if name == "*":
                    needs_base = True
                    continue
                sub = self.module(f"{full}.{name}")
                if sub is not None:
                    self._import_edge(sub, False)
                    self.module_alias[alias or name] = f"{full}.{name}"
                    hit = True
                else:
                    needs_base = True
                    self.symbol_alias[alias or name] = (full, name)
            if needs_base:
                base = self.module(full)
                if base is not None:
                    self._import_edge(base, verbatim)
                    hit = True
            if not hit:
                self.unresolved += 1

    def _import_edge(self, target_path: str, verbatim: bool) -> None:
        dst = self.table.head(target_path)
        if dst is None:
            return
        prov = Provenance.EXPLICIT_IMPORT if verbatim else Provenance.RESOLVED_IMPORT
        self.emit(self.head, RelationKind.IMPORTS, dst, prov)

    # -- references (calls and bases) --------------------------------------

    def _scope_chain(self, scope: str) -> list[str]:
        chain = []
        parts = scope.split(".") if scope else []
        for i in range(len(parts), 0, -1):
            chain.append(".".join(parts[:i]))
        return chain

    def _enclosing_class(self, scope: str) -> str | None:
        for prefix in self._scope_chain(scope):
            if prefix in self.classes:
                return prefix
        return None

    def _same_file(self, name: str, scope: str) -> tuple[bool, NodeId | None]:
        """(found, node): found with node None means an ambiguous local definition."""
        for prefix in self._scope_chain(scope):
            hits = self.local.get(f"{prefix}.{name}")
            if hits:
                return True, hits[0] if len(hits) == 1 else None
        hits = self.local.get(name)
        if hits:
            return True, hits[0] if len(hits) == 1 else None
        return False, None

    def resolve(self, parts: tuple[str, ...], scope: str) -> tuple[NodeId, bool] | None:
        """Resolve a dotted reference; returns (target, exact) or None."""
        name = parts[-1]
        if len(parts) == 1:
            found, node = self._same_file(name, scope)
            if found:
                return (node, True) if node is not None else None
            if name in self.symbol_alias:
                mod, sym = self.symbol_alias[name]
                path = self.module(mod)
                if path is None:
                    return None  # bound to something outside the repository
                target = self.table.symbol_in(path, sym)
                if target is not None:
                    return target, False
                name = sym
            elif name in self.module_alias:
                return None
            target = self.fuzzy(name)
            return (target, None) if target is not None else None

        head = parts[0]
        if head in ("self", "cls") and len(parts) == 2:
            cls_name = self._enclosing_class(scope)
            if cls_name is not None:
                node = self._local_unique(f"{cls_name}.{name}")
                if node is not None:
                    return node, True
        elif head and head in self.classes and head not in self.symbol_alias:
            node = self._local_unique(".".join(parts))
            if node is not None:
                return node, True
        if head:
            for k in range(len(parts) - 1, 0, -1):
                local = ".".join(parts[:k])
                if local in self.module_alias:
                    path = self.module(self.module_alias[local])
                    if path is not None:
                        target = self.table.symbol_in(path, ".".join(parts[k:]))
                        if target is not None:
                            return target, False
                    break
            if head in self.symbol_alias:
                mod, sym = self.symbol_alias[head]
                path = self.module(mod)
                if path is not None:
                    target = self.table.symbol_in(path, ".".join((sym,) + parts[1:]))
                    if target is not None:
                        return target, False
        target = self.fuzzy(name)
        return (target, None) if target is not None else None

    def calls(self) -> None:
        for call in self.parse.calls:
            src = self._local_unique(call.scope) if call.scope else self.head
            if src is None:
                src = self.head
            hit = self.resolve(call.parts, call.scope)
            if hit is None:
                self.unresolved += 1
                continue
            target, exact = hit
            if exact is True:
                prov = Provenance.SAME_FILE_COOCCURRENCE
            elif exact is False:
                prov = Provenance.RESOLVED_IMPORT
            else:
                prov = Provenance.FUZZY_NAME_MATCH
            self.emit(src, RelationKind.INVOKES, target, prov)

    def bases(self) -> None:
        for base in self.parse.bases:
            src = self._local_unique(base.cls)
            if src is None:
                continue
            scope = base.cls.rsplit(".", 1)[0] if "." in base.cls else ""
            hit = self.resolve(base.parts, scope)
            if hit is None:
                self.unresolved += 1
                continue
            target, exact = hit
            prov = Provenance.FUZZY_NAME_MATCH if exact is None else Provenance.INHERITANCE
            self.emit(src, RelationKind.INHERITS, target, prov)

    # -- other languages ---------------------------------------------------

    def path_imports(self) -> None:
        here = posixpath.dirname(self.parse.path)
        for raw in self.parse.path_imports:
            target = None
            verbatim = False
            if not raw.startswith("."):
                target = self.path_lookup(raw)
                verbatim = target is not None
            if target is None:
                joined = posixpath.normpath(posixpath.join(here, raw))
                if joined.startswith(".."):
                    self.unresolved += 1
                    continue
                for cand in (joined, *(joined + e for e in _JS_EXTS), *(joined + "/index" + e for e in _JS_EXTS)):
                    target = self.path_lookup(cand)
                    if target is not None:
                        break
            if target is None:
                self.unresolved += 1
                continue
            prov = Provenance.EXPLICIT_IMPORT if verbatim else Provenance.RESOLVED_IMPORT
            self.emit(self.head, RelationKind.IMPORTS, target, prov)

    # -- cross-artifact pass -----------------------------------------------

    def test_links(self) -> None:
        if not is_test_path(self.parse.path):
            return
        for e in list(self.edges):
            if e.relation is RelationKind.IMPORTS and not is_test_path(e.dst.path):
                self.emit(e.dst, RelationKind.TESTED_BY, self.head, Provenance.TEST_LINKAGE)

    def mentions(self) -> None:
        for ns, token in self.parse.mentions:
            if ns == "path":
                target = self.path_lookup(token)
                if target is not None:
                    self.emit(self.head, RelationKind.DOCUMENTS, target, Provenance.DOCUMENTATION)
            elif ns == "name":
                target = self.fuzzy(token)
                if target is not None:
                    self.emit(self.head, RelationKind.DOCUMENTS, target, Provenance.DOCUMENTATION)
            elif ns == "mod":
                path = self.module(token)
                if path is not None:
                    target = self.table.head(path)
                    self.emit(self.head, RelationKind.CONFIGURES, target, Provenance.CONFIGURATION)


def link_file(parse: FileParse, nodes: tuple[NodeId, ...], table: SymbolTable) -> tuple[Unit, int]:
    """Resolve one parsed file into a :class:`Unit`; returns (unit, unresolved count)."""
    linker = _FileLinker(parse, nodes, table)
    linker.structure()
    linker.imports()
    linker.path_imports()
    linker.calls()
    linker.bases()
    linker.test_links()
    linker.mentions()
    attrs = {nodes[0]: parse.path}
    by_qual = {s.qualified_name: s for s in parse.symbols}
    for n in nodes[1:]:
        sym = by_qual.get(n.qualified_name)
        text = sym.signature if sym else n.qualified_name
        doc = parse.docstrings.get(n.qualified_name)
        attrs[n] = f"{text} | {doc}" if doc else text
    return make_unit(parse.path, nodes, linker.edges, attrs, linker.refs), linker.unresolved


def parent_dir(path: str) -> str:
    d = posixpath.dirname(path)
    return d or ROOT_PATH


def ancestors(path: str) -> list[str]:
    out = []
    d = parent_dir(path)
    while True:
        out.append(d)
        if d == ROOT_PATH:
            return out
        d = parent_dir(d)


def directory_unit(path: str, children: Iterable[NodeId]) -> Unit:
    node = directory_node(path)
    kids = sorted(children)
    return make_unit(path, (node,), (contains(node, c) for c in kids), {node: path})


def directory_units(heads: Mapping[str, NodeId]) -> dict[str, Unit]:
    """Directory units for a set of file heads, always including the root."""
    children: dict[str, set[NodeId]] = {ROOT_PATH: set()}
    for path, head in heads.items():
        child = head
        for d in ancestors(path):
            children.setdefault(d, set()).add(child)
            child = directory_node(d)
    return {d: directory_unit(d, kids) for d, kids in children.items()}
