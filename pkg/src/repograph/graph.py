"""Typed, confidence-weighted repository graph and read-only queries over it.

A :class:`RepoGraph` is an immutable snapshot.  Internally it is split into
*units*, one per file or directory, each holding the nodes that live at that
path and the edges produced while parsing it.  The split is what lets the
alignment step swap out a handful of files without touching the rest.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import InvalidArgument, NodeNotFound


class NodeKind(str, Enum):
    DIRECTORY = "directory"
    FILE = "file"
    CLASS = "class"
    FUNCTION = "function"


class RelationKind(str, Enum):
    CONTAINS = "contains"
    IMPORTS = "imports"
    INVOKES = "invokes"
    INHERITS = "inherits"
    TESTED_BY = "tested_by"
    DOCUMENTS = "documents"
    CONFIGURES = "configures"


class Provenance(str, Enum):
    SAME_FILE_COOCCURRENCE = "same_file_cooccurrence"
    EXPLICIT_IMPORT = "explicit_import"
    RESOLVED_IMPORT = "resolved_import"
    INHERITANCE = "inheritance"
    CYTHON_IMPLEMENTATION = "cython_implementation"
    TEST_LINKAGE = "test_linkage"
    DOCUMENTATION = "documentation"
    CONFIGURATION = "configuration"
    FUZZY_NAME_MATCH = "fuzzy_name_match"
    STRUCTURAL = "structural"


SYMBOL_KINDS = frozenset({NodeKind.CLASS, NodeKind.FUNCTION})
CODE_KINDS = frozenset({NodeKind.FILE, NodeKind.CLASS, NodeKind.FUNCTION})

# (parent kind, child kind) pairs a contains edge may connect
CONTAINS_PAIRS = frozenset(
    {
        (NodeKind.DIRECTORY, NodeKind.DIRECTORY),
        (NodeKind.DIRECTORY, NodeKind.FILE),
        (NodeKind.FILE, NodeKind.CLASS),
        (NodeKind.FILE, NodeKind.FUNCTION),
        (NodeKind.CLASS, NodeKind.FUNCTION),
        (NodeKind.CLASS, NodeKind.CLASS),
    }
)

ROOT_PATH = "."


@dataclass(frozen=True, order=True, slots=True)
class NodeId:
    path: str
    kind: NodeKind
    qualified_name: str = ""
    span: tuple[int, int] = (0, 0)

    @property
    def key(self) -> str:
        return f"{self.kind.value}:{self.path}:{self.qualified_name}:{self.span[0]}-{self.span[1]}"

    @property
    def basename(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def is_symbol(self) -> bool:
        return self.kind in SYMBOL_KINDS

    def label(self) -> str:
        """``path:symbol`` for symbols, the bare path otherwise."""
        return f"{self.path}:{self.qualified_name}" if self.qualified_name else self.path

    @classmethod
    def from_key(cls, key: str) -> NodeId:
        kind, rest = key.split(":", 1)
        rest, span = rest.rsplit(":", 1)
        path, qualname = rest.rsplit(":", 1)
        start, end = span.split("-")
        return cls(path, NodeKind(kind), qualname, (int(start), int(end)))


def directory_node(path: str) -> NodeId:
    return NodeId(path, NodeKind.DIRECTORY)


@dataclass(frozen=True, order=True, slots=True)
class Edge:
    src: NodeId
    relation: RelationKind
    dst: NodeId
    provenance: Provenance
    confidence: float

    @property
    def is_semantic(self) -> bool:
        return self.relation is not RelationKind.CONTAINS

    @property
    def origin(self) -> str:
        """Path of the unit whose parse produced this edge.

        Test linkage is discovered while reading the test file, so it is owned
        by the edge's destination; every other relation is owned by its source.
        """
        if self.relation is RelationKind.TESTED_BY:
            return self.dst.path
        return self.src.path


@dataclass(frozen=True)
class Unit:
    """Everything a single file or directory contributes to the graph.

    ``refs`` holds the symbol-table lookup keys the unit consulted while its
    edges were resolved; it drives re-linking during alignment.
    """

    path: str
    nodes: tuple[NodeId, ...]
    edges: tuple[Edge, ...] = ()
    attributes: tuple[tuple[NodeId, str], ...] = ()
    refs: frozenset[str] = frozenset()

    @property
    def head(self) -> NodeId:
        """The file or directory node of this unit."""
        return self.nodes[0]


@dataclass(frozen=True)
class CommunityAssignment:
    kappa: Mapping[str, int]
    labels: Mapping[int, str]
    cohesion: Mapping[str, float]
    stale: bool = False
    # share of files changed since the partition was last computed
    epoch_diff_fraction: float = 0.0

    def community_of(self, path: str) -> int | None:
        return self.kappa.get(path)

    def members(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for path, cid in sorted(self.kappa.items()):
            out.setdefault(cid, []).append(path)
        return out

    def to_json(self) -> dict:
        return {
            "kappa": dict(sorted(self.kappa.items())),
            "labels": {str(k): v for k, v in sorted(self.labels.items())},
            "cohesion": {k: round(v, 6) for k, v in sorted(self.cohesion.items())},
            "stale": self.stale,
            "epoch_diff_fraction": self.epoch_diff_fraction,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> CommunityAssignment:
        return cls(
            kappa={k: int(v) for k, v in data["kappa"].items()},
            labels={int(k): v for k, v in data["labels"].items()},
            cohesion={k: float(v) for k, v in data["cohesion"].items()},
            stale=bool(data.get("stale", False)),
            epoch_diff_fraction=float(data.get("epoch_diff_fraction", 0.0)),
        )


class RepoGraph:
    """Immutable repository snapshot.

    Build one with :func:`repograph.extractors.build_graph`, or with
    :meth:`from_parts` for hand-assembled fixtures.
    """

    def __init__(
        self,
        snapshot_id: str,
        units: Mapping[str, Unit],
        community: CommunityAssignment | None = None,
    ) -> None:
        self.snapshot_id = snapshot_id
        self.units: Mapping[str, Unit] = MappingProxyType(dict(units))
        self.community = community

    @classmethod
    def from_parts(
        cls,
        snapshot_id: str,
        nodes: Iterable[NodeId],
        edges: Iterable[Edge] = (),
        attributes: Mapping[NodeId, str] | None = None,
        community: CommunityAssignment | None = None,
        refs: Mapping[str, Iterable[str]] | None = None,
    ) -> RepoGraph:
        attributes = attributes or {}
        refs = refs or {}
        by_path: dict[str, list[NodeId]] = {}
        for n in nodes:
            by_path.setdefault(n.path, []).append(n)
        known = {n for group in by_path.values() for n in group}
        edge_groups: dict[str, list[Edge]] = {}
        for e in edges:
            for endpoint in (e.src, e.dst):
                if endpoint not in known:
                    raise NodeNotFound(endpoint.key)
            edge_groups.setdefault(e.origin, []).append(e)
        units = {}
        for path, group in by_path.items():
            group.sort(key=_unit_order)
            units[path] = Unit(
                path,
                tuple(group),
                tuple(sorted(edge_groups.pop(path, ()))),
                tuple((n, attributes[n]) for n in group if n in attributes),
                frozenset(refs.get(path, ())),
            )
        if edge_groups:
            raise NodeNotFound(f"edge origin without nodes: {sorted(edge_groups)[0]}")
        return cls(snapshot_id, units, community)

    def with_snapshot(self, snapshot_id: str) -> RepoGraph:
        return RepoGraph(snapshot_id, self.units, self.community)

    def with_community(self, community: CommunityAssignment | None) -> RepoGraph:
        g = RepoGraph(self.snapshot_id, self.units, community)
        # structure is shared, so the derived indexes can be too
        for name in ("nodes", "edges", "attributes", "_adjacency", "_symbols_by_path", "_symbol_table", "_ref_index"):
            if name in self.__dict__:
                g.__dict__[name] = self.__dict__[name]
        return g

    @cached_property
    def nodes(self) -> frozenset[NodeId]:
        return frozenset(n for u in self.units.values() for n in u.nodes)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(e for u in self.units.values() for e in u.edges))

    @cached_property
    def attributes(self) -> Mapping[NodeId, str]:
        return MappingProxyType({n: text for u in self.units.values() for n, text in u.attributes})

    @property
    def file_paths(self) -> list[str]:
        return sorted(p for p, u in self.units.items() if u.head.kind is NodeKind.FILE)

    def file_nodes(self) -> list[NodeId]:
        return [self.units[p].head for p in self.file_paths]

    def file_node(self, path: str) -> NodeId:
        unit = self.units.get(path)
        if unit is None or unit.head.kind is not NodeKind.FILE:
            raise NodeNotFound(path)
        return unit.head

    def semantic_edges(self) -> Iterator[Edge]:
        return (e for e in self.edges if e.is_semantic)

    def __contains__(self, node: object) -> bool:
        if not isinstance(node, NodeId):
            return False
        unit = self.units.get(node.path)
        return unit is not None and node in unit.nodes

    def __repr__(self) -> str:
        return f"RepoGraph({self.snapshot_id!r}, {len(self.nodes)} nodes, {len(self.edges)} edges)"

    def same_structure(self, other: RepoGraph) -> bool:
        """Equal node sets and equal edge multisets (community ignored)."""
        return self.nodes == other.nodes and Counter(self.edges) == Counter(other.edges)

    @cached_property
    def _adjacency(self) -> Mapping[NodeId, tuple[tuple[NodeId, float], ...]]:
        adj: dict[NodeId, list[tuple[NodeId, float]]] = {}
        for e in self.edges:
            if not e.is_semantic or e.src == e.dst:
                continue
            adj.setdefault(e.src, []).append((e.dst, e.confidence))
            adj.setdefault(e.dst, []).append((e.src, e.confidence))
        return {n: tuple(v) for n, v in adj.items()}

    def semantic_neighbors(self, v: NodeId) -> tuple[tuple[NodeId, float], ...]:
        """Undirected (neighbor, confidence) pairs, one per incident semantic edge."""
        return self._adjacency.get(v, ())

    @cached_property
    def _symbols_by_path(self) -> Mapping[str, tuple[NodeId, ...]]:
        return {p: tuple(n for n in u.nodes if n.is_symbol) for p, u in self.units.items()}

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        nodes = sorted(self.nodes)
        return {
            "snapshot_id": self.snapshot_id,
            "nodes": [
                {
                    "id": n.key,
                    "path": n.path,
                    "kind": n.kind.value,
                    "qualified_name": n.qualified_name,
                    "span": list(n.span),
                }
                for n in nodes
            ],
            "edges": [
                {
                    "src": e.src.key,
                    "relation": e.relation.value,
                    "dst": e.dst.key,
                    "provenance": e.provenance.value,
                    "confidence": e.confidence,
                }
                for e in self.edges
            ],
            "attributes": {n.key: text for n, text in sorted(self.attributes.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(
        cls,
        data: Mapping,
        community: CommunityAssignment | None = None,
        refs: Mapping[str, Iterable[str]] | None = None,
    ) -> RepoGraph:
        by_key = {
            item["id"]: NodeId(
                item["path"], NodeKind(item["kind"]), item["qualified_name"], tuple(item["span"])
            )
            for item in data["nodes"]
        }
        edges = [
            Edge(
                by_key[item["src"]],
                RelationKind(item["relation"]),
                by_key[item["dst"]],
                Provenance(item["provenance"]),
                float(item["confidence"]),
            )
            for item in data["edges"]
        ]
        attributes = {by_key[k]: v for k, v in data["attributes"].items()}
        return cls.from_parts(
            data["snapshot_id"], by_key.values(), edges, attributes, community, refs
        )

    @classmethod
    def loads(cls, text: str, **kwargs) -> RepoGraph:
        return cls.from_json(json.loads(text), **kwargs)


_KIND_RANK = {NodeKind.DIRECTORY: 0, NodeKind.FILE: 0, NodeKind.CLASS: 1, NodeKind.FUNCTION: 1}


def _unit_order(n: NodeId) -> tuple:
    # head (directory/file) first, then symbols by position
    return (_KIND_RANK[n.kind], n.span, n.qualified_name, n.kind.value)


def make_unit(
    path: str,
    nodes: Iterable[NodeId],
    edges: Iterable[Edge] = (),
    attributes: Mapping[NodeId, str] | None = None,
    refs: Iterable[str] = (),
) -> Unit:
    ordered = sorted(nodes, key=_unit_order)
    attributes = attributes or {}
    return Unit(
        path,
        tuple(ordered),
        tuple(sorted(set(edges))),
        tuple((n, attributes[n]) for n in ordered if n in attributes),
        frozenset(refs),
    )


# -- structural queries -----------------------------------------------------


def neighborhood(
    g: RepoGraph, v: NodeId, hops: int, theta: float
) -> set[tuple[NodeId, int, float]]:
    """Nodes within ``hops`` semantic steps of ``v`` over edges with confidence >= theta.

    Edges are walked in both directions and ``contains`` edges are never
    followed.  Each result carries its BFS distance and the best bottleneck
    confidence among the shortest paths that reach it.
    """
    if v not in g:
        raise NodeNotFound(v.key)
    if hops < 1:
        raise InvalidArgument("hops must be >= 1")
    dist = {v: 0}
    best = {v: 1.0}
    frontier = [v]
    for d in range(1, hops + 1):
        nxt: list[NodeId] = []
        for node in frontier:
            through = best[node]
            for u, conf in g.semantic_neighbors(node):
                if conf < theta:
                    continue
                seen = dist.get(u)
                if seen is None:
                    dist[u] = d
                    best[u] = min(through, conf)
                    nxt.append(u)
                elif seen == d:
                    best[u] = max(best[u], min(through, conf))
        frontier = nxt
        if not frontier:
            break
    return {(u, d, best[u]) for u, d in dist.items() if u != v}


def node_for_location(g: RepoGraph, path: str, line: int) -> NodeId:
    """Innermost class/function whose span covers ``line``, else the file node."""
    head = g.file_node(path)
    best: NodeId | None = None
    for n in g._symbols_by_path.get(path, ()):
        start, end = n.span
        if start <= line <= end:
            if best is None or (end - start, -start) < (best.span[1] - best.span[0], -best.span[0]):
                best = n
    return best or head


def induced_subgraph(g: RepoGraph, s: Iterable[NodeId]) -> RepoGraph:
    keep = set(s)
    for n in keep:
        if n not in g:
            raise NodeNotFound(n.key)
    edges = [e for e in g.edges if e.src in keep and e.dst in keep]
    attrs = {n: t for n, t in g.attributes.items() if n in keep}
    return RepoGraph.from_parts(g.snapshot_id, keep, edges, attrs)


def contains_parent(g: RepoGraph) -> dict[NodeId, NodeId]:
    parent = {}
    for e in g.edges:
        if e.relation is RelationKind.CONTAINS:
            parent[e.dst] = e.src
    return parent


__all__ = [
    "CODE_KINDS",
    "CONTAINS_PAIRS",
    "CommunityAssignment",
    "Edge",
    "NodeId",
    "NodeKind",
    "Provenance",
    "ROOT_PATH",
    "RelationKind",
    "RepoGraph",
    "SYMBOL_KINDS",
    "Unit",
    "contains_parent",
    "directory_node",
    "induced_subgraph",
    "make_unit",
    "neighborhood",
    "node_for_location",
]
