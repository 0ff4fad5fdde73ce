"""Fixed per-provenance edge confidences."""

from __future__ import annotations

from ..graph import Edge, NodeId, Provenance, RelationKind

CONFIDENCE: dict[Provenance, float] = {
    Provenance.SAME_FILE_COOCCURRENCE: 1.0,
    Provenance.EXPLICIT_IMPORT: 0.95,
    Provenance.RESOLVED_IMPORT: 0.9,
    Provenance.INHERITANCE: 0.9,
    Provenance.CYTHON_IMPLEMENTATION: 0.85,
    Provenance.TEST_LINKAGE: 0.75,
    Provenance.DOCUMENTATION: 0.6,
    Provenance.CONFIGURATION: 0.5,
    Provenance.FUZZY_NAME_MATCH: 0.5,
    Provenance.STRUCTURAL: 1.0,
}

TABLE_VALUES = frozenset(CONFIDENCE.values())


def confidence_of(p: Provenance) -> float:
    return CONFIDENCE[Provenance(p)]


def make_edge(src: NodeId, relation: RelationKind, dst: NodeId, provenance: Provenance) -> Edge:
    return Edge(src, relation, dst, provenance, CONFIDENCE[provenance])


def contains(parent: NodeId, child: NodeId) -> Edge:
    return make_edge(parent, RelationKind.CONTAINS, child, Provenance.STRUCTURAL)
