"""Repository graphs for code navigation.

Build a typed, confidence-weighted graph of a worktree, keep it current with
file-level diffs, partition it into communities, and use it to attach
related-file evidence to plain regex search results.
"""

from .alignment import DiffSet, align, compute_diff, recompute_if_stale
from .communities import compute_communities, detect_communities, project_file_graph
from .errors import (
    InfeasibleSpec,
    InvalidArgument,
    IoError,
    MissingCommunities,
    NodeNotFound,
    RepoGraphError,
    SidecarNotFound,
    StaleManifest,
    StaleSidecar,
)
from .expansion import (
    AnchorSet,
    Context,
    ExpansionConfig,
    LexicalMatch,
    align_matches,
    expand,
    fold_context,
    score_neighbor,
    select_neighbors,
)
from .extractors import ExtractionReport, IndexConfig, build_graph, confidence_of, resolve_reference
from .graph import (
    CommunityAssignment,
    Edge,
    NodeId,
    NodeKind,
    Provenance,
    RelationKind,
    RepoGraph,
    induced_subgraph,
    neighborhood,
    node_for_location,
)
from .sidecar import NeighborRef, SidecarRecord, build_sidecars, derive_flows, load_sidecar

__version__ = "0.1.0"

__all__ = [
    "AnchorSet",
    "CommunityAssignment",
    "Context",
    "DiffSet",
    "Edge",
    "ExpansionConfig",
    "ExtractionReport",
    "IndexConfig",
    "InfeasibleSpec",
    "InvalidArgument",
    "IoError",
    "LexicalMatch",
    "MissingCommunities",
    "NeighborRef",
    "NodeId",
    "NodeKind",
    "NodeNotFound",
    "Provenance",
    "RelationKind",
    "RepoGraph",
    "RepoGraphError",
    "SidecarNotFound",
    "SidecarRecord",
    "StaleManifest",
    "StaleSidecar",
    "align",
    "align_matches",
    "build_graph",
    "build_sidecars",
    "compute_communities",
    "compute_diff",
    "confidence_of",
    "derive_flows",
    "detect_communities",
    "expand",
    "fold_context",
    "induced_subgraph",
    "load_sidecar",
    "neighborhood",
    "node_for_location",
    "project_file_graph",
    "recompute_if_stale",
    "resolve_reference",
    "score_neighbor",
    "select_neighbors",
]
