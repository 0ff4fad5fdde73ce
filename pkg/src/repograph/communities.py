"""File-level projection of the graph and Leiden community partitioning."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import PurePosixPath
from typing import Iterable

import igraph
import leidenalg

from .graph import CommunityAssignment, RepoGraph


@dataclass
class FileGraph:
    """Weighted undirected graph over file paths; weights keyed by sorted pairs."""

    files: list[str]
    weights: dict[tuple[str, str], int] = field(default_factory=dict)

    def weight(self, a: str, b: str) -> int:
        return self.weights.get((a, b) if a < b else (b, a), 0)

    def neighbors(self, path: str) -> dict[str, int]:
        out = {}
        for (a, b), w in self.weights.items():
            if a == path:
                out[b] = w
            elif b == path:
                out[a] = w
        return out


def project_file_graph(g: RepoGraph) -> FileGraph:
    files = g.file_paths
    known = set(files)
    weights: Counter = Counter()
    for e in g.semantic_edges():
        a, b = e.src.path, e.dst.path
        if a == b or a not in known or b not in known:
            continue
        weights[(a, b) if a < b else (b, a)] += 1
    return FileGraph(files, dict(sorted(weights.items())))


def modularity(fg: FileGraph, kappa: dict[str, int], resolution: float = 1.0) -> float:
    """Newman modularity of a partition of a weighted undirected graph."""
    m = sum(fg.weights.values())
    if m == 0:
        return 0.0
    inside: Counter = Counter()
    degree: Counter = Counter()
    for (a, b), w in fg.weights.items():
        degree[kappa[a]] += w
        degree[kappa[b]] += w
        if kappa[a] == kappa[b]:
            inside[kappa[a]] += w
    return sum(inside[c] / m - resolution * (degree[c] / (2 * m)) ** 2 for c in degree)


_SPLIT = re.compile(r"[^A-Za-z0-9]+")
_CAMEL = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def _tokens(path: str) -> list[str]:
    stem = PurePosixPath(path).name.split(".")[0]
    out = []
    for chunk in _SPLIT.split(stem):
        out.extend(t.lower() for t in _CAMEL.findall(chunk))
    return out


def label_community(member_files: Iterable[str]) -> str:
    """Two most frequent basename tokens, camel-cased; ties go lexicographic."""
    counts: Counter = Counter()
    for path in member_files:
        counts.update(_tokens(path))
    if not counts:
        return "Misc"
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:2]
    return "".join(tok.capitalize() for tok, _ in ranked)


def _density(members: list[str], fg: FileGraph) -> float:
    n = len(members)
    if n <= 1:
        return 1.0
    inside = set(members)
    edges = sum(1 for (a, b) in fg.weights if a in inside and b in inside)
    return edges / (n * (n - 1) / 2)


def assignment_from_groups(groups: list[list[str]], fg: FileGraph) -> CommunityAssignment:
    groups = sorted((sorted(grp) for grp in groups if grp), key=lambda grp: grp[0])
    kappa, labels, cohesion = {}, {}, {}
    for cid, members in enumerate(groups):
        labels[cid] = label_community(members)
        dens = _density(members, fg)
        for path in members:
            kappa[path] = cid
            cohesion[path] = dens
    return CommunityAssignment(kappa, labels, cohesion, stale=False)


def detect_communities(fg: FileGraph, seed: int = 42, resolution: float = 1.0) -> CommunityAssignment:
    """Leiden partition of the projected file graph.

    Isolated files are always singletons.  If Leiden ends below the
    one-community partition (modularity 0) the connected files are merged,
    which keeps the result at or above both trivial partitions.
    """
    files = fg.files
    if not fg.weights:
        return assignment_from_groups([[f] for f in files], fg)
    index = {f: i for i, f in enumerate(files)}
    pairs = list(fg.weights.items())
    ig = igraph.Graph(n=len(files), edges=[(index[a], index[b]) for (a, b), _ in pairs])
    ig.es["weight"] = [float(w) for _, w in pairs]
    part = leidenalg.find_partition(
        ig,
        leidenalg.RBConfigurationVertexPartition,
        weights="weight",
        resolution_parameter=resolution,
        seed=seed,
        n_iterations=-1,
    )
    groups: dict[int, list[str]] = {}
    for i, cid in enumerate(part.membership):
        groups.setdefault(cid, []).append(files[i])
    result = assignment_from_groups(list(groups.values()), fg)
    if modularity(fg, dict(result.kappa), resolution) < 0.0:
        connected = {p for pair in fg.weights for p in pair}
        merged = [sorted(connected)] + [[f] for f in files if f not in connected]
        result = assignment_from_groups(merged, fg)
    return result


def compute_communities(g: RepoGraph, seed: int = 42, resolution: float = 1.0) -> RepoGraph:
    return g.with_community(detect_communities(project_file_graph(g), seed, resolution))
