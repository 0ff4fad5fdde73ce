"""Commit-aware maintenance: move a cached graph to a new worktree at diff cost."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .communities import compute_communities, label_community
from .errors import IoError, StaleManifest
from .extractors import IndexConfig, parse_file, symbol_table
from .extractors.linker import (
    ROOT_PATH,
    ancestors,
    directory_unit,
    link_file,
    nodes_for,
    parent_dir,
    provided_keys,
)
from .extractors.walker import content_hash, hash_worktree, snapshot_hash
from .graph import CommunityAssignment, NodeId, NodeKind, RepoGraph, Unit, directory_node

DEFAULT_STALE_THRESHOLD = 0.10


@dataclass(frozen=True)
class DiffSet:
    added: frozenset[str] = frozenset()
    modified: frozenset[str] = frozenset()
    deleted: frozenset[str] = frozenset()
    # content hashes of every file in the new worktree, when known
    new_files: Mapping[str, str] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for name in ("added", "modified", "deleted"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.added & self.modified or self.added & self.deleted or self.modified & self.deleted:
            raise ValueError("diff sets must be pairwise disjoint")

    @property
    def size(self) -> int:
        return len(self.added) + len(self.modified) + len(self.deleted)

    @property
    def changed(self) -> frozenset[str]:
        return self.added | self.modified

    @property
    def removed(self) -> frozenset[str]:
        return self.deleted | self.modified

    def to_json(self) -> dict:
        return {
            "added": sorted(self.added),
            "modified": sorted(self.modified),
            "deleted": sorted(self.deleted),
        }


def compute_diff(
    old_manifest: Mapping[str, str],
    new_worktree_root: str | os.PathLike,
    config: IndexConfig | None = None,
    skip: Path | None = None,
) -> DiffSet:
    """File-level difference between a stored ``path -> content hash`` map and a worktree."""
    now = hash_worktree(new_worktree_root, config or IndexConfig(), skip)
    added = {p for p in now if p not in old_manifest}
    deleted = {p for p in old_manifest if p not in now}
    modified = {p for p, h in now.items() if p in old_manifest and old_manifest[p] != h}
    return DiffSet(frozenset(added), frozenset(modified), frozenset(deleted), now)


class RefIndex:
    """Inverse of the per-unit ``refs``: lookup key -> paths that consulted it."""

    def __init__(self, by_key: dict[str, frozenset[str]] | None = None) -> None:
        self.by_key = by_key or {}

    @classmethod
    def from_units(cls, units: Mapping[str, Unit]) -> RefIndex:
        acc: dict[str, set[str]] = {}
        for path, unit in units.items():
            for key in unit.refs:
                acc.setdefault(key, set()).add(path)
        return cls({k: frozenset(v) for k, v in acc.items()})

    def copy(self) -> RefIndex:
        return RefIndex(dict(self.by_key))

    def users(self, keys: Iterable[str]) -> set[str]:
        out: set[str] = set()
        for k in keys:
            out.update(self.by_key.get(k, ()))
        return out

    def replace(self, path: str, old: Iterable[str], new: Iterable[str]) -> None:
        old, new = set(old), set(new)
        for k in old - new:
            left = self.by_key.get(k, frozenset()) - {path}
            if left:
                self.by_key[k] = left
            else:
                self.by_key.pop(k, None)
        for k in new - old:
            self.by_key[k] = self.by_key.get(k, frozenset()) | {path}

    def to_json(self) -> dict[str, list[str]]:
        return {k: sorted(v) for k, v in sorted(self.by_key.items())}


def ref_index(g: RepoGraph) -> RefIndex:
    idx = g.__dict__.get("_ref_index")
    if idx is None:
        idx = RefIndex.from_units(g.units)
        g.__dict__["_ref_index"] = idx
    return idx


def _read(root: Path, path: str) -> bytes:
    try:
        return (root / path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def align(
    g_prev: RepoGraph,
    diff: DiffSet,
    new_worktree_root: str | os.PathLike,
    config: IndexConfig | None = None,
    stale_threshold: float = DEFAULT_STALE_THRESHOLD,
    snapshot_id: str | None = None,
) -> RepoGraph:
    """Apply ``diff`` to ``g_prev`` and return the graph of the new worktree.

    Files in the diff are dropped and re-parsed; unchanged files whose
    recorded lookups touch anything the diff provides (module names, symbol
    basenames, paths) are re-linked; everything else is carried over as is.
    ``g_prev`` is left untouched.
    """
    config = config or IndexConfig()
    root = Path(new_worktree_root)
    if not root.is_dir():
        raise IoError(f"cannot read worktree {root}")
    prev_files = {p for p, u in g_prev.units.items() if u.head.kind is NodeKind.FILE}
    bad = [p for p in diff.removed if p not in prev_files] + [p for p in diff.added if p in prev_files]
    if bad:
        raise StaleManifest(f"diff does not match cached graph: {sorted(bad)[:5]}")

    if snapshot_id is None:
        snapshot_id = config.snapshot_id
    if snapshot_id is None:
        files = diff.new_files if diff.new_files is not None else hash_worktree(root, config)
        snapshot_id = snapshot_hash(files)

    if diff.size == 0:
        g = RepoGraph(snapshot_id, g_prev.units, g_prev.community)
        for name in ("_symbol_table", "_ref_index"):
            if name in g_prev.__dict__:
                g.__dict__[name] = g_prev.__dict__[name]
        return g

    table = symbol_table(g_prev).copy()
    refs = ref_index(g_prev).copy()
    units = dict(g_prev.units)

    affected_keys: set[str] = set()
    old_heads: dict[str, NodeId] = {}
    for path in diff.removed:
        unit = units.pop(path)
        old_heads[path] = unit.head
        affected_keys |= provided_keys(path, unit.nodes)
        refs.replace(path, unit.refs, ())
        table.remove(path)

    parses = {}
    for path in sorted(diff.changed):
        parse = parse_file(path, _read(root, path), config)
        nodes = nodes_for(parse)
        parses[path] = (parse, nodes)
        table.add(path, nodes)
        affected_keys |= provided_keys(path, nodes)

    relink = refs.users(affected_keys) - diff.changed
    relink = {p for p in relink if p in units and units[p].head.kind is NodeKind.FILE}
    for path in sorted(relink):
        parse = parse_file(path, _read(root, path), config)
        parses[path] = (parse, nodes_for(parse))

    for path, (parse, nodes) in parses.items():
        old = units.get(path)
        unit, _ = link_file(parse, nodes, table)
        units[path] = unit
        refs.replace(path, old.refs if old is not None else (), unit.refs)

    _patch_directories(units, old_heads, {p: units[p].head for p in diff.changed})

    community = _carry_community(g_prev, units, diff, relink, stale_threshold, len(prev_files))
    g = RepoGraph(snapshot_id, units, community)
    g.__dict__["_symbol_table"] = table
    g.__dict__["_ref_index"] = refs
    return g


def _patch_directories(
    units: dict[str, Unit], old_heads: Mapping[str, NodeId], new_heads: Mapping[str, NodeId]
) -> None:
    kids: dict[str, set[NodeId]] = {}

    def children(d: str) -> set[NodeId]:
        if d not in kids:
            unit = units.get(d)
            kids[d] = {e.dst for e in unit.edges} if unit is not None else set()
        return kids[d]

    for path, head in old_heads.items():
        for d in ancestors(path):
            children(d)
        children(parent_dir(path)).discard(head)
    for path, head in new_heads.items():
        for d in ancestors(path):
            children(d)
        children(parent_dir(path)).add(head)
    # settle bottom-up: drop empty directories, link surviving ones to their parent
    for d in sorted(kids, key=lambda p: (-p.count("/"), p)):
        if d == ROOT_PATH:
            continue
        if kids[d]:
            children(parent_dir(d)).add(directory_node(d))
        else:
            children(parent_dir(d)).discard(directory_node(d))
    for d in sorted(kids, key=lambda p: (-p.count("/"), p)):
        if kids[d] or d == ROOT_PATH:
            units[d] = directory_unit(d, kids[d])
        else:
            units.pop(d, None)


def _carry_community(
    g_prev: RepoGraph,
    units: Mapping[str, Unit],
    diff: DiffSet,
    relink: set[str],
    stale_threshold: float,
    prev_file_count: int,
) -> CommunityAssignment | None:
    prev = g_prev.community
    if prev is None:
        return None
    kappa = {p: c for p, c in prev.kappa.items() if p not in diff.deleted}
    cohesion = {p: v for p, v in prev.cohesion.items() if p not in diff.deleted}
    labels = dict(prev.labels)
    touched = diff.changed | relink
    next_id = max(labels, default=-1) + 1
    for path in sorted(diff.changed):
        if path in kappa:
            continue
        weights: dict[str, int] = {}
        for owner in touched:
            for e in units[owner].edges:
                if not e.is_semantic:
                    continue
                if e.src.path == path and e.dst.path != path:
                    other = e.dst.path
                elif e.dst.path == path and e.src.path != path:
                    other = e.src.path
                else:
                    continue
                if other in kappa:
                    weights[other] = weights.get(other, 0) + 1
        if weights:
            best = min(weights, key=lambda p: (-weights[p], p))
            kappa[path] = kappa[best]
            cohesion[path] = cohesion.get(best, 1.0)
        else:
            kappa[path] = next_id
            labels[next_id] = label_community([path])
            cohesion[path] = 1.0
            next_id += 1
    live = set(kappa.values())
    labels = {c: lbl for c, lbl in labels.items() if c in live}
    fraction = prev.epoch_diff_fraction + diff.size / max(1, prev_file_count)
    return CommunityAssignment(
        kappa, labels, cohesion, stale=prev.stale or fraction > stale_threshold, epoch_diff_fraction=fraction
    )


def recompute_if_stale(
    g: RepoGraph, threshold_fraction: float = DEFAULT_STALE_THRESHOLD, seed: int = 42, resolution: float = 1.0
) -> RepoGraph:
    """Re-run partitioning once the cumulative changed-file share passes the threshold.

    A threshold of 0 recomputes unconditionally.
    """
    comm = g.community
    if comm is None or threshold_fraction <= 0 or comm.epoch_diff_fraction > threshold_fraction:
        return compute_communities(g, seed, resolution)
    return g


def manifest_hashes(diff: DiffSet, old_manifest: Mapping[str, str], root: str | os.PathLike) -> dict[str, str]:
    """New ``path -> hash`` map after applying ``diff``."""
    if diff.new_files is not None:
        return dict(diff.new_files)
    out = {p: h for p, h in old_manifest.items() if p not in diff.deleted}
    for p in diff.changed:
        out[p] = content_hash(_read(Path(root), p))
    return out
