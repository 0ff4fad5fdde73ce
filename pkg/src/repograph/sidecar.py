"""Per-file JSON sidecars: typed neighbors, community, flows and cross-role links."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import IoError, MissingCommunities, SidecarNotFound, StaleSidecar
from .graph import Edge, NodeKind, RelationKind, RepoGraph

DEFAULT_CAP = 20
COMPACT_CAP = 10
SUFFIX = ".graph.json"

_DEPENDENCY_RELATIONS = frozenset({RelationKind.IMPORTS, RelationKind.INVOKES, RelationKind.INHERITS})


@dataclass(frozen=True, order=True)
class NeighborRef:
    path: str
    symbol: str
    relation: str
    confidence: float

    def sort_key(self) -> tuple:
        return (-self.confidence, self.path, self.symbol, self.relation)

    def render(self) -> str:
        target = f"{self.path}:{self.symbol}" if self.symbol else self.path
        return f"{target} [{format_confidence(self.confidence)}]"


@dataclass
class SidecarRecord:
    path: str
    snapshot_id: str
    community: dict
    dependents: list[NeighborRef] = field(default_factory=list)
    dependencies: list[NeighborRef] = field(default_factory=list)
    callers: list[NeighborRef] = field(default_factory=list)
    callees: list[NeighborRef] = field(default_factory=list)
    flows: list[dict] = field(default_factory=list)
    tests: list[str] = field(default_factory=list)
    docs: list[str] = field(default_factory=list)
    configs: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("dependents", "dependencies", "callers", "callees"):
            for ref in out[key]:
                ref["confidence"] = round(ref["confidence"], 2)
        return out

    def dumps(self) -> str:
        return canonical_json(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> SidecarRecord:
        refs = {
            key: [NeighborRef(r["path"], r["symbol"], r["relation"], float(r["confidence"])) for r in data[key]]
            for key in ("dependents", "dependencies", "callers", "callees")
        }
        return cls(
            path=data["path"],
            snapshot_id=data["snapshot_id"],
            community=dict(data["community"]),
            flows=[dict(f) for f in data["flows"]],
            tests=list(data["tests"]),
            docs=list(data["docs"]),
            configs=list(data["configs"]),
            **refs,
        )


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def format_confidence(c: float) -> str:
    """Two decimals with trailing zeros trimmed, keeping one: 1.0, 0.95, 0.9."""
    text = f"{c:.2f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def derive_flows(g: RepoGraph, max_len: int = 8) -> dict[str, list[dict]]:
    """Greedy highest-confidence call chains from every uncalled function.

    Each chain is reduced to its sequence of distinct files; every file on it
    gets ``{"name", "step", "of"}`` with 1-based ``step``.
    """
    out_edges: dict = {}
    called = set()
    for e in g.edges:
        if e.relation is RelationKind.INVOKES:
            out_edges.setdefault(e.src, []).append(e)
            called.add(e.dst)
    for src, edges in out_edges.items():
        edges.sort(key=lambda e: (-e.confidence, e.dst.path, e.dst.qualified_name, e.dst.span))
    flows: dict[str, set[tuple[str, int, int]]] = {}
    entries = sorted(n for n in g.nodes if n.kind is NodeKind.FUNCTION and n not in called)
    for entry in entries:
        chain = [entry]
        seen = {entry}
        cur = entry
        for _ in range(max_len):
            nxt = out_edges.get(cur)
            if not nxt:
                break
            target = nxt[0].dst
            if target in seen:
                break
            chain.append(target)
            seen.add(target)
            cur = target
        files: list[str] = []
        for node in chain:
            if node.path not in files:
                files.append(node.path)
        for i, path in enumerate(files, start=1):
            flows.setdefault(path, set()).add((entry.qualified_name, i, len(files)))
    return {
        path: [{"name": n, "step": s, "of": o} for n, s, o in sorted(items)]
        for path, items in flows.items()
    }


def _ref(edge: Edge, far_side_is_src: bool) -> NeighborRef:
    node = edge.src if far_side_is_src else edge.dst
    return NeighborRef(node.path, node.qualified_name, edge.relation.value, edge.confidence)


def _top(refs: set[NeighborRef], cap: int) -> list[NeighborRef]:
    """Strongest reference per (path, symbol, relation), best first, at most ``cap``."""
    best: dict[tuple[str, str, str], NeighborRef] = {}
    for ref in sorted(refs, key=NeighborRef.sort_key):
        best.setdefault((ref.path, ref.symbol, ref.relation), ref)
    return sorted(best.values(), key=NeighborRef.sort_key)[:cap]


def build_records(g: RepoGraph, cap: int = DEFAULT_CAP, flow_max_len: int = 8) -> dict[str, SidecarRecord]:
    comm = g.community
    if comm is None:
        raise MissingCommunities("graph has no community assignment")
    incoming: dict[str, list[Edge]] = {}
    outgoing: dict[str, list[Edge]] = {}
    for e in g.semantic_edges():
        if e.src.path == e.dst.path:
            continue
        outgoing.setdefault(e.src.path, []).append(e)
        incoming.setdefault(e.dst.path, []).append(e)
    flows = derive_flows(g, flow_max_len)
    records = {}
    for path in g.file_paths:
        cid = comm.kappa.get(path)
        community = {
            "id": cid,
            "label": comm.labels.get(cid, "") if cid is not None else "",
            "cohesion": round(comm.cohesion.get(path, 1.0), 4),
        }
        ins = incoming.get(path, [])
        outs = outgoing.get(path, [])
        records[path] = SidecarRecord(
            path=path,
            snapshot_id=g.snapshot_id,
            community=community,
            dependents=_top({_ref(e, True) for e in ins if e.relation in _DEPENDENCY_RELATIONS}, cap),
            dependencies=_top({_ref(e, False) for e in outs if e.relation in _DEPENDENCY_RELATIONS}, cap),
            callers=_top({_ref(e, True) for e in ins if e.relation is RelationKind.INVOKES}, cap),
            callees=_top({_ref(e, False) for e in outs if e.relation is RelationKind.INVOKES}, cap),
            flows=flows.get(path, []),
            tests=sorted({e.dst.path for e in outs if e.relation is RelationKind.TESTED_BY}),
            docs=sorted({e.src.path for e in ins if e.relation is RelationKind.DOCUMENTS}),
            configs=sorted({e.src.path for e in ins if e.relation is RelationKind.CONFIGURES}),
        )
    return records


def sidecar_path(out_dir: str | os.PathLike, file_path: str) -> Path:
    return Path(out_dir) / (file_path + SUFFIX)


def _digest(record: SidecarRecord) -> str:
    body = record.to_json()
    body["snapshot_id"] = ""
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()[:24]


def write_sidecars(
    g: RepoGraph,
    out_dir: str | os.PathLike,
    cap: int = DEFAULT_CAP,
    previous: Mapping[str, Mapping[str, str]] | None = None,
    flow_max_len: int = 8,
) -> tuple[int, dict[str, dict[str, str]]]:
    """Write sidecars, skipping records whose content is unchanged since ``previous``.

    ``previous`` maps path -> {"snapshot_id", "digest"} as returned by an
    earlier call.  Returns the number of files written and the new map.
    """
    records = build_records(g, cap, flow_max_len)
    previous = previous or {}
    index: dict[str, dict[str, str]] = {}
    written = 0
    try:
        for path, record in records.items():
            digest = _digest(record)
            old = previous.get(path)
            target = sidecar_path(out_dir, path)
            if old is not None and old.get("digest") == digest and target.exists():
                index[path] = dict(old)
                continue
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(record.dumps(), encoding="utf-8")
            index[path] = {"snapshot_id": g.snapshot_id, "digest": digest}
            written += 1
        for path in set(previous) - set(records):
            stale = sidecar_path(out_dir, path)
            if stale.exists():
                stale.unlink()
    except OSError as exc:
        raise IoError(f"cannot write sidecars under {out_dir}: {exc}") from exc
    return written, index


def build_sidecars(g: RepoGraph, cap: int, out_dir: str | os.PathLike, flow_max_len: int = 8) -> int:
    written, _ = write_sidecars(g, out_dir, cap, None, flow_max_len)
    return written


def load_sidecar(
    out_dir: str | os.PathLike, file_path: str, expected_snapshot: str | None = None
) -> SidecarRecord:
    """Read one sidecar and check it against the snapshot the index expects.

    When ``expected_snapshot`` is omitted the ``manifest.json`` next to
    ``out_dir`` is consulted, if there is one.
    """
    base = Path(out_dir).resolve()
    target = sidecar_path(out_dir, file_path).resolve()
    if base not in target.parents or not target.is_file():
        raise SidecarNotFound(file_path)
    record = SidecarRecord.from_json(json.loads(target.read_text(encoding="utf-8")))
    if expected_snapshot is None:
        manifest = base.parent / "manifest.json"
        if manifest.is_file():
            entry = json.loads(manifest.read_text()).get("sidecars", {}).get(file_path)
            if entry is None:
                raise StaleSidecar(f"{file_path}: not in the current manifest")
            expected_snapshot = entry["snapshot_id"]
    if expected_snapshot is not None and record.snapshot_id != expected_snapshot:
        raise StaleSidecar(f"{file_path}: written for {record.snapshot_id}, index is at {expected_snapshot}")
    return record
