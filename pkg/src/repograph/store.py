"""On-disk layout of an index: graph, manifest, communities and sidecars."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .alignment import ref_index
from .errors import IoError
from .extractors import IndexConfig
from .graph import CommunityAssignment, RepoGraph

ENV_DIR = "REPOGRAPH_DIR"
DEFAULT_DIR = ".repograph"


def index_dir(root: str | os.PathLike) -> Path:
    """``$REPOGRAPH_DIR`` (relative paths resolve against ``root``) or ``root/.repograph``."""
    override = os.environ.get(ENV_DIR)
    if override:
        p = Path(override)
        return p if p.is_absolute() else Path(root) / p
    return Path(root) / DEFAULT_DIR


def config_fingerprint(config: IndexConfig) -> dict:
    return {
        "include": list(config.include),
        "exclude": list(config.exclude),
        "drop_tests": config.drop_tests,
        "adapters": list(config.adapters),
    }


@dataclass
class Manifest:
    snapshot_id: str
    files: dict[str, str]
    reverse_refs: dict[str, list[str]] = field(default_factory=dict)
    community_epoch_diff_fraction: float = 0.0
    sidecars: dict[str, dict[str, str]] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "files": dict(sorted(self.files.items())),
            "reverse_refs": {k: sorted(v) for k, v in sorted(self.reverse_refs.items())},
            "community_epoch_diff_fraction": self.community_epoch_diff_fraction,
            "sidecars": {k: dict(v) for k, v in sorted(self.sidecars.items())},
            "config": self.config,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Manifest:
        return cls(
            snapshot_id=data["snapshot_id"],
            files=dict(data["files"]),
            reverse_refs={k: list(v) for k, v in data.get("reverse_refs", {}).items()},
            community_epoch_diff_fraction=float(data.get("community_epoch_diff_fraction", 0.0)),
            sidecars={k: dict(v) for k, v in data.get("sidecars", {}).items()},
            config=dict(data.get("config", {})),
        )

    def refs_by_path(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for key, paths in self.reverse_refs.items():
            for p in paths:
                out.setdefault(p, []).append(key)
        return out


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


class IndexStore:
    def __init__(self, root: str | os.PathLike, directory: str | os.PathLike | None = None) -> None:
        self.root = Path(root)
        self.dir = Path(directory) if directory is not None else index_dir(root)

    @property
    def graph_path(self) -> Path:
        return self.dir / "graph.json"

    @property
    def manifest_path(self) -> Path:
        return self.dir / "manifest.json"

    @property
    def communities_path(self) -> Path:
        return self.dir / "communities.json"

    @property
    def sidecar_dir(self) -> Path:
        return self.dir / "sidecars"

    def exists(self) -> bool:
        return self.manifest_path.is_file() and self.graph_path.is_file()

    def skip_dir(self) -> Path | None:
        """The index directory when it sits inside the worktree, so walks can skip it."""
        try:
            self.dir.resolve().relative_to(self.root.resolve())
        except ValueError:
            return None
        return self.dir

    def load_manifest(self) -> Manifest:
        try:
            return Manifest.from_json(json.loads(self.manifest_path.read_text(encoding="utf-8")))
        except OSError as exc:
            raise IoError(f"cannot read manifest: {exc}") from exc

    def load(self) -> tuple[RepoGraph, Manifest]:
        manifest = self.load_manifest()
        try:
            community = None
            if self.communities_path.is_file():
                community = CommunityAssignment.from_json(json.loads(self.communities_path.read_text()))
            g = RepoGraph.loads(
                self.graph_path.read_text(encoding="utf-8"),
                community=community,
                refs=manifest.refs_by_path(),
            )
        except OSError as exc:
            raise IoError(f"cannot read index: {exc}") from exc
        return g, manifest

    def save(
        self,
        g: RepoGraph,
        files: Mapping[str, str],
        config: IndexConfig,
        sidecars: Mapping[str, Mapping[str, str]] | None = None,
    ) -> Manifest:
        manifest = Manifest(
            snapshot_id=g.snapshot_id,
            files=dict(files),
            reverse_refs=ref_index(g).to_json(),
            community_epoch_diff_fraction=g.community.epoch_diff_fraction if g.community else 0.0,
            sidecars={k: dict(v) for k, v in (sidecars or {}).items()},
            config=config_fingerprint(config),
        )
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            self.graph_path.write_text(g.dumps(), encoding="utf-8")
            if g.community is not None:
                self.communities_path.write_text(_dump(g.community.to_json()), encoding="utf-8")
            self.manifest_path.write_text(_dump(manifest.to_json()), encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot write index under {self.dir}: {exc}") from exc
        return manifest
