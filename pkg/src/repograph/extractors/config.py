"""Index configuration and path classification."""

from __future__ import annotations

import fnmatch
import os
from dataclasses import dataclass, field, fields
from pathlib import Path, PurePosixPath

import tomli

DEFAULT_EXCLUDE_DIRS = frozenset(
    {".git", ".hg", ".svn", ".repograph", "__pycache__", "node_modules", ".venv", ".tox"}
)

DOC_EXTENSIONS = frozenset({".md", ".rst", ".txt"})
CONFIG_EXTENSIONS = frozenset({".toml", ".yaml", ".yml", ".ini", ".cfg", ".json"})


@dataclass
class IndexConfig:
    include: tuple[str, ...] = ("*",)
    exclude: tuple[str, ...] = ()
    drop_tests: bool = False
    adapters: tuple[str, ...] = ("python", "regex")
    snapshot_id: str | None = None
    # expansion, community and sidecar knobs read from the same file
    k: int = 10
    theta: float = 0.5
    hops: int = 1
    anchors: int = 10
    budget: int = 22000
    seed: int = 42
    resolution: float = 1.0
    sidecar_cap: int = 20
    stale_threshold: float = 0.10
    flow_max_len: int = 8
    extra: dict = field(default_factory=dict)

    def accepts(self, rel_path: str) -> bool:
        if self.include != ("*",) and not any(fnmatch.fnmatch(rel_path, pat) for pat in self.include):
            return False
        if any(fnmatch.fnmatch(rel_path, pat) for pat in self.exclude):
            return False
        if self.drop_tests and is_test_path(rel_path):
            return False
        return True


def load_config(path: str | os.PathLike | None, **overrides) -> IndexConfig:
    """Read a TOML config (top-level keys or an ``[index]`` table) and apply overrides."""
    data: dict = {}
    if path is not None and Path(path).is_file():
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
        for section in ("index", "expansion", "sidecar", "communities"):
            data.update(raw.pop(section, {}) or {})
        data.update(raw)
    known = {f.name for f in fields(IndexConfig)}
    kwargs = {k: v for k, v in data.items() if k in known}
    extra = {k: v for k, v in data.items() if k not in known}
    for key in ("include", "exclude", "adapters"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return IndexConfig(extra=extra, **kwargs)


def is_test_path(rel_path: str) -> bool:
    p = PurePosixPath(rel_path)
    name = p.name
    stem, _, ext = name.rpartition(".")
    if name.startswith("test_") or (ext and stem.endswith("_test")):
        return True
    return "tests" in p.parts[:-1]


def is_doc_path(rel_path: str) -> bool:
    return PurePosixPath(rel_path).suffix.lower() in DOC_EXTENSIONS


def is_config_path(rel_path: str) -> bool:
    p = PurePosixPath(rel_path)
    return len(p.parts) == 1 and p.suffix.lower() in CONFIG_EXTENSIONS
