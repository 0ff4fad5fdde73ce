"""Worktree enumeration and content hashing."""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Mapping

from ..errors import IoError
from .config import DEFAULT_EXCLUDE_DIRS, IndexConfig


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:24]


def snapshot_hash(files: Mapping[str, str]) -> str:
    h = hashlib.sha256()
    for path in sorted(files):
        h.update(path.encode())
        h.update(b"\0")
        h.update(files[path].encode())
        h.update(b"\n")
    return h.hexdigest()[:24]


def list_files(root: str | os.PathLike, config: IndexConfig, skip: Path | None = None) -> list[str]:
    """Repository-relative POSIX paths of every indexable file, sorted."""
    root_s = os.fspath(root)
    if not os.path.isdir(root_s) or not os.access(root_s, os.R_OK | os.X_OK):
        raise IoError(f"cannot read worktree {root_s}")
    skip_real = os.path.realpath(skip) if skip is not None else None
    out: list[str] = []
    stack = [(root_s, "")]
    while stack:
        path, prefix = stack.pop()
        try:
            entries = list(os.scandir(path))
        except OSError:
            continue
        for entry in entries:
            rel = prefix + entry.name
            if entry.is_dir():
                if entry.name in DEFAULT_EXCLUDE_DIRS:
                    continue
                if skip_real is not None and os.path.realpath(entry.path) == skip_real:
                    continue
                stack.append((entry.path, rel + "/"))
            elif entry.is_file() and config.accepts(rel):
                out.append(rel)
    out.sort()
    return out


def read_worktree(
    root: str | os.PathLike, config: IndexConfig, skip: Path | None = None
) -> dict[str, bytes]:
    root = Path(root)
    data = {}
    for rel in list_files(root, config, skip):
        try:
            data[rel] = (root / rel).read_bytes()
        except OSError as exc:
            raise IoError(f"cannot read {rel}: {exc}") from exc
    return data


def hash_worktree(
    root: str | os.PathLike, config: IndexConfig | None = None, skip: Path | None = None
) -> dict[str, str]:
    config = config or IndexConfig()
    base = os.fspath(root)
    out = {}
    for rel in list_files(root, config, skip):
        try:
            with open(os.path.join(base, rel), "rb") as fh:
                out[rel] = content_hash(fh.read())
        except OSError as exc:
            raise IoError(f"cannot read {rel}: {exc}") from exc
    return out
