"""Wall-clock comparison of full rebuild versus diff-driven alignment."""

from __future__ import annotations

import random
import statistics
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..alignment import align, compute_diff, ref_index
from ..communities import compute_communities
from ..extractors import build_graph
from ..extractors.walker import hash_worktree
from ..extractors.config import IndexConfig
from .synthetic import SyntheticRepoSpec, generate_repo


@dataclass(frozen=True)
class BenchRow:
    size: int
    diff_files: int
    t_rebuild: float
    t_align: float

    @property
    def speedup(self) -> float:
        return self.t_rebuild / self.t_align if self.t_align > 0 else float("inf")

    def to_json(self) -> dict:
        return {**asdict(self), "speedup": self.speedup}


def _touch(root: Path, paths: list[str], rep: int) -> None:
    for i, p in enumerate(paths):
        with open(root / p, "a", encoding="utf-8") as fh:
            fh.write(f"\n\ndef bench_edit_{rep}_{i}(obj=None):\n    return {rep}\n")


def bench_size(size: int, diff_fraction: float, repetitions: int, workdir: Path, seed: int = 0) -> BenchRow:
    spec = SyntheticRepoSpec(file_count=size, y_size=0, seed=seed)
    plant = generate_repo(spec, workdir / f"repo_{size}")
    root = plant.root
    config = IndexConfig()
    files = sorted({p for p, _ in plant.functions})
    n_diff = 0 if diff_fraction <= 0 else max(1, round(diff_fraction * len(files)))
    rng = random.Random(seed)
    original = {p: (root / p).read_bytes() for p in files}

    base, _ = build_graph(root, config)
    base = compute_communities(base)
    ref_index(base)  # part of the persisted index, not of the align step
    manifest = hash_worktree(root, config)

    t_rebuild, t_align = [], []
    for rep in range(repetitions):
        touched = rng.sample(files, n_diff)
        _touch(root, touched, rep)

        start = time.perf_counter()
        diff = compute_diff(manifest, root, config)
        align(base, diff, root, config)
        t_align.append(time.perf_counter() - start)

        start = time.perf_counter()
        full, _ = build_graph(root, config)
        compute_communities(full)
        t_rebuild.append(time.perf_counter() - start)

        for p in touched:
            (root / p).write_bytes(original[p])
    return BenchRow(size, n_diff, statistics.median(t_rebuild), statistics.median(t_align))


def bench_align(
    sizes: list[int] | tuple[int, ...] = (200, 500, 1000, 2000),
    diff_fraction: float = 0.01,
    repetitions: int = 5,
    workdir: str | Path | None = None,
    seed: int = 0,
) -> list[BenchRow]:
    """Median-of-``repetitions`` timings per repository size."""
    if workdir is None:
        with tempfile.TemporaryDirectory() as tmp:
            return [bench_size(n, diff_fraction, repetitions, Path(tmp), seed) for n in sizes]
    return [bench_size(n, diff_fraction, repetitions, Path(workdir), seed) for n in sizes]


def slopes(rows: list[BenchRow]) -> tuple[float, float]:
    """Least-squares slopes (seconds per file) of rebuild and align time against size."""
    x = np.array([r.size for r in rows], dtype=float)
    rebuild = np.polyfit(x, [r.t_rebuild for r in rows], 1)[0]
    aligned = np.polyfit(x, [r.t_align for r in rows], 1)[0]
    return float(rebuild), float(aligned)
