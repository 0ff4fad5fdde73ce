"""``repograph`` command line: index, align, search, sidecar, bench-align, simulate."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import tempfile
import time
from pathlib import Path
from typing import Callable

from .alignment import align, compute_diff, recompute_if_stale
from .communities import compute_communities
from .errors import IoError, RepoGraphError, SidecarNotFound, StaleSidecar
from .expansion import ExpansionConfig
from .extractors import build_graph, load_config
from .extractors.config import IndexConfig
from .extractors.walker import hash_worktree
from .graph import RepoGraph
from .search import graph_search
from .sidecar import COMPACT_CAP, SidecarRecord, build_records, load_sidecar, write_sidecars
from .store import IndexStore, config_fingerprint

EXIT_OK = 0
EXIT_NO_MATCH = 1
EXIT_ERROR = 2
EXIT_NO_INDEX = 3

CONFIG_NAME = "repograph.toml"
GLOBAL_DEFAULTS = {"repo": ".", "config": None, "json": False}


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    elif text:
        print(text)


def _fail(args, code: int, message: str) -> int:
    if args.json:
        print(json.dumps({"error": message, "exit": code}, sort_keys=True))
    print(f"repograph: {message}", file=sys.stderr)
    return code


def _config(args) -> IndexConfig:
    path = args.config
    if path is None:
        candidates = (IndexStore(args.repo).dir / "config.toml", Path(args.repo) / CONFIG_NAME)
        path = next((c for c in candidates if c.is_file()), None)
    return load_config(path, drop_tests=getattr(args, "drop_tests", None) or None)


def _cap(args, config: IndexConfig) -> int:
    return COMPACT_CAP if getattr(args, "compact", False) else config.sidecar_cap


def _build(store: IndexStore, config: IndexConfig, cap: int):
    g, report = build_graph(store.root, config, store.skip_dir())
    g = compute_communities(g, config.seed, config.resolution)
    written, index = write_sidecars(g, store.sidecar_dir, cap, None, config.flow_max_len)
    store.save(g, report.file_hashes, config, index)
    return g, report, written


def cmd_index(args) -> int:
    config = _config(args)
    store = IndexStore(args.repo)
    files = hash_worktree(store.root, config, store.skip_dir())
    if store.exists() and not args.force:
        manifest = store.load_manifest()
        if manifest.files == files and manifest.config == config_fingerprint(config):
            _emit(args, {"status": "up-to-date", "snapshot_id": manifest.snapshot_id}, "index up to date")
            return EXIT_OK
    start = time.perf_counter()
    g, report, written = _build(store, config, _cap(args, config))
    elapsed = time.perf_counter() - start
    payload = {
        "status": "built",
        "snapshot_id": g.snapshot_id,
        "report": report.to_json(),
        "sidecars_written": written,
        "communities": len(set(g.community.kappa.values())),
        "elapsed_s": round(elapsed, 4),
    }
    _emit(args, payload, f"{report.summary()}\nsnapshot {g.snapshot_id}, {written} sidecars, {elapsed:.2f}s")
    return EXIT_OK


def _align(store: IndexStore, config: IndexConfig, cap: int) -> dict:
    """Bring the stored index up to the worktree; returns a summary."""
    start = time.perf_counter()
    g, manifest = store.load()
    diff = compute_diff(manifest.files, store.root, config, store.skip_dir())
    summary = {"delta": diff.size, **diff.to_json(), "sidecars_written": 0}
    if diff.size:
        aligned = align(g, diff, store.root, config, config.stale_threshold)
        g2 = recompute_if_stale(aligned, config.stale_threshold, config.seed, config.resolution)
        written, index = write_sidecars(g2, store.sidecar_dir, cap, manifest.sidecars, config.flow_max_len)
        store.save(g2, dict(diff.new_files), config, index)
        summary["sidecars_written"] = written
        summary["snapshot_id"] = g2.snapshot_id
        summary["recomputed_communities"] = g2 is not aligned
    else:
        summary["snapshot_id"] = g.snapshot_id
    summary["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return summary


def cmd_align(args) -> int:
    config = _config(args)
    store = IndexStore(args.repo)
    if not store.exists():
        return _fail(args, EXIT_NO_INDEX, f"no index under {store.dir}; run `repograph index` first")
    summary = _align(store, config, _cap(args, config))
    text = f"Δ={summary['delta']}"
    if summary["delta"]:
        text += (
            f" (+{len(summary['added'])} ~{len(summary['modified'])} -{len(summary['deleted'])}),"
            f" {summary['sidecars_written']} sidecars rewritten"
        )
    text += f" in {summary['elapsed_ms']:.1f} ms"
    _emit(args, summary, text)
    return EXIT_OK


def _record_loader(store: IndexStore, g: RepoGraph, sidecars: dict, cap: int, config: IndexConfig) -> Callable:
    fallback: dict[str, SidecarRecord] = {}

    def record_for(path: str) -> SidecarRecord | None:
        entry = sidecars.get(path)
        try:
            if entry is None:
                raise SidecarNotFound(path)
            record = load_sidecar(store.sidecar_dir, path, entry["snapshot_id"])
        except (SidecarNotFound, StaleSidecar):
            if not fallback:
                fallback.update(build_records(g, cap, config.flow_max_len))
            record = fallback.get(path)
        if record is not None:
            for key in ("dependents", "dependencies", "callers", "callees"):
                setattr(record, key, getattr(record, key)[:cap])
        return record

    return record_for


def cmd_search(args) -> int:
    try:
        pattern = re.compile(args.pattern)
    except re.error as exc:
        return _fail(args, EXIT_ERROR, f"invalid regex: {exc}")
    config = _config(args)
    store = IndexStore(args.repo)
    if not store.exists():
        return _fail(args, EXIT_NO_INDEX, f"no index under {store.dir}; run `repograph index` first")
    cap = _cap(args, config)
    if not args.no_align:
        _align(store, config, cap)
    g, manifest = store.load()
    cfg = ExpansionConfig(
        k=args.k if args.k is not None else config.k,
        theta=args.theta if args.theta is not None else config.theta,
        hops=args.hops if args.hops is not None else config.hops,
        m=args.anchors if args.anchors is not None else config.anchors,
        budget=args.budget if args.budget is not None else config.budget,
    )
    result = graph_search(
        pattern,
        g,
        store.root,
        cfg,
        _record_loader(store, g, manifest.sidecars, cap, config),
        graph=not args.no_graph,
    )
    if args.json:
        print(json.dumps(result.to_json(graph=not args.no_graph), sort_keys=True))
    else:
        sys.stdout.write(result.render(graph=not args.no_graph))
    return EXIT_OK if result.hits else EXIT_NO_MATCH


def cmd_sidecar(args) -> int:
    config = _config(args)
    store = IndexStore(args.repo)
    if not store.exists():
        return _fail(args, EXIT_NO_INDEX, f"no index under {store.dir}; run `repograph index` first")
    g, manifest = store.load()
    cap = _cap(args, config)
    if args.rebuild or not manifest.sidecars:
        written, index = write_sidecars(g, store.sidecar_dir, cap, None, config.flow_max_len)
        store.save(g, manifest.files, config, index)
        manifest.sidecars = index
    else:
        written = 0
    if args.path:
        entry = manifest.sidecars.get(args.path)
        try:
            record = load_sidecar(store.sidecar_dir, args.path, entry["snapshot_id"] if entry else None)
        except SidecarNotFound:
            return _fail(args, EXIT_ERROR, f"no sidecar for {args.path}")
        sys.stdout.write(record.dumps())
        return EXIT_OK
    _emit(args, {"sidecars_written": written, "dir": str(store.sidecar_dir)}, f"{written} sidecars written")
    return EXIT_OK


def cmd_bench_align(args) -> int:
    from .sim.bench import bench_align, slopes

    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = bench_align(sizes, args.diff, args.reps, seed=args.seed)
    payload = {"rows": [r.to_json() for r in rows]}
    if len(rows) >= 2:
        rebuild, aligned = slopes(rows)
        payload["slope_rebuild"] = rebuild
        payload["slope_align"] = aligned
    lines = [f"{'size':>6} {'diff':>5} {'rebuild_s':>10} {'align_s':>9} {'speedup':>8}"]
    for r in rows:
        lines.append(f"{r.size:>6} {r.diff_files:>5} {r.t_rebuild:>10.4f} {r.t_align:>9.4f} {r.speedup:>8.1f}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .sim.runner import random_spec, simulate, with_seed
    from .sim.synthetic import spec_from_file

    base = spec_from_file(args.spec) if args.spec else None
    cfg = ExpansionConfig(k=args.k, theta=args.theta, hops=args.hops, m=args.anchors, budget=args.budget)
    runs = []
    with tempfile.TemporaryDirectory() as tmp:
        for seed in range(args.seed, args.seed + args.seeds):
            spec = with_seed(base, seed) if base else random_spec(seed)
            result = simulate(spec, Path(tmp) / f"run_{seed}", cfg, decoys=args.decoys)
            data = result.to_json()
            if not args.traces:
                data.pop("traces")
            runs.append(data)
    lines = [f"{'seed':>5} {'|Y|':>4} {'|H_T|':>6} {'lex':>6} {'augmented':>9}"]
    for r in runs:
        lines.append(
            f"{r['seed']:>5} {len(r['y']):>4} {r['h_t_size']:>6} {r['recall_lex']:>6} {r['recall_augmented']:>9}"
        )
    _emit(args, {"runs": runs}, "\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--repo", default=argparse.SUPPRESS, help="worktree root (default: .)")
    common.add_argument("--config", default=argparse.SUPPRESS, help=f"TOML config (default: <index dir>/config.toml, then <repo>/{CONFIG_NAME})")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    parser = argparse.ArgumentParser(prog="repograph", parents=[common], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="build the graph, communities and sidecars")
    p.add_argument("--drop-tests", action="store_true", help="leave test files out of the index")
    p.add_argument("--compact", action="store_true", help=f"cap sidecar neighbor lists at {COMPACT_CAP}")
    p.add_argument("--force", action="store_true", help="rebuild even if nothing changed")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("align", parents=[common], help="update the index to the current worktree")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("search", parents=[common], help="regex search with graph evidence")
    p.add_argument("pattern")
    p.add_argument("--k", type=int, default=None, help="neighbors per anchor")
    p.add_argument("--theta", type=float, default=None, help="minimum edge confidence")
    p.add_argument("--hops", type=int, default=None, help="expansion radius")
    p.add_argument("--anchors", type=int, default=None, help="anchor cap")
    p.add_argument("--budget", type=int, default=None, help="per-step context budget in characters")
    p.add_argument("--no-graph", action="store_true", help="print match lines only")
    p.add_argument("--no-align", action="store_true", help="skip the automatic align step")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sidecar", parents=[common], help="(re)build sidecars or print one")
    p.add_argument("path", nargs="?")
    p.add_argument("--rebuild", action="store_true")
    p.add_argument("--compact", action="store_true")
    p.set_defaults(func=cmd_sidecar)

    p = sub.add_parser("bench-align", parents=[common], help="time rebuild against align")
    p.add_argument("--sizes", default="200,500,1000,2000")
    p.add_argument("--diff", type=float, default=0.01)
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench_align)

    p = sub.add_parser("simulate", parents=[common], help="paired lexical/augmented runs on synthetic repos")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--spec", help="JSON SyntheticRepoSpec; seeds override its seed")
    p.add_argument("--decoys", type=int, default=3)
    p.add_argument("--traces", action="store_true", help="include per-step traces in --json output")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--hops", type=int, default=1)
    p.add_argument("--anchors", type=int, default=10)
    p.add_argument("--budget", type=int, default=22000)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="repograph: %(message)s")
    args = build_parser().parse_args(argv)
    # global flags may appear before or after the subcommand; the shared
    # actions carry SUPPRESS defaults so neither position overwrites the other
    for name, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except IoError as exc:
        return _fail(args, EXIT_ERROR, str(exc))
    except RepoGraphError as exc:
        return _fail(args, EXIT_ERROR, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
