from __future__ import annotations

import json

import pytest

from conftest import write_tree
from fixtures import flask_like
from repograph.alignment import align, compute_diff, recompute_if_stale
from repograph.communities import compute_communities
from repograph.errors import MissingCommunities, SidecarNotFound, StaleSidecar
from repograph.extractors import build_graph
from repograph.extractors.config import IndexConfig
from repograph.extractors.walker import hash_worktree
from repograph.graph import RelationKind
from repograph.sidecar import (
    COMPACT_CAP,
    DEFAULT_CAP,
    NeighborRef,
    SidecarRecord,
    build_records,
    build_sidecars,
    derive_flows,
    format_confidence,
    load_sidecar,
    sidecar_path,
    write_sidecars,
)


def indexed(root):
    g, _ = build_graph(root)
    return compute_communities(g)


@pytest.fixture
def fan_in_repo(tmp_path):
    files = {"target.py": "def hub():\n    return 1\n"}
    for i in range(25):
        files[f"callers/c{i:02d}.py"] = f"from target import hub\n\n\ndef use_{i:02d}():\n    return hub()\n"
    return write_tree(tmp_path, files)


@pytest.mark.parametrize("cap", [DEFAULT_CAP, COMPACT_CAP])
def test_lists_are_capped_by_confidence_then_path(fan_in_repo, cap):
    rec = build_records(indexed(fan_in_repo), cap=cap)["target.py"]
    assert len(rec.callers) == cap
    keys = [r.sort_key() for r in rec.callers]
    assert keys == sorted(keys)
    assert rec.callers[0].path == "callers/c00.py"
    # the full, uncapped list has all 25
    assert len(build_records(indexed(fan_in_repo), cap=100)["target.py"].callers) == 25


def test_isolated_file_has_empty_lists(tmp_path):
    write_tree(tmp_path, {"lonely.py": "X = 1\n", "other.py": "Y = 2\n"})
    rec = build_records(indexed(tmp_path))["lonely.py"]
    data = rec.to_json()
    for key in ("dependents", "dependencies", "callers", "callees", "flows", "tests", "docs", "configs"):
        assert data[key] == []
    assert data["community"]["id"] is not None


def test_missing_communities_raises(shop_repo):
    g, _ = build_graph(shop_repo)
    with pytest.raises(MissingCommunities):
        build_records(g)


def test_format_confidence():
    assert [format_confidence(c) for c in (1.0, 0.95, 0.9, 0.5, 0.853)] == ["1.0", "0.95", "0.9", "0.5", "0.85"]
    assert NeighborRef("a.py", "f", "invokes", 0.9).render() == "a.py:f [0.9]"


def test_flow_over_three_files(tmp_path):
    write_tree(
        tmp_path,
        {
            "a.py": "from b import mid\n\n\ndef start():\n    return mid()\n",
            "b.py": "from c import end\n\n\ndef mid():\n    return end()\n",
            "c.py": "def end():\n    return 0\n",
        },
    )
    flows = derive_flows(indexed(tmp_path))
    assert flows == {
        "a.py": [{"name": "start", "step": 1, "of": 3}],
        "b.py": [{"name": "start", "step": 2, "of": 3}],
        "c.py": [{"name": "start", "step": 3, "of": 3}],
    }


def test_recursion_terminates(tmp_path):
    write_tree(
        tmp_path,
        {
            "r.py": "def loop(n):\n    return loop(n - 1)\n",
            "p.py": "from q import pong\n\n\ndef ping():\n    return pong()\n",
            "q.py": "from p import ping\n\n\ndef pong():\n    return ping()\n",
        },
    )
    flows = derive_flows(indexed(tmp_path))
    # no self loops are stored, so a self-recursive function is its own entry;
    # the mutual pair has no uncalled entry and yields nothing
    assert flows == {"r.py": [{"name": "loop", "step": 1, "of": 1}]}


def test_single_file_flow(tmp_path):
    write_tree(tmp_path, {"s.py": "def outer():\n    return inner()\n\n\ndef inner():\n    return 1\n"})
    assert derive_flows(indexed(tmp_path)) == {"s.py": [{"name": "outer", "step": 1, "of": 1}]}


def test_flow_follows_highest_confidence_edge():
    g, _ = flask_like()
    flows = derive_flows(g)
    assert flows["src/flask/scaffold.py"] == [{"name": "_endpoint_from_view_func", "step": 1, "of": 1}]
    assert flows["src/flask/routing.py"] == [{"name": "request_dispatch", "step": 4, "of": 4}]


def test_every_reference_mirrors_a_graph_edge(shop_repo):
    g = indexed(shop_repo)
    edges = {(e.src.path, e.src.qualified_name, e.dst.path, e.dst.qualified_name, e.relation.value, e.confidence) for e in g.edges}
    for path, rec in build_records(g, cap=1000).items():
        for ref in (*rec.dependents, *rec.callers):
            assert (ref.path, ref.symbol, path) in {(a, b, c) for a, b, c, *_ in edges}
            assert any(e[0] == ref.path and e[1] == ref.symbol and e[2] == path and e[4] == ref.relation and e[5] == ref.confidence for e in edges)
        for ref in (*rec.dependencies, *rec.callees):
            assert any(e[0] == path and e[2] == ref.path and e[3] == ref.symbol and e[4] == ref.relation and e[5] == ref.confidence for e in edges)


def test_shop_record_links(shop_repo):
    recs = build_records(indexed(shop_repo))
    service = recs["shop/service.py"]
    assert service.tests == ["tests/test_service.py"]
    assert service.docs == ["docs/guide.md"]
    assert service.configs == ["settings.toml"]
    assert {r.path for r in service.dependencies} >= {"shop/models.py", "shop/pricing.py"}
    assert all(r.relation == RelationKind.INVOKES.value for r in service.callees)


def test_round_trip_and_canonical_bytes(shop_repo, tmp_path):
    g = indexed(shop_repo)
    out = tmp_path / "idx" / "sidecars"
    n = build_sidecars(g, DEFAULT_CAP, out)
    assert n == len(g.file_paths)
    text = sidecar_path(out, "shop/service.py").read_text()
    assert text.endswith("\n") and json.loads(text)["path"] == "shop/service.py"
    rec = load_sidecar(out, "shop/service.py", expected_snapshot=g.snapshot_id)
    assert rec == build_records(g)["shop/service.py"]
    assert SidecarRecord.from_json(json.loads(text)).dumps() == text


def test_load_rejects_outside_and_missing_paths(shop_repo, tmp_path):
    out = tmp_path / "idx" / "sidecars"
    build_sidecars(indexed(shop_repo), DEFAULT_CAP, out)
    with pytest.raises(SidecarNotFound):
        load_sidecar(out, "../../etc/passwd")
    with pytest.raises(SidecarNotFound):
        load_sidecar(out, "shop/nope.py")


def test_stale_sidecar_after_align(shop_repo, tmp_path):
    g = indexed(shop_repo)
    out = tmp_path / "idx" / "sidecars"
    build_sidecars(g, DEFAULT_CAP, out)
    manifest = hash_worktree(shop_repo, IndexConfig())
    (shop_repo / "shop" / "pricing.py").write_text("def apply_discount(order):\n    return 1\n")
    g2 = align(g, compute_diff(manifest, shop_repo), shop_repo)
    assert g2.snapshot_id != g.snapshot_id
    with pytest.raises(StaleSidecar):
        load_sidecar(out, "shop/pricing.py", expected_snapshot=g2.snapshot_id)


def test_manifest_decides_staleness(shop_repo, tmp_path):
    g = indexed(shop_repo)
    out = tmp_path / "idx" / "sidecars"
    _, index = write_sidecars(g, out)
    (tmp_path / "idx" / "manifest.json").write_text(json.dumps({"sidecars": index}))
    assert load_sidecar(out, "shop/models.py").path == "shop/models.py"
    index["shop/models.py"]["snapshot_id"] = "other"
    (tmp_path / "idx" / "manifest.json").write_text(json.dumps({"sidecars": index}))
    with pytest.raises(StaleSidecar):
        load_sidecar(out, "shop/models.py")
    del index["shop/models.py"]
    (tmp_path / "idx" / "manifest.json").write_text(json.dumps({"sidecars": index}))
    with pytest.raises(StaleSidecar):
        load_sidecar(out, "shop/models.py")


def test_aligned_sidecars_match_full_rebuild(shop_repo, tmp_path):
    g = indexed(shop_repo)
    manifest = hash_worktree(shop_repo, IndexConfig())
    (shop_repo / "shop" / "extra.py").write_text("from shop.pricing import apply_discount\n\n\ndef promo(o):\n    return apply_discount(o)\n")
    (shop_repo / "shop" / "models.py").write_text("def compute_total(order):\n    return 2\n")
    aligned = recompute_if_stale(align(g, compute_diff(manifest, shop_repo), shop_repo), 0)
    build_sidecars(aligned, DEFAULT_CAP, tmp_path / "a")
    build_sidecars(indexed(shop_repo), DEFAULT_CAP, tmp_path / "b")
    a = {p.relative_to(tmp_path / "a"): p.read_bytes() for p in (tmp_path / "a").rglob("*.json")}
    b = {p.relative_to(tmp_path / "b"): p.read_bytes() for p in (tmp_path / "b").rglob("*.json")}
    assert a == b


def test_incremental_refresh_writes_only_changed_records(tmp_path):
    write_tree(
        tmp_path,
        {
            "a.py": "from b import f\n\n\ndef g():\n    return f()\n",
            "b.py": "def f():\n    return 1\n",
            "c.py": "def h():\n    return 2\n",
            "d.py": "from c import h\n\n\ndef k():\n    return h()\n",
        },
    )
    g = indexed(tmp_path)
    out = tmp_path / ".out"
    written, index = write_sidecars(g, out)
    assert written == 4
    again, index2 = write_sidecars(g, out, previous=index)
    assert again == 0 and index2 == index

    manifest = hash_worktree(tmp_path, IndexConfig())
    (tmp_path / "a.py").write_text("def g():\n    return 0\n")
    g2 = align(g, compute_diff(manifest, tmp_path), tmp_path)
    written, index3 = write_sidecars(g2, out, previous=index)
    changed = {p for p in index3 if index3[p] != index[p]}
    # a lost its callee, b lost its caller; c and d are untouched
    assert changed == {"a.py", "b.py"} and written == 2
    assert load_sidecar(out, "c.py", expected_snapshot=index3["c.py"]["snapshot_id"]).path == "c.py"


def test_removed_file_sidecar_is_deleted(tmp_path):
    write_tree(tmp_path, {"a.py": "X = 1\n", "b.py": "Y = 2\n"})
    g = indexed(tmp_path)
    out = tmp_path / ".out"
    _, index = write_sidecars(g, out)
    manifest = hash_worktree(tmp_path, IndexConfig())
    (tmp_path / "b.py").unlink()
    g2 = align(g, compute_diff(manifest, tmp_path), tmp_path)
    _, index2 = write_sidecars(g2, out, previous=index)
    assert set(index2) == {"a.py"}
    assert not sidecar_path(out, "b.py").exists()


def test_duplicate_references_keep_the_strongest(shop_repo):
    # checkout reaches models.py through a resolved call (0.9) and a fuzzy one (0.5)
    callers = build_records(indexed(shop_repo))["shop/models.py"].callers
    pairs = [(r.path, r.symbol) for r in callers]
    assert len(pairs) == len(set(pairs))
    assert NeighborRef("shop/service.py", "checkout", "invokes", 0.9) in callers
