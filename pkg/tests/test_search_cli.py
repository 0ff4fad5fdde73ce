from __future__ import annotations

import json
import re

import pytest

from repograph.cli import EXIT_ERROR, EXIT_NO_INDEX, EXIT_NO_MATCH, EXIT_OK, main
from repograph.search import HEADER, search_files
from repograph.store import IndexStore


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def indexed_shop(shop_repo, capsys):
    assert run(capsys, "index", "--repo", str(shop_repo))[0] == EXIT_OK
    return shop_repo


def test_index_writes_artifacts_and_rerun_is_noop(shop_repo, capsys):
    code, out, _ = run(capsys, "index", "--repo", str(shop_repo))
    assert code == EXIT_OK and "files parsed=10" in out
    store = IndexStore(shop_repo)
    assert store.graph_path.is_file() and store.manifest_path.is_file()
    assert (store.sidecar_dir / "shop" / "service.py.graph.json").is_file()
    before = store.manifest_path.read_bytes()
    code, out, _ = run(capsys, "index", "--repo", str(shop_repo))
    assert code == EXIT_OK and out.strip() == "index up to date"
    assert store.manifest_path.read_bytes() == before


def test_index_unreadable_root_exits_2(tmp_path, capsys):
    code, _, err = run(capsys, "index", "--repo", str(tmp_path / "missing"))
    assert code == EXIT_ERROR and "cannot read" in err


def test_index_drop_tests(shop_repo, capsys):
    run(capsys, "index", "--repo", str(shop_repo), "--drop-tests")
    manifest = IndexStore(shop_repo).load_manifest()
    assert "tests/test_service.py" not in manifest.files
    assert "shop/service.py" in manifest.files


def test_align_without_changes(indexed_shop, capsys):
    store = IndexStore(indexed_shop)
    before = store.graph_path.read_bytes()
    code, out, _ = run(capsys, "align", "--repo", str(indexed_shop))
    assert code == EXIT_OK and out.startswith("Δ=0 in ")
    assert store.graph_path.read_bytes() == before


def test_align_json(indexed_shop, capsys):
    (indexed_shop / "shop" / "pricing.py").write_text("def apply_discount(order):\n    return 1\n")
    code, out, _ = run(capsys, "--json", "align", "--repo", str(indexed_shop))
    data = json.loads(out)
    assert code == EXIT_OK and data["delta"] == 1 and data["modified"] == ["shop/pricing.py"]
    assert data["sidecars_written"] >= 1


def test_missing_index_exits_3(shop_repo, capsys):
    assert run(capsys, "align", "--repo", str(shop_repo))[0] == EXIT_NO_INDEX
    assert run(capsys, "search", "x", "--repo", str(shop_repo))[0] == EXIT_NO_INDEX
    assert run(capsys, "sidecar", "--repo", str(shop_repo))[0] == EXIT_NO_INDEX


def test_search_emits_lines_then_block(indexed_shop, capsys):
    code, out, _ = run(capsys, "search", "def checkout", "--repo", str(indexed_shop))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "shop/service.py:5:def checkout(cart):"
    assert lines[1] == "" and lines[2] == HEADER
    assert "  shop/pricing.py (cluster: " in out
    assert "shop/service.py (cluster" not in out  # the anchor's own file is not repeated


def test_search_zero_matches(indexed_shop, capsys):
    code, out, _ = run(capsys, "search", "no_such_symbol_anywhere", "--repo", str(indexed_shop))
    assert code == EXIT_NO_MATCH and out == ""


def test_search_invalid_regex(indexed_shop, capsys):
    code, _, err = run(capsys, "search", "(unclosed", "--repo", str(indexed_shop))
    assert code == EXIT_ERROR and "invalid regex" in err


def test_no_graph_is_a_prefix(indexed_shop, capsys):
    _, plain, _ = run(capsys, "search", "checkout", "--repo", str(indexed_shop), "--no-graph")
    _, full, _ = run(capsys, "search", "checkout", "--repo", str(indexed_shop))
    assert HEADER not in plain
    assert full.startswith(plain) and len(full) > len(plain)


def test_match_lines_are_the_internal_search(indexed_shop, capsys):
    _, plain, _ = run(capsys, "search", "order", "--repo", str(indexed_shop), "--no-graph")
    files = sorted(IndexStore(indexed_shop).load_manifest().files)
    hits = search_files(re.compile("order"), indexed_shop, files)
    assert plain == "".join(h.render() + "\n" for h in hits)


def test_search_json(indexed_shop, capsys):
    code, out, _ = run(capsys, "--json", "search", "def checkout", "--repo", str(indexed_shop))
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["matches"][0] == {"path": "shop/service.py", "line": 5, "text": "def checkout(cart):"}
    assert data["anchors"] == ["shop/service.py:checkout"]
    assert data["expansion"] and data["evidence"]


def test_search_auto_aligns(indexed_shop, capsys):
    (indexed_shop / "shop" / "fresh.py").write_text("def brand_new_thing():\n    return 1\n")
    code, out, _ = run(capsys, "--json", "search", "brand_new_thing", "--repo", str(indexed_shop))
    assert code == EXIT_OK
    assert any("shop/fresh.py" in a for a in json.loads(out)["anchors"])


def test_deleted_symbol_has_no_anchor(indexed_shop, capsys):
    (indexed_shop / "shop" / "pricing.py").unlink()
    code, out, _ = run(capsys, "--json", "search", "apply_discount", "--repo", str(indexed_shop))
    data = json.loads(out)
    assert code == EXIT_OK  # service.py still mentions it
    assert all(not a.startswith("shop/pricing.py") for a in data["anchors"])
    assert "shop/pricing.py" not in IndexStore(indexed_shop).load_manifest().files


def test_modified_file_rewrites_only_affected_sidecars(indexed_shop, tmp_path, capsys):
    # keep the community partition fixed so only neighborhood changes show up
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("stale_threshold = 0.9\n")
    store = IndexStore(indexed_shop)
    before = {p: (store.sidecar_dir / (p + ".graph.json")).read_bytes() for p in store.load_manifest().files}
    (indexed_shop / "web" / "util.js").write_text("module.exports = { x: 1 };\n")
    code, out, _ = run(capsys, "--json", "align", "--repo", str(indexed_shop), "--config", str(cfg))
    summary = json.loads(out)
    after = {p: (store.sidecar_dir / (p + ".graph.json")).read_bytes() for p in before}
    changed = {p for p in before if before[p] != after[p]}
    # only the content of util.js changed; its neighborhood is identical, so
    # the only differing sidecar bytes would be snapshot ids, and none are rewritten
    assert changed == set() and summary["sidecars_written"] == 0

    (indexed_shop / "web" / "app.js").write_text("import { api } from './api';\n")
    code, out, _ = run(capsys, "--json", "align", "--repo", str(indexed_shop), "--config", str(cfg))
    after2 = {p: (store.sidecar_dir / (p + ".graph.json")).read_bytes() for p in before}
    changed = {p for p in before if after[p] != after2[p]}
    assert changed == {"web/app.js", "web/util.js"}
    assert json.loads(out)["sidecars_written"] == 2


def test_repograph_dir_env(shop_repo, tmp_path, capsys, monkeypatch):
    target = tmp_path / "elsewhere"
    monkeypatch.setenv("REPOGRAPH_DIR", str(target))
    assert run(capsys, "index", "--repo", str(shop_repo))[0] == EXIT_OK
    assert (target / "manifest.json").is_file()
    assert not (shop_repo / ".repograph").exists()


def test_sidecar_command(indexed_shop, capsys):
    code, out, _ = run(capsys, "sidecar", "shop/service.py", "--repo", str(indexed_shop))
    assert code == EXIT_OK and json.loads(out)["path"] == "shop/service.py"
    code, _, _ = run(capsys, "sidecar", "shop/none.py", "--repo", str(indexed_shop))
    assert code == EXIT_ERROR
    code, out, _ = run(capsys, "sidecar", "--rebuild", "--compact", "--repo", str(indexed_shop))
    assert code == EXIT_OK and out.strip() == "10 sidecars written"


def test_exit_codes_are_stable(indexed_shop, capsys):
    first = [run(capsys, "search", p, "--repo", str(indexed_shop)) for p in ("checkout", "zzz_none", "(")]
    second = [run(capsys, "search", p, "--repo", str(indexed_shop)) for p in ("checkout", "zzz_none", "(")]
    assert [c for c, *_ in first] == [c for c, *_ in second] == [0, 1, 2]
    assert first[0][1] == second[0][1]


def test_config_file_is_read(indexed_shop, capsys):
    (indexed_shop / "repograph.toml").write_text("[expansion]\nk = 1\n")
    code, out, _ = run(capsys, "--json", "search", "def checkout", "--repo", str(indexed_shop))
    assert code == EXIT_OK and len(json.loads(out)["expansion"]) == 1


def test_config_in_index_dir(indexed_shop, capsys):
    (IndexStore(indexed_shop).dir / "config.toml").write_text("k = 1\n")
    code, out, _ = run(capsys, "--json", "search", "def checkout", "--repo", str(indexed_shop))
    assert code == EXIT_OK and len(json.loads(out)["expansion"]) == 1
