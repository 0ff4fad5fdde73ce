"""Byte-exact comparisons against checked-in files under tests/golden.

evidence_block.txt is written by hand; the other files are produced by
scripts/update_goldens.py and reviewed before check-in.
"""

from __future__ import annotations

import json
from pathlib import Path

from fixtures import flask_like
from repograph.cli import main
from repograph.expansion import Context, ExpansionConfig, LexicalMatch, align_matches, expand
from repograph.search import evidence_sections, render_evidence
from repograph.sidecar import build_records
from repograph.sim import SyntheticRepoSpec, simulate

GOLDEN = Path(__file__).parent / "golden"


def golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


def flask_block() -> str:
    g, _ = flask_like()
    records = build_records(g)
    anchors = align_matches([LexicalMatch("src/flask/app.py", 8, 4, "register_blueprint")], g, 10)
    cfg = ExpansionConfig()
    gamma = expand(anchors, g, Context.empty(cfg.budget), g.community, cfg)
    return render_evidence(evidence_sections(gamma, anchors, records.get))


def test_evidence_block_matches_reference_sample():
    assert flask_block() == golden("evidence_block.txt")


def test_sidecar_json_golden():
    g, _ = flask_like()
    assert build_records(g)["src/flask/blueprints.py"].dumps() == golden("sidecar_blueprints.json")


def test_sidecar_fields():
    data = json.loads(golden("sidecar_blueprints.json"))
    assert sorted(data) == [
        "callees", "callers", "community", "configs", "dependencies", "dependents",
        "docs", "flows", "path", "snapshot_id", "tests",
    ]
    assert sorted(data["community"]) == ["cohesion", "id", "label"]
    assert sorted(data["callers"][0]) == ["confidence", "path", "relation", "symbol"]


def test_cli_search_golden(shop_repo, capsys):
    main(["index", "--repo", str(shop_repo)])
    capsys.readouterr()
    main(["search", "def checkout", "--repo", str(shop_repo)])
    assert capsys.readouterr().out == golden("search_shop.txt")


def test_cli_sidecar_golden(shop_repo, capsys):
    main(["index", "--repo", str(shop_repo)])
    capsys.readouterr()
    main(["sidecar", "shop/service.py", "--repo", str(shop_repo)])
    assert capsys.readouterr().out == golden("sidecar_shop_service.json")


def test_simulation_trace_golden(tmp_path):
    spec = SyntheticRepoSpec(file_count=8, symbols_per_file=(2, 3), y_size=2, visibility=0.5, seed=1)
    trace = simulate(spec, tmp_path).to_json()
    assert json.dumps(trace, sort_keys=True, indent=1) + "\n" == golden("simulate_trace.json")
