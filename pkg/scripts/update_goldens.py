#!/usr/bin/env python3
"""Regenerate the derived golden files under tests/golden.

evidence_block.txt is hand-written and never regenerated.  Review the diff of
everything this script rewrites before committing it.
"""

from __future__ import annotations

import json
import sys
import tempfile
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from conftest import SHOP, write_tree  # noqa: E402
from fixtures import flask_like  # noqa: E402
from repograph.cli import main  # noqa: E402
from repograph.sidecar import build_records  # noqa: E402
from repograph.sim import SyntheticRepoSpec, simulate  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"
TRACE_SPEC = SyntheticRepoSpec(file_count=8, symbols_per_file=(2, 3), y_size=2, visibility=0.5, seed=1)


def cli(*argv: str) -> str:
    buf = StringIO()
    with redirect_stdout(buf):
        main(list(argv))
    return buf.getvalue()


def main_() -> None:
    g, _ = flask_like()
    (GOLDEN / "sidecar_blueprints.json").write_text(build_records(g)["src/flask/blueprints.py"].dumps())
    with tempfile.TemporaryDirectory() as tmp:
        repo = write_tree(Path(tmp) / "shop", SHOP)
        cli("index", "--repo", str(repo))
        (GOLDEN / "search_shop.txt").write_text(cli("search", "def checkout", "--repo", str(repo)))
        (GOLDEN / "sidecar_shop_service.json").write_text(cli("sidecar", "shop/service.py", "--repo", str(repo)))
        trace = simulate(TRACE_SPEC, Path(tmp) / "sim").to_json()
    (GOLDEN / "simulate_trace.json").write_text(json.dumps(trace, sort_keys=True, indent=1) + "\n")


if __name__ == "__main__":
    main_()
