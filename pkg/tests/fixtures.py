"""Hand-built graphs with known expected outputs."""

from __future__ import annotations

from repograph.communities import assignment_from_groups, project_file_graph
from repograph.extractors.confidence import make_edge
from repograph.graph import NodeId, NodeKind, Provenance, RelationKind, RepoGraph

P = Provenance
INV = RelationKind.INVOKES


def _file(path: str, end: int = 40) -> NodeId:
    return NodeId(path, NodeKind.FILE, "", (1, end))


def _fn(path: str, name: str, start: int, end: int) -> NodeId:
    return NodeId(path, NodeKind.FUNCTION, name, (start, end))


def flask_like() -> tuple[RepoGraph, dict[str, NodeId]]:
    """Six files shaped so the blueprints file reproduces the reference evidence sample."""
    app, bp, sc = "src/flask/app.py", "src/flask/blueprints.py", "src/flask/scaffold.py"
    hp, rt, rtt = "src/flask/helpers.py", "src/flask/routing.py", "src/flask/routing_table.py"
    n = {
        "request_dispatch": _fn(app, "request_dispatch", 1, 5),
        "register_blueprint": _fn(app, "register_blueprint", 7, 12),
        "Blueprint": NodeId(bp, NodeKind.CLASS, "Blueprint", (1, 30)),
        "Blueprint.register": _fn(bp, "Blueprint.register", 3, 10),
        "Blueprint.add_url_rule": _fn(bp, "Blueprint.add_url_rule", 12, 20),
        "_endpoint_from_view_func": _fn(sc, "_endpoint_from_view_func", 1, 6),
        "_validate": _fn(sc, "_validate", 8, 9),
        "url_for": _fn(hp, "url_for", 1, 5),
        "build_rule": _fn(rt, "build_rule", 1, 4),
        "RuleTable": NodeId(rtt, NodeKind.CLASS, "RuleTable", (1, 3)),
    }
    files = {p: _file(p) for p in (app, bp, sc, hp, rt, rtt)}
    edges = [
        make_edge(n["request_dispatch"], INV, n["register_blueprint"], P.SAME_FILE_COOCCURRENCE),
        make_edge(n["register_blueprint"], INV, n["Blueprint.register"], P.SAME_FILE_COOCCURRENCE),
        make_edge(n["_endpoint_from_view_func"], INV, n["_validate"], P.SAME_FILE_COOCCURRENCE),
        make_edge(n["_endpoint_from_view_func"], INV, n["Blueprint.add_url_rule"], P.RESOLVED_IMPORT),
        make_edge(n["Blueprint.register"], INV, n["url_for"], P.EXPLICIT_IMPORT),
        make_edge(n["url_for"], INV, n["build_rule"], P.RESOLVED_IMPORT),
        make_edge(files[rt], RelationKind.IMPORTS, files[rtt], P.EXPLICIT_IMPORT),
        make_edge(files[bp], RelationKind.IMPORTS, files[rt], P.EXPLICIT_IMPORT),
        make_edge(files[bp], RelationKind.TESTED_BY, _file("tests/test_blueprints.py"), P.TEST_LINKAGE),
    ]
    nodes = [*files.values(), _file("tests/test_blueprints.py"), *n.values()]
    g = RepoGraph.from_parts("flask-golden", nodes, edges)
    comm = assignment_from_groups(
        [[bp, rt, rtt], [app, sc, hp], ["tests/test_blueprints.py"]], project_file_graph(g)
    )
    return g.with_community(comm), n
