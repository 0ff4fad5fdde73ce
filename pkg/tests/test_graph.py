from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_neighborhood
from repograph.errors import InvalidArgument, NodeNotFound
from repograph.extractors import build_graph
from repograph.extractors.confidence import CONFIDENCE, make_edge
from repograph.graph import (
    CONTAINS_PAIRS,
    Edge,
    NodeId,
    NodeKind,
    Provenance,
    RelationKind,
    RepoGraph,
    induced_subgraph,
    neighborhood,
    node_for_location,
)
from strategies import small_graphs


def fn(path: str, name: str, start: int = 1, end: int = 2) -> NodeId:
    return NodeId(path, NodeKind.FUNCTION, name, (start, end))


def chain_graph():
    a, b, c = fn("a.py", "a"), fn("b.py", "b"), fn("c.py", "c")
    edges = [
        Edge(a, RelationKind.INVOKES, b, Provenance.RESOLVED_IMPORT, 0.9),
        Edge(b, RelationKind.DOCUMENTS, c, Provenance.DOCUMENTATION, 0.6),
    ]
    return RepoGraph.from_parts("s", [a, b, c], edges), a, b, c


def test_chain_example_filters_low_confidence_hop():
    g, a, b, c = chain_graph()
    assert neighborhood(g, a, 2, 0.7) == {(b, 1, 0.9)}
    assert neighborhood(g, a, 2, 0.6) == {(b, 1, 0.9), (c, 2, 0.6)}


def test_theta_half_keeps_every_table_provenance():
    hub = fn("hub.py", "hub")
    spokes, edges = [], []
    for i, prov in enumerate(p for p in Provenance if p is not Provenance.STRUCTURAL):
        u = fn(f"s{i}.py", f"s{i}")
        spokes.append(u)
        edges.append(make_edge(hub, RelationKind.INVOKES, u, prov))
    g = RepoGraph.from_parts("s", [hub, *spokes], edges)
    assert {u for u, _, _ in neighborhood(g, hub, 1, 0.5)} == set(spokes)
    only_exact = {u for u, _, _ in neighborhood(g, hub, 1, 1.0)}
    assert only_exact == {e.dst for e in edges if e.provenance is Provenance.SAME_FILE_COOCCURRENCE}


def test_isolated_node_and_errors():
    g, a, _, _ = chain_graph()
    lonely = fn("z.py", "z")
    g2 = RepoGraph.from_parts("s", [*g.nodes, lonely], g.edges)
    assert neighborhood(g2, lonely, 3, 0.0) == set()
    with pytest.raises(NodeNotFound):
        neighborhood(g, lonely, 1, 0.5)
    with pytest.raises(InvalidArgument):
        neighborhood(g, a, 0, 0.5)


def test_contains_edges_are_not_traversed(shop_repo):
    g, _ = build_graph(shop_repo)
    save = next(n for n in g.nodes if n.qualified_name == "Base.save")
    reached = {u for u, _, _ in neighborhood(g, save, 3, 0.0)}
    assert all(u.kind is not NodeKind.DIRECTORY for u in reached)
    # Base.validate is a sibling only through the class; it is reached via the call edge
    assert any(u.qualified_name == "Base.validate" for u in reached)


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.integers(1, 3), st.sampled_from([0.0, 0.5, 0.6, 0.75, 0.9, 1.0]), st.data())
def test_neighborhood_matches_walk_enumeration(g, hops, theta, data):
    v = data.draw(st.sampled_from(sorted(g.nodes)))
    assert neighborhood(g, v, hops, theta) == brute_neighborhood(g, v, hops, theta)


@settings(max_examples=100, deadline=None)
@given(small_graphs(), st.data())
def test_neighborhood_monotone_in_theta_and_hops(g, data):
    v = data.draw(st.sampled_from(sorted(g.nodes)))
    t1, t2 = sorted(data.draw(st.lists(st.sampled_from([0.0, 0.5, 0.75, 0.9, 1.0]), min_size=2, max_size=2)))
    h1, h2 = sorted(data.draw(st.lists(st.integers(1, 3), min_size=2, max_size=2)))
    reach = lambda h, t: {u for u, _, _ in neighborhood(g, v, h, t)}
    assert reach(2, t2) <= reach(2, t1)
    assert reach(h1, 0.5) <= reach(h2, 0.5)


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.data())
def test_theta_zero_is_plain_bfs(g, data):
    v = data.draw(st.sampled_from(sorted(g.nodes)))
    adj: dict = {}
    for e in g.edges:
        adj.setdefault(e.src, set()).add(e.dst)
        adj.setdefault(e.dst, set()).add(e.src)
    dist = {v: 0}
    frontier = [v]
    for d in (1, 2):
        nxt = []
        for x in frontier:
            for u in sorted(adj.get(x, ())):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    got = {(u, d) for u, d, _ in neighborhood(g, v, 2, 0.0)}
    assert got == {(u, d) for u, d in dist.items() if u != v}


def test_node_for_location_picks_innermost_span():
    f = NodeId("m.py", NodeKind.FILE, "", (1, 60))
    outer = fn("m.py", "f", 1, 50)
    inner = fn("m.py", "f.g", 10, 20)
    g = RepoGraph.from_parts("s", [f, outer, inner])
    assert node_for_location(g, "m.py", 15) == inner
    assert node_for_location(g, "m.py", 30) == outer
    assert node_for_location(g, "m.py", 55) == f
    with pytest.raises(NodeNotFound):
        node_for_location(g, "nope.py", 1)


def test_node_for_location_on_parsed_method(shop_repo):
    g, _ = build_graph(shop_repo)
    assert node_for_location(g, "shop/models.py", 3).qualified_name == "Base.save"
    assert node_for_location(g, "shop/service.py", 1).kind is NodeKind.FILE


def test_induced_subgraph_keeps_parallel_edges():
    a, b = fn("a.py", "a"), fn("b.py", "b")
    edges = [
        make_edge(a, RelationKind.INVOKES, b, Provenance.RESOLVED_IMPORT),
        make_edge(a, RelationKind.INVOKES, b, Provenance.FUZZY_NAME_MATCH),
        make_edge(b, RelationKind.INHERITS, a, Provenance.INHERITANCE),
    ]
    g = RepoGraph.from_parts("s", [a, b], edges)
    sub = induced_subgraph(g, {a, b})
    assert len(sub.edges) == 3
    assert induced_subgraph(g, set()).nodes == frozenset()
    with pytest.raises(NodeNotFound):
        induced_subgraph(g, {fn("c.py", "c")})


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.data())
def test_induced_subgraph_idempotent_and_exact(g, data):
    s = set(data.draw(st.lists(st.sampled_from(sorted(g.nodes)), unique=True)))
    sub = induced_subgraph(g, s)
    assert sub.nodes == frozenset(s)
    assert sorted(sub.edges) == sorted(e for e in g.edges if e.src in s and e.dst in s)
    assert induced_subgraph(sub, s).same_structure(sub)


def test_identity_subgraph_equals_graph(shop_repo):
    g, _ = build_graph(shop_repo)
    assert induced_subgraph(g, g.nodes).same_structure(g)


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_json_round_trip(g):
    back = RepoGraph.loads(g.dumps())
    assert back.same_structure(g)
    assert back.dumps() == g.dumps()


def test_node_key_round_trip():
    n = NodeId("a/b.py", NodeKind.CLASS, "Outer.Inner", (3, 9))
    assert NodeId.from_key(n.key) == n
    assert n.key == "class:a/b.py:Outer.Inner:3-9"


def test_from_parts_rejects_dangling_edge():
    a, b = fn("a.py", "a"), fn("b.py", "b")
    with pytest.raises(NodeNotFound):
        RepoGraph.from_parts("s", [a], [make_edge(a, RelationKind.INVOKES, b, Provenance.FUZZY_NAME_MATCH)])


def test_built_graph_structural_invariants(shop_repo):
    g, _ = build_graph(shop_repo)
    parent = {}
    for e in g.edges:
        assert e.src != e.dst
        assert e.confidence == CONFIDENCE[e.provenance]
        assert (e.relation is RelationKind.CONTAINS) == (e.provenance is Provenance.STRUCTURAL)
        if e.relation is RelationKind.CONTAINS:
            assert (e.src.kind, e.dst.kind) in CONTAINS_PAIRS
            parent[e.dst] = e.src
        elif e.relation in (RelationKind.IMPORTS, RelationKind.INVOKES, RelationKind.INHERITS):
            assert e.src.kind is not NodeKind.DIRECTORY and e.dst.kind is not NodeKind.DIRECTORY
    for n in g.nodes:
        seen = set()
        while n.kind is not NodeKind.DIRECTORY or n.path != ".":
            assert n not in seen and n in parent
            seen.add(n)
            n = parent[n]
    for sym in (x for x in g.nodes if x.is_symbol):
        assert sym.qualified_name and 1 <= sym.span[0] <= sym.span[1]


def test_graph_json_schema(shop_repo):
    g, _ = build_graph(shop_repo)
    data = json.loads(g.dumps())
    assert sorted(data) == ["attributes", "edges", "nodes", "snapshot_id"]
    assert sorted(data["nodes"][0]) == ["id", "kind", "path", "qualified_name", "span"]
    assert sorted(data["edges"][0]) == ["confidence", "dst", "provenance", "relation", "src"]
