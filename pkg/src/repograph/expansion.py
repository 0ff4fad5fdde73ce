"""Per-step local expansion: anchors from lexical matches, scored neighbor
selection under a confidence filter, and folding into a bounded context."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import InvalidArgument, NodeNotFound
from .graph import CommunityAssignment, NodeId, RepoGraph, neighborhood, node_for_location

log = logging.getLogger(__name__)

L_NODE_MAX = 200


@dataclass(frozen=True, order=True)
class LexicalMatch:
    path: str
    line: int
    column: int = 0
    matched_text: str = ""


@dataclass(frozen=True)
class AnchorSet:
    anchors: tuple[NodeId, ...] = ()
    step_index: int = 0
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.anchors)

    def __iter__(self):
        return iter(self.anchors)


@dataclass(frozen=True)
class ExpansionConfig:
    k: int = 10
    theta: float = 0.5
    hops: int = 1
    m: int = 10
    decay: float = 0.7
    community_bonus: float = 0.25
    budget: int = 22000
    node_cost_cap: int = L_NODE_MAX

    def __post_init__(self) -> None:
        if self.k < 1 or self.m < 1 or self.hops < 1:
            raise InvalidArgument("k, m and hops must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidArgument(f"theta must lie in [0, 1], got {self.theta}")
        if not 0.0 < self.decay <= 1.0:
            raise InvalidArgument(f"decay must lie in (0, 1], got {self.decay}")
        if self.community_bonus < 0 or self.budget < 0 or self.node_cost_cap < 1:
            raise InvalidArgument("community_bonus, budget and node_cost_cap must be non-negative")

    @property
    def delta_cap(self) -> int:
        """Upper bound on the rendered cost of one step's expansion."""
        return self.m * self.k * self.node_cost_cap


@dataclass(frozen=True)
class Expansion:
    node: NodeId
    score: float
    source: NodeId

    def sort_key(self) -> tuple:
        return (-self.score, self.node.path, self.node.qualified_name, self.node)


@dataclass(frozen=True)
class Context:
    """Insertion-ordered, never-shrinking set of exposed nodes.

    ``budget_units`` bounds what a single step may admit.  ``units_used`` is
    what step ``step`` has consumed so far; folding again within the same
    step keeps drawing from that allowance, a new step starts afresh.
    """

    members: tuple[NodeId, ...] = ()
    budget_units: int = 22000
    units_used: int = 0
    step: int = -1
    total_units: int = 0
    _index: frozenset[NodeId] = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self._index and self.members:
            object.__setattr__(self, "_index", frozenset(self.members))

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def empty(cls, budget_units: int) -> Context:
        return cls(budget_units=budget_units)


def render_node(node: NodeId) -> str:
    return node.label()


def render_cost(node: NodeId, cap: int = L_NODE_MAX) -> int:
    return max(1, min(cap, len(render_node(node))))


def align_matches(
    matches: Iterable[LexicalMatch], g: RepoGraph, m: int, step_index: int = 0
) -> AnchorSet:
    """Map matches to their innermost enclosing nodes, first ``m`` by (path, line)."""
    known = set(g.file_paths)
    anchors: list[NodeId] = []
    seen: set[NodeId] = set()
    dropped = 0
    for match in sorted(matches, key=lambda x: (x.path, x.line, x.column, x.matched_text)):
        if match.path not in known:
            dropped += 1
            continue
        node = node_for_location(g, match.path, match.line)
        if node not in seen:
            seen.add(node)
            anchors.append(node)
    if dropped:
        log.warning("dropped %d matches in files outside the index", dropped)
    return AnchorSet(tuple(anchors[:m]), step_index, dropped)


def score_neighbor(
    u: NodeId,
    v: NodeId,
    d: int,
    path_conf: float,
    ctx: Context,
    comm: CommunityAssignment | None,
    cfg: ExpansionConfig,
) -> float:
    if u in ctx:
        return 0.0
    score = path_conf * cfg.decay ** (d - 1)
    if comm is not None:
        cu, cv = comm.community_of(u.path), comm.community_of(v.path)
        if cu is not None and cu == cv:
            score *= 1.0 + cfg.community_bonus
    return score


def select_neighbors(
    v: NodeId,
    g: RepoGraph,
    ctx: Context,
    comm: CommunityAssignment | None,
    cfg: ExpansionConfig,
) -> list[tuple[NodeId, float]]:
    """Top-k positively scored nodes of the theta-filtered K-hop neighborhood of ``v``.

    The objective is a sum of per-node scores, so taking the k best is the
    exact maximizer over all subsets of size at most k.
    """
    scored = []
    for u, d, conf in neighborhood(g, v, cfg.hops, cfg.theta):
        s = score_neighbor(u, v, d, conf, ctx, comm, cfg)
        if s > 0.0:
            scored.append((u, s))
    scored.sort(key=lambda us: (-us[1], us[0].path, us[0].qualified_name, us[0]))
    return scored[: cfg.k]


def expand(
    anchor_set: AnchorSet,
    g: RepoGraph,
    ctx: Context,
    comm: CommunityAssignment | None,
    cfg: ExpansionConfig,
) -> tuple[Expansion, ...]:
    """Union of per-anchor selections; a shared node keeps its best score and the
    first anchor that achieved it."""
    best: dict[NodeId, Expansion] = {}
    for v in anchor_set.anchors:
        if v not in g:
            raise NodeNotFound(v.key)
        for u, s in select_neighbors(v, g, ctx, comm, cfg):
            cur = best.get(u)
            if cur is None or s > cur.score:
                best[u] = Expansion(u, s, v)
    return tuple(sorted(best.values(), key=Expansion.sort_key))


def fold_context(
    ctx: Context,
    anchor_set: AnchorSet,
    gamma: Sequence[Expansion] | Iterable[NodeId],
    cfg: ExpansionConfig | None = None,
) -> Context:
    """Admit anchors, then expansion nodes by descending score, within the step budget.

    Admission stops at the first node that does not fit, so the admitted new
    nodes always form a prefix of the candidate order.  Existing members are
    never removed.
    """
    cap = cfg.node_cost_cap if cfg is not None else L_NODE_MAX
    used = ctx.units_used if ctx.step == anchor_set.step_index else 0
    members = list(ctx.members)
    index = set(ctx._index)
    extra = list(gamma)
    if extra and isinstance(extra[0], Expansion):
        nodes = [x.node for x in sorted(extra, key=Expansion.sort_key)]
    else:
        nodes = extra
    spent = 0
    for node in (*anchor_set.anchors, *nodes):
        if node in index:
            continue
        cost = render_cost(node, cap)
        if used + cost > ctx.budget_units:
            break
        used += cost
        spent += cost
        members.append(node)
        index.add(node)
    return replace(
        ctx,
        members=tuple(members),
        units_used=used,
        step=anchor_set.step_index,
        total_units=ctx.total_units + spent,
        _index=frozenset(index),
    )


__all__ = [
    "AnchorSet",
    "Context",
    "ExpansionConfig",
    "Expansion",
    "L_NODE_MAX",
    "LexicalMatch",
    "align_matches",
    "expand",
    "fold_context",
    "render_cost",
    "render_node",
    "score_neighbor",
    "select_neighbors",
]
