"""Scripted active-set loops comparing lexical-only and graph-augmented regimes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from ..expansion import (
    Context,
    ExpansionConfig,
    align_matches,
    expand,
    fold_context,
    render_cost,
)
from ..graph import NodeId, RepoGraph
from ..search import search_files

LEX = "lex"
AUGMENTED = "augmented"


class UtilityFunction(Protocol):
    def __call__(self, exposed: Iterable[NodeId]) -> Fraction: ...


@dataclass(frozen=True)
class RecallUtility:
    """|exposed ∩ Y| / |Y| as an exact fraction; 1 when Y is empty."""

    y: frozenset[NodeId]

    def __call__(self, exposed: Iterable[NodeId]) -> Fraction:
        if not self.y:
            return Fraction(1)
        return Fraction(len(self.y.intersection(exposed)), len(self.y))


@dataclass(frozen=True)
class ScriptedPolicy:
    queries: tuple[str, ...]

    @property
    def steps(self) -> int:
        return len(self.queries)


@dataclass(frozen=True)
class StepRecord:
    step: int
    query: str
    anchors: tuple[NodeId, ...]
    gamma_size: int
    gamma_cost: int
    members: tuple[NodeId, ...]
    units_used: int
    recall: Fraction
    saturated: bool

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "query": self.query,
            "anchors": [a.key for a in self.anchors],
            "gamma_size": self.gamma_size,
            "gamma_cost": self.gamma_cost,
            "context_size": len(self.members),
            "members": [m.key for m in self.members],
            "units_used": self.units_used,
            "recall": f"{self.recall.numerator}/{self.recall.denominator}",
            "saturated": self.saturated,
        }


@dataclass
class RunTrace:
    regime: str
    steps: list[StepRecord] = field(default_factory=list)

    @property
    def final(self) -> StepRecord | None:
        return self.steps[-1] if self.steps else None

    @property
    def recalls(self) -> list[Fraction]:
        return [s.recall for s in self.steps]

    @property
    def saturated(self) -> bool:
        return any(s.saturated for s in self.steps)

    def members_at(self, t: int) -> tuple[NodeId, ...]:
        return self.steps[t].members

    def to_json(self) -> dict:
        return {"regime": self.regime, "steps": [s.to_json() for s in self.steps]}


def resolve_targets(g: RepoGraph, pairs: Iterable[tuple[str, str]]) -> frozenset[NodeId]:
    """Map (path, qualified_name) pairs to graph nodes; unknown pairs raise KeyError."""
    index = {(n.path, n.qualified_name): n for n in g.nodes if n.is_symbol}
    return frozenset(index[p] for p in pairs)


def run_regimes(
    g: RepoGraph,
    root: str | Path,
    y: frozenset[NodeId],
    policy: ScriptedPolicy,
    cfg: ExpansionConfig,
    utility: UtilityFunction | None = None,
) -> tuple[RunTrace, RunTrace]:
    """Feed one query stream to both regimes; the lexical one never expands."""
    utility = utility or RecallUtility(frozenset(y))
    files = g.file_paths
    traces = {LEX: RunTrace(LEX), AUGMENTED: RunTrace(AUGMENTED)}
    ctx = {LEX: Context.empty(cfg.budget), AUGMENTED: Context.empty(cfg.budget)}
    for t, query in enumerate(policy.queries):
        hits = search_files(re.compile(query), root, files)
        anchors = align_matches([h.as_match() for h in hits], g, cfg.m, step_index=t)
        for regime in (LEX, AUGMENTED):
            prev = ctx[regime]
            gamma = expand(anchors, g, prev, g.community, cfg) if regime == AUGMENTED else ()
            new = fold_context(prev, anchors, gamma, cfg)
            wanted = [*anchors.anchors, *(x.node for x in gamma)]
            saturated = any(n not in new for n in wanted)
            traces[regime].steps.append(
                StepRecord(
                    step=t + 1,
                    query=query,
                    anchors=anchors.anchors,
                    gamma_size=len(gamma),
                    gamma_cost=sum(render_cost(x.node, cfg.node_cost_cap) for x in gamma),
                    members=new.members,
                    units_used=new.units_used,
                    recall=utility(new.members),
                    saturated=saturated,
                )
            )
            ctx[regime] = new
    return traces[LEX], traces[AUGMENTED]


def steps_to_recall(trace: RunTrace | Sequence, r: float | Fraction) -> float:
    """First 1-based step whose recall reaches ``r``; ``math.inf`` if none does."""
    recalls = trace.recalls if isinstance(trace, RunTrace) else list(trace)
    for t, value in enumerate(recalls, start=1):
        if value >= r:
            return t
    return math.inf


def discovery_gap(lex: RunTrace, augmented: RunTrace, y: frozenset[NodeId]) -> frozenset[NodeId]:
    """Targets exposed only by the augmented run at the final step."""
    if not lex.steps:
        return frozenset()
    return (frozenset(augmented.final.members) - frozenset(lex.final.members)) & y


@dataclass(frozen=True)
class CostReport:
    delta_cap: int
    max_gamma_cost: int
    max_gamma_size: int
    within_cap: bool
    r_star: float
    t_lex: float
    t_augmented: float
    strict_dominance: bool | None

    def to_json(self) -> dict:
        def num(x: float):
            return None if math.isinf(x) else x

        return {
            "delta_cap": self.delta_cap,
            "max_gamma_cost": self.max_gamma_cost,
            "max_gamma_size": self.max_gamma_size,
            "within_cap": self.within_cap,
            "r_star": self.r_star,
            "t_lex": num(self.t_lex),
            "t_augmented": num(self.t_augmented),
            "strict_dominance": self.strict_dominance,
        }


def token_cost_check(
    lex: RunTrace, augmented: RunTrace, c_step_lex: float, delta_cap: int, r_star: float = 1.0
) -> CostReport:
    """Check every step's expansion cost against ``delta_cap`` and evaluate the
    step-savings inequality.  The inequality is reported, not enforced: it is
    ``None`` when the lexical run never reaches ``r_star``."""
    costs = [s.gamma_cost for s in (*lex.steps, *augmented.steps)]
    sizes = [s.gamma_size for s in (*lex.steps, *augmented.steps)]
    t_lex = steps_to_recall(lex, r_star)
    t_augmented = steps_to_recall(augmented, r_star)
    strict = None
    if not math.isinf(t_lex):
        strict = (t_lex - t_augmented) / t_lex > delta_cap / (c_step_lex + delta_cap)
    return CostReport(
        delta_cap=delta_cap,
        max_gamma_cost=max(costs, default=0),
        max_gamma_size=max(sizes, default=0),
        within_cap=all(c <= delta_cap for c in costs),
        r_star=float(r_star),
        t_lex=t_lex,
        t_augmented=t_augmented,
        strict_dominance=strict,
    )
