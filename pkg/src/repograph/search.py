"""Regex search over indexed files and the graph evidence block appended to it."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .expansion import (
    AnchorSet,
    Context,
    Expansion,
    ExpansionConfig,
    LexicalMatch,
    align_matches,
    expand,
)
from .graph import RepoGraph
from .sidecar import NeighborRef, SidecarRecord

HEADER = "[Related files from dependency graph]"
LABEL_WIDTH = 10
CONT_INDENT = " " * (4 + LABEL_WIDTH)
# entries shown per Callers/Callees/Flow line group
EVIDENCE_REFS = 3


@dataclass(frozen=True)
class Hit:
    path: str
    line: int
    column: int
    text: str

    def render(self) -> str:
        return f"{self.path}:{self.line}:{self.text}"

    def as_match(self) -> LexicalMatch:
        return LexicalMatch(self.path, self.line, self.column, self.text)


def search_files(pattern: re.Pattern | str, root: str | Path, paths: Iterable[str]) -> list[Hit]:
    """One hit per matching line, ordered by (path, line).  Non-UTF-8 files are skipped."""
    rx = re.compile(pattern) if isinstance(pattern, str) else pattern
    root = Path(root)
    hits = []
    for path in sorted(paths):
        try:
            text = (root / path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError):
            continue
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = rx.search(line)
            if m:
                hits.append(Hit(path, lineno, m.start(), line))
    return hits


@dataclass(frozen=True)
class EvidenceSection:
    path: str
    label: str
    callers: tuple[NeighborRef, ...] = ()
    callees: tuple[NeighborRef, ...] = ()
    flows: tuple[dict, ...] = ()


def evidence_sections(
    gamma: Sequence[Expansion],
    anchors: AnchorSet,
    record_for: Callable[[str], SidecarRecord | None],
    refs: int = EVIDENCE_REFS,
) -> list[EvidenceSection]:
    """One section per expanded file that holds no anchor, best-scored file first."""
    anchor_files = {a.path for a in anchors.anchors}
    best: dict[str, float] = {}
    for x in gamma:
        if x.node.path in anchor_files:
            continue
        best[x.node.path] = max(best.get(x.node.path, 0.0), x.score)
    sections = []
    for path in sorted(best, key=lambda p: (-best[p], p)):
        record = record_for(path)
        if record is None:
            sections.append(EvidenceSection(path, ""))
            continue
        flows = tuple(f for f in record.flows if f["of"] > 1)[:refs]
        sections.append(
            EvidenceSection(
                path,
                record.community.get("label", ""),
                tuple(record.callers[:refs]),
                tuple(record.callees[:refs]),
                flows,
            )
        )
    return sections


def _group(label: str, items: list[str]) -> list[str]:
    if not items:
        return []
    head = f"    {label:<{LABEL_WIDTH}}"
    lines = []
    for i, item in enumerate(items):
        suffix = "," if i < len(items) - 1 else ""
        lines.append((head if i == 0 else CONT_INDENT) + item + suffix)
    return lines


def render_evidence(sections: Sequence[EvidenceSection]) -> str:
    if not sections:
        return ""
    lines = [HEADER]
    for s in sections:
        cluster = f" (cluster: {s.label})" if s.label else ""
        lines.append(f"  {s.path}{cluster}:")
        lines += _group("Callers:", [r.render() for r in s.callers])
        lines += _group("Callees:", [r.render() for r in s.callees])
        lines += _group("Flow:", [f"{f['name']} (step {f['step']}/{f['of']})" for f in s.flows])
    return "\n".join(lines) + "\n"


@dataclass
class SearchResult:
    hits: list[Hit]
    anchors: AnchorSet = field(default_factory=AnchorSet)
    gamma: tuple[Expansion, ...] = ()
    sections: list[EvidenceSection] = field(default_factory=list)

    def match_text(self) -> str:
        return "".join(h.render() + "\n" for h in self.hits)

    def render(self, graph: bool = True) -> str:
        out = self.match_text()
        block = render_evidence(self.sections) if graph else ""
        if block:
            out += "\n" + block
        return out

    def to_json(self, graph: bool = True) -> dict:
        data = {"matches": [{"path": h.path, "line": h.line, "text": h.text} for h in self.hits]}
        if graph:
            data["anchors"] = [a.label() for a in self.anchors.anchors]
            data["expansion"] = [
                {"node": x.node.label(), "score": round(x.score, 6), "source": x.source.label()} for x in self.gamma
            ]
            data["evidence"] = [
                {
                    "path": s.path,
                    "cluster": s.label,
                    "callers": [r.render() for r in s.callers],
                    "callees": [r.render() for r in s.callees],
                    "flows": list(s.flows),
                }
                for s in self.sections
            ]
        return data


def graph_search(
    pattern: re.Pattern | str,
    g: RepoGraph,
    root: str | Path,
    cfg: ExpansionConfig,
    record_for: Callable[[str], SidecarRecord | None],
    graph: bool = True,
) -> SearchResult:
    """Search, align hits to anchors, expand once from an empty context, and
    collect evidence for the expanded files."""
    hits = search_files(pattern, root, g.file_paths)
    result = SearchResult(hits)
    if not graph or not hits:
        return result
    anchors = align_matches([h.as_match() for h in hits], g, cfg.m)
    gamma = expand(anchors, g, Context.empty(cfg.budget), g.community, cfg)
    result.anchors = anchors
    result.gamma = gamma
    result.sections = evidence_sections(gamma, anchors, record_for)
    return result
