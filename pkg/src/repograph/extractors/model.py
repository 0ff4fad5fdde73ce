"""Per-file parse output, independent of any other file."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import NodeKind


@dataclass(frozen=True)
class Symbol:
    qualified_name: str
    kind: NodeKind
    span: tuple[int, int]
    # qualified name of the enclosing class when the symbol sits directly in a class body
    owner_class: str | None = None
    signature: str = ""


@dataclass(frozen=True)
class ImportRef:
    module: str
    level: int = 0
    names: tuple[str, ...] = ()
    # local binding for each entry of ``names`` (or for ``module`` when names is empty)
    aliases: tuple[str | None, ...] = ()
    line: int = 0

    @property
    def is_from(self) -> bool:
        return bool(self.names)


@dataclass(frozen=True)
class CallRef:
    scope: str  # qualified name of the enclosing symbol, "" at module level
    parts: tuple[str, ...]  # dotted callee expression; "" marks an opaque receiver
    line: int = 0


@dataclass(frozen=True)
class BaseRef:
    cls: str
    parts: tuple[str, ...]


@dataclass
class FileParse:
    path: str
    language: str
    line_count: int
    symbols: list[Symbol] = field(default_factory=list)
    imports: list[ImportRef] = field(default_factory=list)
    path_imports: list[str] = field(default_factory=list)
    calls: list[CallRef] = field(default_factory=list)
    bases: list[BaseRef] = field(default_factory=list)
    docstrings: dict[str, str] = field(default_factory=dict)
    # (key namespace, token) pairs found in prose or config text
    mentions: list[tuple[str, str]] = field(default_factory=list)
    error: str | None = None

    @property
    def parsed(self) -> bool:
        return self.language != "none"
