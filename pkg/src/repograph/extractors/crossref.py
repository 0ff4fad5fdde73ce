"""Mention scanning for documentation and configuration files."""

from __future__ import annotations

import re

from .model import FileParse

_PATH_TOKEN = re.compile(r"(?<![\w/.-])(?:\./)?([\w][\w./-]*\.[A-Za-z0-9]+)")
_BACKTICK = re.compile(r"`([^`\n]+)`")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CAMEL = re.compile(r"[a-z][A-Z]")
_DOTTED = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*")


def _codeish(word: str) -> bool:
    return "_" in word.strip("_") or bool(_CAMEL.search(word))


def parse_doc(path: str, text: str) -> FileParse:
    parse = FileParse(path, "doc", max(1, len(text.splitlines())))
    found: set[tuple[str, str]] = set()
    for m in _PATH_TOKEN.finditer(text):
        found.add(("path", m.group(1).rstrip(".")))
    for m in _BACKTICK.finditer(text):
        for word in _IDENT.findall(m.group(1)):
            found.add(("name", word))
    for word in _IDENT.findall(text):
        if _codeish(word):
            found.add(("name", word))
    parse.mentions = sorted(
        (ns, tok) for ns, tok in found if not (ns == "name" and tok.startswith("_"))
    )
    return parse


def parse_config(path: str, text: str) -> FileParse:
    parse = FileParse(path, "config", max(1, len(text.splitlines())))
    parse.mentions = sorted({("mod", tok) for tok in _DOTTED.findall(text)})
    return parse
