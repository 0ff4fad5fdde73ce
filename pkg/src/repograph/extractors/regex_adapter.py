"""Degraded import-only extraction for files the reference adapter cannot read."""

from __future__ import annotations

import re

from .model import FileParse, ImportRef

EXTENSIONS = (
    ".js", ".jsx", ".mjs", ".cjs", ".ts", ".tsx",
    ".c", ".h", ".cc", ".cpp", ".hpp", ".cxx",
)

_JS_IMPORT = re.compile(
    r"""(?:^|\s)(?:import\s[^'"]*?from\s*|import\s*|export\s[^'"]*?from\s*)['"]([^'"]+)['"]"""
    r"""|require\(\s*['"]([^'"]+)['"]\s*\)""",
    re.MULTILINE,
)
_C_INCLUDE = re.compile(r'^\s*#\s*include\s+"([^"]+)"', re.MULTILINE)

_PY_IMPORT = re.compile(r"^[ \t]*import[ \t]+([\w. \t,]+)", re.MULTILINE)
_PY_FROM = re.compile(r"^[ \t]*from[ \t]+(\.*)([\w.]*)[ \t]+import[ \t]+\(?([\w, \t*]+)", re.MULTILINE)


def parse_regex(path: str, text: str) -> FileParse:
    parse = FileParse(path, "regex", max(1, len(text.splitlines())))
    if path.endswith((".c", ".h", ".cc", ".cpp", ".hpp", ".cxx")):
        parse.path_imports.extend(_C_INCLUDE.findall(text))
    else:
        for m in _JS_IMPORT.finditer(text):
            parse.path_imports.append(m.group(1) or m.group(2))
    return parse


def parse_python_imports(path: str, text: str, error: str) -> FileParse:
    """Fallback for Python sources that fail to parse: imports only, no symbols."""
    parse = FileParse(path, "python-degraded", max(1, len(text.splitlines())), error=error)
    for m in _PY_IMPORT.finditer(text):
        for chunk in m.group(1).split(","):
            words = chunk.split()
            if not words:
                continue
            alias = words[2] if len(words) == 3 and words[1] == "as" else None
            parse.imports.append(ImportRef(words[0], 0, (), (alias,)))
    for m in _PY_FROM.finditer(text):
        names = tuple(n.strip().split()[0] for n in m.group(3).split(",") if n.strip())
        parse.imports.append(ImportRef(m.group(2), len(m.group(1)), names, (None,) * len(names)))
    return parse
