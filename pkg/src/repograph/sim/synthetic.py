"""Seeded synthetic Python repositories with a planted ground-truth set."""

from __future__ import annotations

import json
import random
import re
import shutil
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import InfeasibleSpec

WORDS = (
    "parse", "emit", "load", "store", "route", "fetch", "merge", "scan", "index", "render",
    "encode", "decode", "queue", "flush", "plan", "apply", "check", "build", "bind", "spawn",
)
PACKAGE = "synth"
FILES_PER_DIR = 40
MAX_HIDDEN_PER_VISIBLE = 6


@dataclass(frozen=True)
class SyntheticRepoSpec:
    file_count: int = 20
    symbols_per_file: tuple[int, int] = (2, 5)
    # expected cross-file edges per file, by relation; "fuzzy" adds opaque-receiver calls
    density: dict = field(default_factory=lambda: {"invokes": 1.0, "imports": 0.3, "inherits": 0.2, "fuzzy": 0.2})
    y_size: int = 3
    visibility: float = 1.0
    seed: int = 0
    tests: float = 0.0
    docs: bool = False
    config: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols_per_file", tuple(self.symbols_per_file))
        object.__setattr__(self, "density", dict(self.density))

    @property
    def n_visible(self) -> int:
        if self.y_size == 0:
            return 0
        return min(self.y_size, max(1, round(self.visibility * self.y_size)))

    def to_json(self) -> dict:
        data = asdict(self)
        data["symbols_per_file"] = list(self.symbols_per_file)
        return data

    @classmethod
    def from_json(cls, data: dict) -> SyntheticRepoSpec:
        data = dict(data)
        if "symbols_per_file" in data:
            data["symbols_per_file"] = tuple(data["symbols_per_file"])
        return cls(**data)


@dataclass(frozen=True)
class PlantedRepo:
    root: Path
    spec: SyntheticRepoSpec
    # (path, qualified_name) pairs
    y: tuple[tuple[str, str], ...]
    visible: tuple[tuple[str, str], ...]
    hidden: tuple[tuple[str, str], ...]
    functions: tuple[tuple[str, str], ...]

    def queries(self, decoys: int = 0, seed: int | None = None) -> list[str]:
        """One ``def name(`` regex per visible target, seeded order, plus decoys."""
        rng = random.Random(self.spec.seed if seed is None else seed)
        names = [q for _, q in self.visible]
        pool = sorted({q for _, q in self.functions} - {q for _, q in self.y})
        names += rng.sample(pool, min(decoys, len(pool)))
        rng.shuffle(names)
        return [rf"def {re.escape(n)}\(" for n in names]


def module_path(i: int) -> str:
    return f"{PACKAGE}/part_{i // FILES_PER_DIR:02d}/mod_{i:04d}.py"


def module_name(i: int) -> str:
    return module_path(i)[:-3].replace("/", ".")


@dataclass
class _File:
    index: int
    functions: list[str]
    calls: dict[str, list[str]] = field(default_factory=dict)
    fuzzy: dict[str, list[str]] = field(default_factory=dict)
    imports: dict[str, set[str]] = field(default_factory=dict)
    plain_imports: set[str] = field(default_factory=set)
    cls: str | None = None
    base: tuple[int, str] | None = None

    def render(self) -> str:
        lines = [f'"""Synthetic module {self.index}."""', ""]
        for mod in sorted(self.plain_imports):
            lines.append(f"import {mod}")
        for mod in sorted(self.imports):
            lines.append(f"from {mod} import {', '.join(sorted(self.imports[mod]))}")
        lines.append("")
        for fn in self.functions:
            lines += ["", f"def {fn}(obj=None):", "    value = 0"]
            for callee in self.calls.get(fn, []):
                lines.append(f"    value += {callee}() or 0")
            for callee in self.fuzzy.get(fn, []):
                lines.append(f"    obj.{callee}()")
            lines.append("    return value")
        if self.cls is not None:
            base = self.base[1] if self.base else "object"
            lines += ["", "", f"class {self.cls}({base}):", f"    def run_{self.index}(self):"]
            lines.append(f"        return {self.functions[0]}()")
        return "\n".join(lines) + "\n"


def _count(rng: random.Random, expected: float) -> int:
    whole = int(expected)
    return whole + (1 if rng.random() < expected - whole else 0)


def generate_repo(spec: SyntheticRepoSpec, root: str | Path) -> PlantedRepo:
    """Write the repository under ``root`` (replacing it) and return the plant.

    Every hidden target is a fresh function called directly from a visible one
    in the same file, so it sits one hop away over a confidence-1.0 edge.
    """
    n_hidden = spec.y_size - spec.n_visible
    if spec.file_count < 1 or spec.y_size < 0:
        raise InfeasibleSpec("file_count must be positive and y_size non-negative")
    if n_hidden and spec.density.get("invokes", 0.0) <= 0.0:
        raise InfeasibleSpec("hidden targets need call edges, but invokes density is 0")
    if n_hidden > MAX_HIDDEN_PER_VISIBLE * spec.n_visible:
        raise InfeasibleSpec("too many hidden targets per visible target")
    lo, hi = spec.symbols_per_file
    if lo < 1 or hi < lo:
        raise InfeasibleSpec("symbols_per_file must be a non-empty positive range")

    rng = random.Random(spec.seed)
    files = []
    for i in range(spec.file_count):
        n = rng.randint(lo, hi)
        names = [f"{rng.choice(WORDS)}_{i}_{j}" for j in range(n)]
        files.append(_File(i, names))
        for j in range(1, n):
            if rng.random() < 0.5:
                files[i].calls.setdefault(names[j], []).append(names[j - 1])

    def other(i: int) -> int | None:
        if spec.file_count < 2:
            return None
        j = rng.randrange(spec.file_count - 1)
        return j + (j >= i)

    for f in files:
        for _ in range(_count(rng, spec.density.get("invokes", 0.0))):
            j = other(f.index)
            if j is None:
                break
            callee = rng.choice(files[j].functions)
            caller = rng.choice(f.functions)
            f.calls.setdefault(caller, []).append(callee)
            f.imports.setdefault(module_name(j), set()).add(callee)
        for _ in range(_count(rng, spec.density.get("imports", 0.0))):
            j = other(f.index)
            if j is not None:
                f.plain_imports.add(module_name(j))
        for _ in range(_count(rng, spec.density.get("fuzzy", 0.0))):
            j = other(f.index)
            if j is not None:
                f.fuzzy.setdefault(rng.choice(f.functions), []).append(rng.choice(files[j].functions))
        if rng.random() < 0.5:
            f.cls = f"Model{f.index}"
    for f in files:
        if f.cls and rng.random() < min(1.0, spec.density.get("inherits", 0.0)):
            candidates = [g for g in files if g.cls and g.index != f.index]
            if candidates:
                g = rng.choice(candidates)
                f.base = (g.index, g.cls)
                f.imports.setdefault(module_name(g.index), set()).add(g.cls)

    all_funcs = [(f.index, fn) for f in files for fn in f.functions]
    visible = rng.sample(all_funcs, min(spec.n_visible, len(all_funcs)))
    hidden = []
    for h in range(n_hidden):
        vi, vname = visible[h % len(visible)]
        fname = f"{rng.choice(WORDS)}_{vi}_h{h}"
        files[vi].functions.append(fname)
        files[vi].calls.setdefault(vname, []).append(fname)
        hidden.append((vi, fname))

    root = Path(root)
    if root.exists():
        shutil.rmtree(root)
    for f in files:
        target = root / module_path(f.index)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(f.render(), encoding="utf-8")
    if spec.tests > 0:
        _write_tests(rng, spec, files, root)
    if spec.docs:
        _write_docs(rng, files, root)
    if spec.config:
        mods = sorted({module_name(rng.randrange(spec.file_count)) for _ in range(3)})
        body = "[plugins]\n" + "".join(f'p{i} = "{m}"\n' for i, m in enumerate(mods))
        (root / "settings.toml").write_text(body, encoding="utf-8")

    def pair(i: int, name: str) -> tuple[str, str]:
        return (module_path(i), name)

    vis = tuple(pair(*v) for v in visible)
    hid = tuple(pair(*h) for h in hidden)
    return PlantedRepo(
        root=root,
        spec=spec,
        y=tuple(sorted(vis + hid)),
        visible=tuple(sorted(vis)),
        hidden=tuple(sorted(hid)),
        functions=tuple(sorted(pair(f.index, fn) for f in files for fn in f.functions)),
    )


def _write_tests(rng: random.Random, spec: SyntheticRepoSpec, files: list[_File], root: Path) -> None:
    for f in files:
        if rng.random() >= spec.tests:
            continue
        target = f.functions[0]
        body = (
            f"from {module_name(f.index)} import {target}\n\n\n"
            f"def test_{f.index}():\n    assert {target}() == 0\n"
        )
        path = root / "tests" / f"test_mod_{f.index:04d}.py"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")


def _write_docs(rng: random.Random, files: list[_File], root: Path) -> None:
    picks = rng.sample(files, min(3, len(files)))
    lines = ["# Overview", ""]
    for f in picks:
        lines.append(f"See `{f.functions[0]}` in {module_path(f.index)}.")
    (root / "docs").mkdir(parents=True, exist_ok=True)
    (root / "docs" / "overview.md").write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- edit scripts --------------------------------------------------------------

_DEF = re.compile(r"^def (\w+)\(", re.M)


def _functions_in(root: Path) -> dict[str, list[str]]:
    out = {}
    for p in sorted(root.rglob("*.py")):
        out[p.relative_to(root).as_posix()] = _DEF.findall(p.read_text(encoding="utf-8"))
    return out


def _module_of(path: str) -> str:
    return path[:-3].replace("/", ".")


def apply_edit_script(root: str | Path, rng: random.Random, n_edits: int) -> list[dict]:
    """Apply ``n_edits`` random add/modify/delete edits in place; returns the script."""
    root = Path(root)
    script: list[dict] = []
    counter = 0
    for _ in range(n_edits):
        funcs = _functions_in(root)
        paths = sorted(p for p in funcs if p.startswith(PACKAGE + "/"))
        op = rng.choice(("add", "modify", "modify", "delete")) if len(paths) > 2 else "add"
        if op == "add":
            counter += 1
            host = rng.choice(paths) if paths else None
            name = f"{rng.choice(WORDS)}_new{counter}_{rng.randrange(10**6)}"
            path = f"{PACKAGE}/part_new/extra_{counter}_{rng.randrange(10**6)}.py"
            lines = [f'"""Added module {counter}."""', ""]
            call = ""
            if host and funcs[host]:
                callee = rng.choice(funcs[host])
                lines.append(f"from {_module_of(host)} import {callee}")
                call = f"    {callee}()\n"
            text = "\n".join(lines) + f"\n\n\ndef {name}(obj=None):\n{call}    return 0\n"
            target = root / path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
            script.append({"op": "add", "path": path})
        elif op == "delete":
            path = rng.choice(paths)
            (root / path).unlink()
            script.append({"op": "delete", "path": path})
        else:
            path = rng.choice(paths)
            text = (root / path).read_text(encoding="utf-8")
            kind = rng.choice(("append", "drop", "rename"))
            names = funcs[path]
            if kind == "drop" and len(names) > 1:
                victim = rng.choice(names)
                text = re.sub(rf"\n\ndef {victim}\(obj=None\):\n(?:    .*\n)*", "\n", text)
            elif kind == "rename" and names:
                victim = rng.choice(names)
                text = re.sub(rf"\b{victim}\b", victim + "_r", text)
            else:
                counter += 1
                donor = rng.choice(paths)
                callee = rng.choice(funcs[donor]) if funcs[donor] else None
                extra = f"\n\ndef added_{counter}_{rng.randrange(10**6)}(obj=None):\n"
                if callee and donor != path:
                    text = f"from {_module_of(donor)} import {callee}\n" + text
                    extra += f"    {callee}()\n"
                text += extra + "    return 1\n"
                kind = "append"
            (root / path).write_text(text, encoding="utf-8")
            script.append({"op": "modify", "kind": kind, "path": path})
    return script


def spec_from_file(path: str | Path) -> SyntheticRepoSpec:
    return SyntheticRepoSpec.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
