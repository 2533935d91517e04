"""Behavior-preserving source transformations over original programs.

Six operators inject inert material: an unused field (AF), a comment
line (CO), an inner class (IC), an unused import (JI), a dead local
variable (LVD), or a new top-level class (TLC). Injections are whole
lines with fresh identifiers, which yields two mechanical guarantees:
deleting the manifest's lines restores the base program byte-for-byte,
and no injected name can capture or shadow an existing one. All
randomness flows from the seed through a counter-based generator, so a
variant is a pure function of (sources, operator, seed).

A body whose braces open and close on one line offers no line-based
insertion point; the operator is then simply inapplicable there.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import javalex
from .dataset import BugCorpus, SourceSet
from .javalex import METHOD_BODY, TYPE_BODY, FileScan
from .rng import CounterRng, derive_key

logger = logging.getLogger(__name__)

AF = "AF"
CO = "CO"
IC = "IC"
JI = "JI"
LVD = "LVD"
TLC = "TLC"
OPERATORS = (AF, CO, IC, JI, LVD, TLC)

IMPORT_POOL = (
    "java.util.ArrayList",
    "java.util.HashMap",
    "java.util.HashSet",
    "java.util.LinkedList",
    "java.util.TreeMap",
    "java.util.TreeSet",
    "java.util.ArrayDeque",
    "java.util.PriorityQueue",
    "java.util.BitSet",
    "java.util.StringJoiner",
    "java.util.Vector",
    "java.util.Stack",
)

_COMMENT_WORDS = ("comment", "note", "marker", "revision", "checkpoint", "reviewed")
_FIELD_PREFIXES = ("field", "aux", "extra")
_LOCAL_PREFIXES = ("local", "tmp", "unused")
_CLASS_PREFIXES = ("Aux", "Helper", "Extra")
_VALUE_PREFIXES = ("value", "data")


class NoInsertionPoint(ValueError):
    """The operator has no legal place to act in these sources."""


@dataclass(frozen=True)
class InjectedElement:
    kind: str            # field | comment | inner_class | import | local | top_level_class
    name: str            # injected identifier; "" for comments
    file: str
    line: int            # 1-based first line within the transformed file
    lines: tuple[str, ...]


@dataclass(frozen=True)
class MetamorphicVariant:
    base_instance_id: str
    operator: str
    seed: int
    transformed_original: SourceSet
    manifest: tuple[InjectedElement, ...]
    resulting_unchanged: bool = True


@dataclass
class FileStructure:
    path: str
    scan: FileScan
    member_points: list[tuple[int, object]]  # (0-based insert index, type context)
    body_points: list[tuple[int, object]]    # (0-based insert index, method context)
    comment_points: list[int]                # 0-based insert indices
    import_point: int


@dataclass
class StructuralIndex:
    files: dict[str, FileStructure]
    identifiers: set[str]


def index_structure(src: SourceSet) -> StructuralIndex:
    """Scan every file and collect line-safe insertion points."""
    files: dict[str, FileStructure] = {}
    identifiers: set[str] = set()
    for path, content in src.files:
        scan = javalex.scan_file(content, path)
        identifiers |= scan.identifiers
        files[path] = FileStructure(
            path=path,
            scan=scan,
            member_points=_insertion_points(scan, TYPE_BODY),
            body_points=_insertion_points(scan, METHOD_BODY),
            comment_points=_comment_points(scan),
            import_point=(scan.package_line + 1) if scan.package_line is not None else 0,
        )
    return StructuralIndex(files=files, identifiers=identifiers)


def _insertion_points(scan: FileScan, kind: str) -> list[tuple[int, object]]:
    points = []
    for ctx in scan.contexts:
        if ctx.kind != kind:
            continue
        if kind == TYPE_BODY and ctx.type_keyword not in ("class", "interface"):
            continue  # enum/record bodies have placement rules of their own
        if kind == METHOD_BODY and ctx.is_constructor:
            continue  # super()/this() must stay the first statement
        if ctx.close_line <= ctx.open_line:
            continue  # one-line body: no full line fits inside
        if ctx.open_line >= len(scan.line_end_in_code):
            continue
        if not scan.line_end_in_code[ctx.open_line]:
            continue
        if scan.context_at_line_end[ctx.open_line] is not ctx:
            continue  # another brace opened later on the same line
        points.append((ctx.open_line + 1, ctx))
    return points


def _comment_points(scan: FileScan) -> list[int]:
    points = [0]
    for i, safe in enumerate(scan.line_end_in_code):
        if safe:
            points.append(i + 1)
    return sorted(set(points))


def fresh_identifier(index: StructuralIndex, prefix: str, rng: CounterRng) -> str:
    """A prefix plus random suffix that is new to this index.

    Issued names are claimed in the index's identifier set, so repeated
    draws are pairwise distinct.
    """
    while True:
        name = f"{prefix}{rng.randint(0, 9999)}"
        if name not in index.identifiers:
            index.identifiers.add(name)
            return name


def apply_operator(
    src: SourceSet, op: str, seed: int, instance_id: str = ""
) -> MetamorphicVariant:
    """Apply one operator; pure in (src, op, seed)."""
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}")
    rng = CounterRng(derive_key(seed, op))
    index = index_structure(src)
    element = _OPERATOR_FUNCS[op](index, rng)
    transformed = _splice(src, element)
    return MetamorphicVariant(
        base_instance_id=instance_id,
        operator=op,
        seed=seed,
        transformed_original=transformed,
        manifest=(element,),
    )


def operator_applicable(index: StructuralIndex, op: str) -> bool:
    if op in (AF, IC):
        return any(fs.member_points for fs in index.files.values())
    if op == LVD:
        return any(fs.body_points for fs in index.files.values())
    if op == CO:
        return any(fs.comment_points for fs in index.files.values())
    if op == JI:
        return bool(_eligible_imports(index))
    if op == TLC:
        return bool(index.files)
    return False


def transform_corpus(corpus: BugCorpus, master_seed: int) -> list[MetamorphicVariant]:
    """One variant per instance; operator drawn uniformly among applicable ones."""
    if not corpus.instances:
        raise ValueError("empty corpus")
    variants = []
    counts = {op: 0 for op in OPERATORS}
    for inst in corpus.instances:
        seed = derive_key(master_seed, inst.id)
        index = index_structure(inst.original)
        applicable = [op for op in OPERATORS if operator_applicable(index, op)]
        if not applicable:  # unreachable while CO applies everywhere
            logger.warning("no applicable operator for %s; left unchanged", inst.id)
            continue
        op = CounterRng(derive_key(master_seed, inst.id, "op")).choice(applicable)
        variants.append(apply_operator(inst.original, op, seed, instance_id=inst.id))
        counts[op] += 1
    logger.info(
        "transformed %d instances: %s",
        len(variants),
        ", ".join(f"{op}={n}" for op, n in counts.items()),
    )
    return variants


def operator_counts(variants: list[MetamorphicVariant]) -> dict[str, int]:
    counts = {op: 0 for op in OPERATORS}
    for v in variants:
        counts[v.operator] += 1
    return counts


# ---------------------------------------------------------------- operators


def _inject_field(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    points = _all_points(index, "member_points")
    if not points:
        raise NoInsertionPoint("AF: no class or interface body spans multiple lines")
    path, insert_at, ctx = rng.choice(points)
    jtype, literal = _typed_literal(rng)
    name = fresh_identifier(index, rng.choice(_FIELD_PREFIXES), rng)
    indent = _indent_of(index.files[path].scan.lines[ctx.open_line]) + "  "
    return InjectedElement(
        kind="field",
        name=name,
        file=path,
        line=insert_at + 1,
        lines=(f"{indent}{jtype} {name} = {literal};",),
    )


def _inject_comment(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    candidates = [
        (path, point)
        for path, fs in index.files.items()
        for point in fs.comment_points
    ]
    if not candidates:
        raise NoInsertionPoint("CO: no safe line boundary")
    path, insert_at = rng.choice(candidates)
    lines = index.files[path].scan.lines
    indent = _indent_of(lines[insert_at]) if insert_at < len(lines) else ""
    word = rng.choice(_COMMENT_WORDS)
    text = f"{indent}// {word} {rng.randint(0, 9999)}"
    return InjectedElement(kind="comment", name="", file=path, line=insert_at + 1, lines=(text,))


def _inject_inner_class(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    points = _all_points(index, "member_points")
    if not points:
        raise NoInsertionPoint("IC: no class or interface body spans multiple lines")
    path, insert_at, ctx = rng.choice(points)
    cls = fresh_identifier(index, rng.choice(_CLASS_PREFIXES), rng)
    fld = fresh_identifier(index, rng.choice(_VALUE_PREFIXES), rng)
    jtype, literal = _typed_literal(rng)
    indent = _indent_of(index.files[path].scan.lines[ctx.open_line]) + "  "
    return InjectedElement(
        kind="inner_class",
        name=cls,
        file=path,
        line=insert_at + 1,
        lines=(
            f"{indent}class {cls} {{",
            f"{indent}  {jtype} {fld} = {literal};",
            f"{indent}}}",
        ),
    )


def _inject_import(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    eligible = _eligible_imports(index)
    if not eligible:
        raise NoInsertionPoint("JI: every pool type already occurs")
    path, fq = rng.choice(eligible)
    simple = fq.rsplit(".", 1)[1]
    index.identifiers.add(simple)
    return InjectedElement(
        kind="import",
        name=simple,
        file=path,
        line=index.files[path].import_point + 1,
        lines=(f"import {fq};",),
    )


def _inject_local(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    points = _all_points(index, "body_points")
    if not points:
        raise NoInsertionPoint("LVD: no method body spans multiple lines")
    path, insert_at, ctx = rng.choice(points)
    jtype, literal = _typed_literal(rng)
    name = fresh_identifier(index, rng.choice(_LOCAL_PREFIXES), rng)
    indent = _indent_of(index.files[path].scan.lines[ctx.open_line]) + "  "
    return InjectedElement(
        kind="local",
        name=name,
        file=path,
        line=insert_at + 1,
        lines=(f"{indent}{jtype} {name} = {literal};",),
    )


def _inject_top_level_class(index: StructuralIndex, rng: CounterRng) -> InjectedElement:
    if not index.files:
        raise NoInsertionPoint("TLC: no files")
    path = rng.choice(sorted(index.files))
    fs = index.files[path]
    cls = fresh_identifier(index, rng.choice(_CLASS_PREFIXES), rng)
    fld = fresh_identifier(index, rng.choice(_VALUE_PREFIXES), rng)
    jtype, literal = _typed_literal(rng)
    return InjectedElement(
        kind="top_level_class",
        name=cls,
        file=path,
        line=len(fs.scan.lines) + 1,
        lines=(
            "",
            f"class {cls} {{",
            f"  {jtype} {fld} = {literal};",
            "}",
        ),
    )


_OPERATOR_FUNCS = {
    AF: _inject_field,
    CO: _inject_comment,
    IC: _inject_inner_class,
    JI: _inject_import,
    LVD: _inject_local,
    TLC: _inject_top_level_class,
}


def _all_points(index: StructuralIndex, attr: str) -> list[tuple[str, int, object]]:
    return [
        (path, insert_at, ctx)
        for path, fs in sorted(index.files.items())
        for insert_at, ctx in getattr(fs, attr)
    ]


def _eligible_imports(index: StructuralIndex) -> list[tuple[str, str]]:
    out = []
    for path, fs in sorted(index.files.items()):
        for fq in IMPORT_POOL:
            simple = fq.rsplit(".", 1)[1]
            if simple in index.identifiers:
                continue
            out.append((path, fq))
    return out


def _typed_literal(rng: CounterRng) -> tuple[str, str]:
    kind = rng.randrange(10)
    if kind == 0:
        return "int", str(rng.randint(0, 99))
    if kind == 1:
        return "long", f"{rng.randint(0, 99)}L"
    if kind == 2:
        return "double", f"{rng.randint(0, 9)}.{rng.randint(0, 9)}"
    if kind == 3:
        return "boolean", rng.choice(("true", "false"))
    if kind == 4:
        return "char", f"'{rng.choice('abcdefghijklmnopqrstuvwxyz')}'"
    if kind == 5:
        return "String", f'"s{rng.randint(0, 999)}"'
    if kind == 6:
        return "Integer", f"Integer.valueOf({rng.randint(0, 99)})"
    if kind == 7:
        return "Long", f"Long.valueOf({rng.randint(0, 99)}L)"
    if kind == 8:
        return "Double", f"Double.valueOf({rng.randint(0, 9)}.{rng.randint(0, 9)})"
    return "Boolean", rng.choice(("Boolean.TRUE", "Boolean.FALSE"))


def _indent_of(line: str) -> str:
    return line[: len(line) - len(line.lstrip(" \t"))]


def _splice(src: SourceSet, element: InjectedElement) -> SourceSet:
    files = []
    for path, content in src.files:
        if path != element.file:
            files.append((path, content))
            continue
        lines = content.split("\n")
        trailing = content.endswith("\n")
        if trailing:
            lines = lines[:-1]
        at = element.line - 1
        new_lines = lines[:at] + list(element.lines) + lines[at:]
        new_content = "\n".join(new_lines) + ("\n" if trailing else "")
        files.append((path, new_content))
    return SourceSet(files=tuple(files))


def remove_injected_lines(content: str, elements: list[InjectedElement]) -> str:
    """Inverse of the splice: drop manifest lines, restoring the base text."""
    lines = content.split("\n")
    trailing = content.endswith("\n")
    if trailing:
        lines = lines[:-1]
    drop: set[int] = set()
    for el in elements:
        for offset in range(len(el.lines)):
            drop.add(el.line - 1 + offset)
    kept = [ln for i, ln in enumerate(lines) if i not in drop]
    return "\n".join(kept) + ("\n" if trailing else "")


# --------------------------------------------------------------- persistence


def persist_variants(
    variants: list[MetamorphicVariant],
    corpus: BugCorpus,
    root: str | Path,
    master_seed: int,
) -> Path:
    """Write variants under <root>/variants/<master_seed>/<id>/ as a loadable corpus."""
    base = Path(root) / "variants" / str(master_seed)
    for variant in variants:
        inst = corpus.by_id(variant.base_instance_id)
        inst_dir = base / "instances" / inst.id
        (inst_dir / "original").mkdir(parents=True, exist_ok=True)
        (inst_dir / "resulting").mkdir(parents=True, exist_ok=True)
        (inst_dir / "meta").write_text(
            f"id={inst.id}\ntool={inst.tool}\nrefactoring={inst.refactoring_type}\n"
            f"label={inst.label}\n",
            encoding="utf-8",
        )
        for rel, content in variant.transformed_original.files:
            path = inst_dir / "original" / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")
        for rel, content in inst.resulting.files:
            path = inst_dir / "resulting" / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")
        if inst.exposing_test is not None:
            (inst_dir / "test").mkdir(exist_ok=True)
            (inst_dir / "test" / "Test.java").write_text(inst.exposing_test, "utf-8")
        manifest = {
            "operator": variant.operator,
            "seed": variant.seed,
            "elements": [
                {
                    "kind": el.kind,
                    "name": el.name,
                    "file": el.file,
                    "line": el.line,
                    "lines": list(el.lines),
                }
                for el in variant.manifest
            ],
        }
        (inst_dir / "manifest").write_text(json.dumps(manifest, indent=1), "utf-8")
    return base
