"""Lexical, brace-aware scanning of Java source.

Not a Java parser: a single character pass that tracks comments, string,
char and text-block literals, and brace nesting, and classifies each
opening brace as a type body, a method body, or other. That is enough
structure to find safe line-based insertion points, collect the
identifier set, and count top-level public classes. Anything ambiguous
is classified conservatively (no insertion point rather than a wrong
one).
"""

from __future__ import annotations

from dataclasses import dataclass, field

TYPE_KEYWORDS = frozenset({"class", "interface", "enum", "record"})

# Brace context kinds
TYPE_BODY = "type"
METHOD_BODY = "method"
OTHER_BLOCK = "block"


class ScanError(ValueError):
    """Base for lexical scan failures."""


class UnbalancedBraces(ScanError):
    pass


class UnterminatedLiteral(ScanError):
    pass


@dataclass
class BraceContext:
    """One `{ ... }` region discovered by the scan."""

    kind: str
    open_line: int  # 0-based
    close_line: int = -1
    depth: int = 0
    type_keyword: str = ""   # for TYPE_BODY: class/interface/enum/record
    name: str = ""           # type or method name when recognized
    is_constructor: bool = False
    is_public: bool = False
    parent: "BraceContext | None" = None
    top_level: bool = False


@dataclass
class FileScan:
    """Result of scanning one Java source file."""

    lines: list[str]
    ends_with_newline: bool
    identifiers: set[str] = field(default_factory=set)
    contexts: list[BraceContext] = field(default_factory=list)
    # True at index i when the boundary *after* line i is in plain code
    # (not inside a literal or block comment), so a whole line may be
    # inserted there without changing any token.
    line_end_in_code: list[bool] = field(default_factory=list)
    # Innermost open context right after each line's newline; None at depth 0.
    context_at_line_end: list[BraceContext | None] = field(default_factory=list)
    package_line: int | None = None
    last_import_line: int | None = None

    @property
    def type_contexts(self) -> list[BraceContext]:
        return [c for c in self.contexts if c.kind == TYPE_BODY]

    @property
    def method_contexts(self) -> list[BraceContext]:
        return [c for c in self.contexts if c.kind == METHOD_BODY]

    def public_class_names(self) -> list[str]:
        return [
            c.name
            for c in self.contexts
            if c.kind == TYPE_BODY and c.top_level and c.is_public
        ]


# Scanner states
_CODE = 0
_LINE_COMMENT = 1
_BLOCK_COMMENT = 2
_STRING = 3
_CHAR = 4
_TEXT_BLOCK = 5

_IDENT_START = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$"
)
_IDENT_PART = _IDENT_START | frozenset("0123456789")


def scan_file(text: str, path: str = "<source>") -> FileScan:
    """Scan one file; raises UnbalancedBraces/UnterminatedLiteral."""
    raw_lines = text.split("\n")
    ends_nl = text.endswith("\n")
    if ends_nl:
        raw_lines = raw_lines[:-1]
    result = FileScan(lines=raw_lines, ends_with_newline=ends_nl)

    state = _CODE
    line_no = 0
    stack: list[BraceContext] = []
    contexts: list[BraceContext] = []
    token = ""
    prev_token = ""          # last completed identifier-ish token
    prev_sig_char = ""       # last significant punctuation seen in code state
    pending_type_kw = ""     # a type keyword awaiting its name
    pending_type_name = ""
    pending_type_public = False
    after_paren = False      # only header-tail tokens since last ')'
    stmt_has_assign = False  # '=' seen since last ; { }
    stmt_has_new = False     # 'new' seen since last ; { }
    ident_before_paren = ""
    stmt_is_public = False

    def close_token() -> None:
        nonlocal token, prev_token, pending_type_kw, pending_type_name
        nonlocal stmt_has_new, pending_type_public, stmt_is_public
        if not token:
            return
        result.identifiers.add(token)
        if token == "new":
            stmt_has_new = True
        if token == "public":
            stmt_is_public = True
        if token in TYPE_KEYWORDS and prev_sig_char != ".":
            pending_type_kw = token
            pending_type_name = ""
            pending_type_public = stmt_is_public
        elif pending_type_kw and not pending_type_name and prev_sig_char != ".":
            pending_type_name = token
        prev_token = token
        token = ""

    def end_statement() -> None:
        nonlocal stmt_has_assign, stmt_has_new, after_paren, stmt_is_public
        stmt_has_assign = False
        stmt_has_new = False
        after_paren = False
        stmt_is_public = False

    def end_line() -> None:
        nonlocal line_no
        result.line_end_in_code.append(state == _CODE)
        result.context_at_line_end.append(stack[-1] if stack else None)
        line_no += 1

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        nxt = text[i + 1] if i + 1 < n else ""

        if state == _LINE_COMMENT:
            if ch == "\n":
                state = _CODE
                end_line()
            i += 1
            continue

        if state == _BLOCK_COMMENT:
            if ch == "*" and nxt == "/":
                state = _CODE
                i += 2
                continue
            if ch == "\n":
                end_line()
            i += 1
            continue

        if state == _STRING:
            if ch == "\\":
                i += 2
                continue
            if ch == "\n":
                raise UnterminatedLiteral(f"{path}:{line_no + 1}: string literal not closed")
            if ch == '"':
                state = _CODE
            i += 1
            continue

        if state == _CHAR:
            if ch == "\\":
                i += 2
                continue
            if ch == "\n":
                raise UnterminatedLiteral(f"{path}:{line_no + 1}: char literal not closed")
            if ch == "'":
                state = _CODE
            i += 1
            continue

        if state == _TEXT_BLOCK:
            if ch == "\\":
                i += 2
                continue
            if ch == '"' and text[i : i + 3] == '"""':
                state = _CODE
                i += 3
                continue
            if ch == "\n":
                end_line()
            i += 1
            continue

        # state == _CODE
        if ch in _IDENT_PART and (token or ch in _IDENT_START):
            token += ch
            i += 1
            continue
        close_token()

        if ch == "/" and nxt == "/":
            state = _LINE_COMMENT
            i += 2
            continue
        if ch == "/" and nxt == "*":
            state = _BLOCK_COMMENT
            i += 2
            continue
        if ch == '"':
            if text[i : i + 3] == '"""':
                state = _TEXT_BLOCK
                i += 3
            else:
                state = _STRING
                i += 1
            prev_sig_char = '"'
            after_paren = False
            continue
        if ch == "'":
            state = _CHAR
            prev_sig_char = "'"
            after_paren = False
            i += 1
            continue

        if ch == "\n":
            end_line()
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            continue

        if ch == "{":
            ctx = _classify_brace(
                stack,
                pending_type_kw,
                pending_type_name,
                prev_sig_char,
                after_paren,
                stmt_has_assign,
                stmt_has_new,
                ident_before_paren,
                line_no,
            )
            if ctx.kind == TYPE_BODY:
                ctx.is_public = pending_type_public
            # any pending header is either consumed by this brace or stale
            pending_type_kw = ""
            pending_type_name = ""
            pending_type_public = False
            stack.append(ctx)
            contexts.append(ctx)
            end_statement()
            prev_sig_char = "{"
            i += 1
            continue
        if ch == "}":
            if not stack:
                raise UnbalancedBraces(f"{path}:{line_no + 1}: unmatched '}}'")
            stack.pop().close_line = line_no
            end_statement()
            prev_sig_char = "}"
            i += 1
            continue
        if ch == ";":
            end_statement()
            # a type header never contains ';', so any pending header is stale
            pending_type_kw = ""
            pending_type_name = ""
            pending_type_public = False
            prev_sig_char = ";"
            i += 1
            continue
        if ch == ")":
            after_paren = True
            prev_sig_char = ")"
            i += 1
            continue
        if ch == "(":
            ident_before_paren = prev_token
            after_paren = False
            prev_sig_char = "("
            i += 1
            continue
        if ch == "=":
            # '==' also marks the statement; conservative is fine here
            stmt_has_assign = True
            after_paren = False
            prev_sig_char = "="
            i += 1
            continue

        # remaining punctuation; '<' '>' ',' may appear in a method header
        # tail (generics, throws lists), everything else ends it
        if ch not in "<>,@":
            after_paren = False
        prev_sig_char = ch
        i += 1

    close_token()
    if state in (_STRING, _CHAR, _TEXT_BLOCK):
        raise UnterminatedLiteral(f"{path}: literal still open at end of file")
    if state == _BLOCK_COMMENT:
        raise UnterminatedLiteral(f"{path}: block comment still open at end of file")
    if stack:
        raise UnbalancedBraces(f"{path}: {len(stack)} unclosed '{{'")

    # a final line with no trailing newline never saw end_line()
    if len(result.line_end_in_code) < len(result.lines):
        result.line_end_in_code.append(True)
        result.context_at_line_end.append(None)

    result.contexts = contexts
    _find_package_and_imports(result)
    return result


def _classify_brace(
    stack: list[BraceContext],
    pending_type_kw: str,
    pending_type_name: str,
    prev_sig_char: str,
    after_paren: bool,
    stmt_has_assign: bool,
    stmt_has_new: bool,
    ident_before_paren: str,
    line_no: int,
) -> BraceContext:
    parent = stack[-1] if stack else None
    depth = len(stack)
    if pending_type_kw and pending_type_name and not stmt_has_new:
        return BraceContext(
            kind=TYPE_BODY,
            open_line=line_no,
            depth=depth,
            type_keyword=pending_type_kw,
            name=pending_type_name,
            parent=parent,
            top_level=parent is None,
        )
    # Array initializers and annotation values open after '=', '(', ',' or '['.
    if prev_sig_char in "=,([{":
        pass
    elif (
        after_paren
        and parent is not None
        and parent.kind == TYPE_BODY
        and not stmt_has_assign
        and not stmt_has_new
    ):
        return BraceContext(
            kind=METHOD_BODY,
            open_line=line_no,
            depth=depth,
            name=ident_before_paren,
            is_constructor=ident_before_paren == parent.name,
            parent=parent,
        )
    return BraceContext(kind=OTHER_BLOCK, open_line=line_no, depth=depth, parent=parent)


def _find_package_and_imports(result: FileScan) -> None:
    """Locate package/import lines textually; they are line-oriented in practice."""
    for idx, line in enumerate(result.lines):
        stripped = line.strip()
        if stripped.startswith("package ") and stripped.endswith(";"):
            if result.package_line is None:
                result.package_line = idx
        elif stripped.startswith("import ") and stripped.endswith(";"):
            result.last_import_line = idx


def count_top_level_public_classes(text: str) -> int:
    """Number of `public class X` declarations at brace depth zero."""
    return len(scan_file(text).public_class_names())


def top_level_public_class(text: str) -> str | None:
    """Name of the single top-level public class, or None if not exactly one."""
    names = scan_file(text).public_class_names()
    if len(names) == 1:
        return names[0]
    return None
