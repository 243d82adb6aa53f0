"""A small XPath-like query language over MathML documents.

The grammar covers the child (``/``) and descendant (``//``) axes, element
name tests, the ``*`` wildcard, attribute-equality predicates
(``[@key='value']``), and unions (``|``).  Evaluation starts at a virtual
document node above the math element, so ``math`` selects the root and
``//*`` selects every node including the root.

A named catalog of frequently used queries ships with the package as a TSV
resource and is exposed through :class:`PathLibrary`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Union

from .core import MathDoc, MathNode
from .errors import PathSyntaxError, UnknownName

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9._\-]*")
_PREDICATE_RE = re.compile(r"\[@([A-Za-z_][A-Za-z0-9._\-:]*)='([^']*)'\]")


@dataclass(frozen=True)
class Step:
    """One location step: an axis, a name test, and attribute predicates."""

    axis: str  # "child" or "descendant"
    test: str  # element name or "*"
    predicates: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.axis not in ("child", "descendant"):
            raise ValueError(f"unknown axis {self.axis!r}")
        object.__setattr__(self, "predicates", tuple(self.predicates))


@dataclass(frozen=True)
class PathExpr:
    """A parsed path: a non-empty chain of steps."""

    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a path needs at least one step")


@dataclass(frozen=True)
class PathUnion:
    """Alternatives joined by ``|``; matches the union of their results."""

    alternatives: tuple[PathExpr, ...]

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        if not self.alternatives:
            raise ValueError("a union needs at least one alternative")


Query = Union[PathExpr, PathUnion]


def _parse_step(text: str, pos: int, axis: str) -> tuple[int, Step]:
    if pos < len(text) and text[pos] == "*":
        test = "*"
        pos += 1
    else:
        m = _NAME_RE.match(text, pos)
        if not m:
            raise PathSyntaxError("expected an element name or '*'", pos)
        test = m.group()
        pos = m.end()
    predicates = []
    while pos < len(text) and text[pos] == "[":
        m = _PREDICATE_RE.match(text, pos)
        if not m:
            raise PathSyntaxError("malformed predicate (expected [@key='value'])", pos)
        predicates.append((m.group(1), m.group(2)))
        pos = m.end()
    return pos, Step(axis, test, tuple(predicates))


def parse_path(text: str) -> PathExpr:
    """Parse a single path expression (no union) into a :class:`PathExpr`."""
    s = text.strip()
    if not s:
        raise PathSyntaxError("empty path expression", 0)
    pos = 0
    if s.startswith("//"):
        axis, pos = "descendant", 2
    elif s.startswith("/"):
        raise PathSyntaxError("paths are relative; a single leading '/' is not allowed", 0)
    else:
        axis = "child"
    steps = []
    while True:
        pos, step = _parse_step(s, pos, axis)
        steps.append(step)
        if pos >= len(s):
            break
        if s.startswith("//", pos):
            axis, pos = "descendant", pos + 2
        elif s[pos] == "/":
            axis, pos = "child", pos + 1
        else:
            raise PathSyntaxError(f"unexpected character {s[pos]!r}", pos)
        if pos >= len(s):
            raise PathSyntaxError("path ends with a separator", pos)
    return PathExpr(tuple(steps))


def _split_union(text: str) -> list[str]:
    parts, start, quote = [], 0, None
    for i, c in enumerate(text):
        if quote:
            if c == quote:
                quote = None
        elif c == "'":
            quote = c
        elif c == "|":
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return parts


def parse_selector(text: str) -> Query:
    """Parse a selector that may contain ``|``-joined alternatives."""
    parts = _split_union(text)
    if len(parts) == 1:
        return parse_path(parts[0])
    return PathUnion(tuple(parse_path(p) for p in parts))


def render(query: Query) -> str:
    """Textual form of a query; ``parse_selector(render(q)) == q``."""
    if isinstance(query, PathUnion):
        return " | ".join(render(alt) for alt in query.alternatives)
    parts = []
    for i, step in enumerate(query.steps):
        if step.axis == "descendant":
            parts.append("//")
        elif i > 0:
            parts.append("/")
        parts.append(step.test)
        for key, value in step.predicates:
            parts.append(f"[@{key}='{value}']")
    return "".join(parts)


def _matches(node: MathNode, step: Step) -> bool:
    if step.test != "*" and node.name != step.test:
        return False
    return all(node.attr(key) == value for key, value in step.predicates)


def select(doc: MathDoc, query: Query) -> list[int]:
    """Handles of all nodes matching the query, in document order."""
    if isinstance(query, PathUnion):
        merged: set[int] = set()
        for alt in query.alternatives:
            merged.update(select(doc, alt))
        return sorted(merged)
    frontier: set[Optional[int]] = {None}  # virtual document node
    for step in query.steps:
        matched: set[int] = set()
        for context in frontier:
            if step.axis == "child":
                candidates = doc.children_of(context)
            else:
                candidates = doc.descendants_of(context)
            for handle in candidates:
                if _matches(doc.node(handle), step):
                    matched.add(handle)
        frontier = set(matched)
    return sorted(frontier)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# named query catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LibraryEntry:
    name: str
    text: str
    description: str
    query: Query


class PathLibrary:
    """An ordered, named collection of parsed queries."""

    def __init__(self, entries: list[LibraryEntry]):
        self._entries: dict[str, LibraryEntry] = {}
        for entry in entries:
            if entry.name in self._entries:
                raise ValueError(f"duplicate library entry {entry.name!r}")
            self._entries[entry.name] = entry

    def names(self) -> list[str]:
        return list(self._entries)

    def entry(self, name: str) -> LibraryEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownName(f"no library entry named {name!r}") from None

    def get(self, name: str) -> Query:
        return self.entry(name).query

    def __len__(self):
        return len(self._entries)

    def __contains__(self, name):
        return name in self._entries

    @classmethod
    def from_tsv(cls, text: str) -> "PathLibrary":
        """Build a library from ``name<TAB>selector<TAB>description`` lines.
        Blank lines and lines starting with '#' are skipped."""
        entries = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: expected 3 tab-separated fields")
            name, selector, description = (f.strip() for f in fields)
            entries.append(LibraryEntry(name, selector, description, parse_selector(selector)))
        return cls(entries)


_default_library: Optional[PathLibrary] = None


def default_library() -> PathLibrary:
    """The catalog shipped with the package (loaded once, then cached)."""
    global _default_library
    if _default_library is None:
        text = resources.files(__package__).joinpath("library.tsv").read_text("utf-8")
        _default_library = PathLibrary.from_tsv(text)
    return _default_library


def library_get(name: str) -> Query:
    """Look up a query in the default catalog by name."""
    return default_library().get(name)
