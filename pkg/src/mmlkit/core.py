"""Parse, represent, serialize, split, and clean parallel-markup MathML.

The document model is deliberately small: a MathML formula is a tree of
:class:`MathNode` elements (local names only, ordered attributes, normalized
text) wrapped in a :class:`MathDoc` that indexes branches, annotations, and
id/xref cross-references.  Everything is immutable; operations that "modify"
a document return a new one, so documents can be shared freely across threads.

Parsing is fault tolerant on demand: lenient mode runs a fixed, reportable
repair pipeline over the raw text (namespace injection, named-entity
replacement, namespace-prefix dropping) before handing it to the XML parser,
and records every repair it applied.
"""

from __future__ import annotations

import re
import xml.parsers.expat
from dataclasses import dataclass
from html.entities import html5 as _HTML5_ENTITIES
from typing import Iterable, Iterator, Mapping, Optional

from .errors import DuplicateId, MalformedInput, MissingBranch, WouldBeEmpty

MATHML_NS = "http://www.w3.org/1998/Math/MathML"
XML_NS = "http://www.w3.org/XML/1998/namespace"
TEX_ENCODING = "application/x-tex"
CONTENT_ENCODING = "MathML-Content"

#: Repair kinds recorded by the lenient pipeline, in pipeline order.
REPAIR_NAMESPACE_INSERTED = "namespace-inserted"
REPAIR_ENTITY_REPLACED = "entity-replaced"
REPAIR_ATTRIBUTE_NAMESPACE_DROPPED = "attribute-namespace-dropped"

#: XML's predefined entities; these are left for the XML parser itself.
_PREDEFINED_ENTITIES = {"amp", "lt", "gt", "quot", "apos"}

#: Content-markup element names, used to classify bare (semantics-less)
#: documents into a presentation or content branch.
CONTENT_ELEMENTS = frozenset("""
    abs and annotation-xml apply approx arccos arccosh arccot arccoth arccsc
    arccsch arcsec arcsech arcsin arcsinh arctan arctanh arg bind bvar card
    cartesianproduct cbytes ceiling cerror ci cn codomain complexes compose
    condition conjugate cos cosh cot coth cs csc csch csymbol curl declare
    degree determinant diff divergence divide domain domainofapplication
    emptyset eq equivalent eulergamma exists exp exponentiale factorial
    factorof false floor forall gcd geq grad gt ident image imaginary
    imaginaryi implies in infinity int integers intersect interval inverse
    lambda laplacian lcm leq limit list ln log logbase lowlimit lt matrix
    matrixrow max mean median min minus mode moment momentabout naturalnumbers
    neq not notanumber notin notprsubset notsubset or otherwise outerproduct
    partialdiff pi piece piecewise plus power primes product prsubset
    quotient rationals real reals rem root scalarproduct sdev sec sech
    selector semantics sep set setdiff share sin sinh subset sum tan tanh
    tendsto times transpose true union uplimit variance vector vectorproduct
    xor
""".split())

_NAME_CHARS = r"[^\s=/<>'\"]+"
_ENTITY_RE = re.compile(r"&([A-Za-z][A-Za-z0-9]*);")
_ATTR_RE = re.compile(
    rf"(?P<key>{_NAME_CHARS})\s*=\s*(?P<quote>[\"'])(?P<value>.*?)(?P=quote)", re.S
)


# ---------------------------------------------------------------------------
# document model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MathNode:
    """One XML element: local name, ordered attributes, text, children.

    Mixed content is normalized at construction time upstream: ``text`` holds
    the concatenation of the element's character-data segments with
    surrounding whitespace trimmed, or ``None`` when nothing remains.
    """

    name: str
    attributes: tuple[tuple[str, str], ...] = ()
    text: Optional[str] = None
    children: tuple["MathNode", ...] = ()

    def __post_init__(self):
        attrs = self.attributes
        if isinstance(attrs, Mapping):
            attrs = tuple(attrs.items())
        else:
            attrs = tuple((k, v) for k, v in attrs)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "children", tuple(self.children))
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"invalid element name {self.name!r}")
        keys = [k for k, _ in attrs]
        if len(keys) != len(set(keys)):
            raise ValueError(f"duplicate attribute key on element {self.name!r}")
        for k, _ in attrs:
            if not k or any(c.isspace() for c in k):
                raise ValueError(f"invalid attribute key {k!r}")
        object.__setattr__(self, "_attr_map", dict(attrs))

    def attr(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """Value of the attribute ``key``, or ``default`` when absent."""
        return self._attr_map.get(key, default)  # type: ignore[attr-defined]

    def has_attr(self, key: str) -> bool:
        return key in self._attr_map  # type: ignore[attr-defined]

    def __repr__(self):
        bits = [self.name]
        if self.text is not None:
            bits.append(f"text={self.text!r}")
        if self.children:
            bits.append(f"children={len(self.children)}")
        return f"<MathNode {' '.join(bits)}>"


def iter_subtree(node: MathNode) -> Iterator[MathNode]:
    """All nodes of ``node``'s subtree in document (preorder) order."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(current.children))


@dataclass(frozen=True)
class Repair:
    """One leniency rule application: what fired and where (byte offset)."""

    kind: str
    location: int


@dataclass(frozen=True)
class ParseReport:
    """Outcome metadata for one parse: applied repairs and dangling xrefs.

    ``repairs`` is empty exactly when the input needed no rewriting, i.e.
    it would also have parsed in strict mode.
    """

    repairs: tuple[Repair, ...] = ()
    dangling_xrefs: tuple[tuple[int, str], ...] = ()


class MathDoc:
    """A parsed formula: the math element plus derived indexes.

    Node handles are stable indices into the document's preorder enumeration
    (the math element itself is handle 0).  Instances are immutable; every
    mutating operation in this module returns a new document.
    """

    def __init__(self, root: MathNode):
        if root.name != "math":
            raise MalformedInput("document root must be a math element")
        self._root = root

        nodes: list[MathNode] = []
        parents: list[Optional[int]] = []
        child_handles: list[list[int]] = []
        by_identity: dict[int, int] = {}

        def visit(node: MathNode, parent: Optional[int]) -> int:
            handle = len(nodes)
            nodes.append(node)
            parents.append(parent)
            child_handles.append([])
            by_identity[id(node)] = handle
            if parent is not None:
                child_handles[parent].append(handle)
            for child in node.children:
                visit(child, handle)
            return handle

        visit(root, None)
        self._nodes = tuple(nodes)
        self._parents = tuple(parents)
        self._children = tuple(tuple(c) for c in child_handles)
        self._by_identity = by_identity

        sizes = [1] * len(nodes)
        for handle in range(len(nodes) - 1, -1, -1):
            for child in self._children[handle]:
                sizes[handle] += sizes[child]
        self._sizes = tuple(sizes)

        ids: dict[str, int] = {}
        for handle, node in enumerate(self._nodes):
            id_value = node.attr("id")
            if id_value is not None:
                if id_value in ids:
                    raise DuplicateId(id_value)
                ids[id_value] = handle
        self._ids = ids

        xref_map: dict[str, int] = {}
        dangling: list[tuple[int, str]] = []
        for handle, node in enumerate(self._nodes):
            target = node.attr("xref")
            if target is None:
                continue
            if target in ids:
                own = node.attr("id")
                if own is not None:
                    xref_map[own] = ids[target]
                    # reverse direction, unless the partner points elsewhere
                    xref_map.setdefault(target, handle)
            else:
                dangling.append((handle, target))
        self._xref_map = xref_map
        self._dangling = tuple(dangling)

        self._annotations = tuple(
            (node.attr("encoding", ""), node.text or "")
            for node in self._nodes
            if node.name == "annotation"
        )

        pres, content = self._detect_branches(root)
        self._presentation_nodes = pres
        self._content_nodes = content

    @staticmethod
    def _detect_branches(root: MathNode):
        semantics = next((c for c in root.children if c.name == "semantics"), None)
        if semantics is None:
            children = root.children
            if children and children[0].name in CONTENT_ELEMENTS:
                return (), children
            return children, ()
        pres = tuple(
            c for c in semantics.children
            if c.name not in ("annotation", "annotation-xml")
        )[:1]
        content: tuple[MathNode, ...] = ()
        for child in semantics.children:
            if child.name == "annotation-xml" and child.attr("encoding") == CONTENT_ENCODING:
                content = child.children
                break
        return pres, content

    # -- structure accessors ------------------------------------------------

    @property
    def root(self) -> MathNode:
        return self._root

    @property
    def nodes(self) -> tuple[MathNode, ...]:
        """All nodes in preorder; index == handle."""
        return self._nodes

    def node(self, handle: int) -> MathNode:
        return self._nodes[handle]

    def handle(self, node: MathNode) -> int:
        """Handle of a node object belonging to this document."""
        try:
            return self._by_identity[id(node)]
        except KeyError:
            raise ValueError("node does not belong to this document") from None

    def parent(self, handle: int) -> Optional[int]:
        return self._parents[handle]

    def children_of(self, handle: Optional[int]) -> tuple[int, ...]:
        """Child handles; ``None`` addresses the virtual document node."""
        if handle is None:
            return (0,)
        return self._children[handle]

    def descendants_of(self, handle: Optional[int]) -> range:
        """Proper-descendant handles (preorder is contiguous per subtree)."""
        if handle is None:
            return range(0, len(self._nodes))
        return range(handle + 1, handle + self._sizes[handle])

    # -- branch / annotation accessors ---------------------------------------

    @property
    def presentation_nodes(self) -> tuple[MathNode, ...]:
        """Top-level nodes of the presentation branch (may be empty)."""
        return self._presentation_nodes

    @property
    def content_nodes(self) -> tuple[MathNode, ...]:
        """Top-level nodes of the content branch (may be empty)."""
        return self._content_nodes

    @property
    def presentation_root(self) -> Optional[int]:
        if not self._presentation_nodes:
            return None
        return self.handle(self._presentation_nodes[0])

    @property
    def content_root(self) -> Optional[int]:
        if not self._content_nodes:
            return None
        return self.handle(self._content_nodes[0])

    @property
    def annotations(self) -> tuple[tuple[str, str], ...]:
        """(encoding, payload) for every annotation element, document order."""
        return self._annotations

    # -- cross references ------------------------------------------------------

    @property
    def xref_map(self) -> dict[str, int]:
        """id value -> handle of its cross-reference partner (both directions)."""
        return dict(self._xref_map)

    @property
    def dangling_xrefs(self) -> tuple[tuple[int, str], ...]:
        """(handle, target id) for xref attributes that resolve to nothing."""
        return self._dangling

    def xref_pairs(self) -> set[tuple[str, str]]:
        """Unordered id pairs linked by cross-references, as sorted tuples."""
        pairs = set()
        for id_value, partner in self._xref_map.items():
            partner_id = self._nodes[partner].attr("id")
            if partner_id is not None:
                pairs.add(tuple(sorted((id_value, partner_id))))
        return pairs

    def __eq__(self, other):
        if not isinstance(other, MathDoc):
            return NotImplemented
        return self._root == other._root

    def __repr__(self):
        return f"<MathDoc nodes={len(self._nodes)}>"


# ---------------------------------------------------------------------------
# lenient repair pipeline (runs on the raw text, before XML parsing)
# ---------------------------------------------------------------------------

def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _scan_markup(text: str) -> list[tuple[str, int, int]]:
    """Spans of markup constructs: (kind, start, end) with kind in
    start/end/comment/cdata/pi/decl.  Unterminated constructs run to EOF;
    the XML parser rejects those later."""
    spans = []
    i, n = 0, len(text)
    while True:
        lt = text.find("<", i)
        if lt < 0:
            break
        if text.startswith("<!--", lt):
            close = text.find("-->", lt + 4)
            end = n if close < 0 else close + 3
            spans.append(("comment", lt, end))
        elif text.startswith("<![CDATA[", lt):
            close = text.find("]]>", lt + 9)
            end = n if close < 0 else close + 3
            spans.append(("cdata", lt, end))
        elif text.startswith("<!", lt):
            close = text.find(">", lt)
            end = n if close < 0 else close + 1
            spans.append(("decl", lt, end))
        elif text.startswith("<?", lt):
            close = text.find("?>", lt)
            end = n if close < 0 else close + 2
            spans.append(("pi", lt, end))
        elif text.startswith("</", lt):
            close = text.find(">", lt)
            end = n if close < 0 else close + 1
            spans.append(("end", lt, end))
        else:
            j, quote = lt + 1, None
            while j < n:
                c = text[j]
                if quote:
                    if c == quote:
                        quote = None
                elif c in "\"'":
                    quote = c
                elif c == ">":
                    break
                j += 1
            spans.append(("start", lt, min(j + 1, n)))
        i = spans[-1][2]
    return spans


def _tag_name(text: str, span: tuple[str, int, int]) -> tuple[str, int]:
    """Element name of a start/end tag span and the index where it begins."""
    kind, start, _ = span
    pos = start + (2 if kind == "end" else 1)
    m = re.compile(_NAME_CHARS).match(text, pos)
    return (m.group() if m else ""), pos


def _iter_attrs(text: str, span: tuple[str, int, int], name_end: int):
    """Attribute matches inside a start-tag span."""
    _, _, end = span
    return _ATTR_RE.finditer(text, name_end, end)


def _repair(text: str) -> tuple[str, list[Repair]]:
    """Apply the three-rule leniency pipeline; return rewritten text and
    the repairs, each located by byte offset into the original input."""
    spans = _scan_markup(text)
    opaque = [(s, e) for kind, s, e in spans if kind in ("comment", "cdata", "pi", "decl")]
    start_spans = [sp for sp in spans if sp[0] == "start"]
    end_spans = [sp for sp in spans if sp[0] == "end"]

    edits: list[tuple[int, int, str]] = []
    rule1: list[Repair] = []
    rule2: list[Repair] = []
    rule3: list[Repair] = []

    # rule 1: inject the MathML namespace when the math element declares none
    for span in start_spans:
        name, name_pos = _tag_name(text, span)
        if name.rsplit(":", 1)[-1] != "math":
            continue
        has_decl = any(
            m.group("key") == "xmlns" or m.group("key").startswith("xmlns:")
            for m in _iter_attrs(text, span, name_pos + len(name))
        )
        if not has_decl:
            insert_at = name_pos + len(name)
            edits.append((insert_at, insert_at, f' xmlns="{MATHML_NS}"'))
            rule1.append(Repair(REPAIR_NAMESPACE_INSERTED, _byte_offset(text, span[1])))
        break

    # rule 2: replace HTML5/MathML named entities with character references
    for m in _ENTITY_RE.finditer(text):
        if any(s <= m.start() < e for s, e in opaque):
            continue
        name = m.group(1)
        if name in _PREDEFINED_ENTITIES:
            continue
        expansion = _HTML5_ENTITIES.get(name + ";")
        if expansion is None:
            continue
        replacement = "".join(f"&#{ord(c)};" for c in expansion)
        edits.append((m.start(), m.end(), replacement))
        rule2.append(Repair(REPAIR_ENTITY_REPLACED, _byte_offset(text, m.start())))

    # rule 3: drop namespace prefixes bound (or assumed bound) to MathML
    declared: dict[str, set[str]] = {}
    for span in start_spans:
        name, name_pos = _tag_name(text, span)
        for m in _iter_attrs(text, span, name_pos + len(name)):
            key = m.group("key")
            if key.startswith("xmlns:"):
                declared.setdefault(key[6:], set()).add(m.group("value"))

    def mathml_bound(prefix: str) -> bool:
        if prefix == "xml" or prefix == "xmlns":
            return False
        uris = declared.get(prefix)
        if uris is None:
            return True  # undeclared: assume an elided MathML binding
        return MATHML_NS in uris

    for span in start_spans + end_spans:
        name, name_pos = _tag_name(text, span)
        if ":" in name and mathml_bound(name.split(":", 1)[0]):
            local = name.split(":", 1)[1]
            edits.append((name_pos, name_pos + len(name), local))
            if span[0] == "start":
                rule3.append(
                    Repair(REPAIR_ATTRIBUTE_NAMESPACE_DROPPED, _byte_offset(text, span[1]))
                )
        if span[0] != "start":
            continue
        for m in _iter_attrs(text, span, name_pos + len(name)):
            key = m.group("key")
            if key.startswith("xmlns:"):
                if m.group("value") == MATHML_NS:
                    cut = m.start()
                    while cut > 0 and text[cut - 1] in " \t\r\n":
                        cut -= 1
                    edits.append((cut, m.end(), ""))
                    rule3.append(
                        Repair(REPAIR_ATTRIBUTE_NAMESPACE_DROPPED, _byte_offset(text, m.start()))
                    )
            elif ":" in key and mathml_bound(key.split(":", 1)[0]):
                local = key.split(":", 1)[1]
                edits.append((m.start(), m.start() + len(key), local))
                rule3.append(
                    Repair(REPAIR_ATTRIBUTE_NAMESPACE_DROPPED, _byte_offset(text, m.start()))
                )

    repaired = text
    for start, end, replacement in sorted(edits, key=lambda e: e[0], reverse=True):
        repaired = repaired[:start] + replacement + repaired[end:]
    rule3.sort(key=lambda r: r.location)
    return repaired, rule1 + rule2 + rule3


# ---------------------------------------------------------------------------
# XML parsing
# ---------------------------------------------------------------------------

class _Builder:
    def __init__(self):
        self._stack: list[list] = []
        self.root: Optional[MathNode] = None

    def start(self, name, attrs):
        pairs = tuple((attrs[i], attrs[i + 1]) for i in range(0, len(attrs), 2))
        self._stack.append([name, pairs, [], []])

    def end(self, _name):
        name, pairs, text_parts, children = self._stack.pop()
        text = "".join(text_parts).strip(" \t\r\n")
        node = MathNode(name, pairs, text or None, tuple(children))
        if self._stack:
            self._stack[-1][3].append(node)
        else:
            self.root = node

    def chars(self, data):
        if self._stack:
            self._stack[-1][2].append(data)


def _expat_parse(text: str) -> MathNode:
    parser = xml.parsers.expat.ParserCreate()  # namespace processing off
    parser.ordered_attributes = True
    parser.buffer_text = True
    builder = _Builder()
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise MalformedInput(f"not well-formed XML: {exc}") from None
    except ValueError as exc:
        raise MalformedInput(f"unparseable input: {exc}") from None
    if builder.root is None:
        raise MalformedInput("input contains no element")
    return builder.root


def _validate_strict(root: MathNode) -> None:
    """Reject anything the lenient pipeline would have rewritten."""
    if root.attr("xmlns") is None:
        raise MalformedInput("math element lacks a namespace declaration (strict mode)")

    def walk(node: MathNode, env: dict[str, str]) -> None:
        scope = env
        for key, value in node.attributes:
            if key.startswith("xmlns:"):
                prefix = key[6:]
                if value == MATHML_NS:
                    raise MalformedInput(
                        f"prefix {prefix!r} bound to the MathML namespace (strict mode)"
                    )
                if scope is env:
                    scope = dict(env)
                scope[prefix] = value
        if ":" in node.name:
            prefix = node.name.split(":", 1)[0]
            if prefix != "xml" and prefix not in scope:
                raise MalformedInput(f"undeclared namespace prefix {prefix!r} (strict mode)")
        for key, _ in node.attributes:
            if ":" in key and not key.startswith(("xmlns:", "xml:")):
                prefix = key.split(":", 1)[0]
                if prefix not in scope:
                    raise MalformedInput(
                        f"undeclared namespace prefix {prefix!r} (strict mode)"
                    )
        for child in node.children:
            walk(child, scope)

    walk(root, {})


def _strip_namespace_attrs(node: MathNode, is_root: bool) -> MathNode:
    """Drop MathML namespace declarations (the namespace is implicit in the
    model); keep foreign declarations verbatim."""
    attrs = []
    for key, value in node.attributes:
        if key == "xmlns":
            if value == MATHML_NS:
                continue
            if is_root:
                raise MalformedInput(f"math element declares a foreign namespace {value!r}")
        elif key.startswith("xmlns:") and value == MATHML_NS:
            continue
        attrs.append((key, value))
    children = tuple(_strip_namespace_attrs(c, False) for c in node.children)
    return MathNode(node.name, tuple(attrs), node.text, children)


def parse(text: str, mode: str = "lenient") -> tuple[MathDoc, ParseReport]:
    """Parse UTF-8 MathML text into a (MathDoc, ParseReport) pair.

    ``mode`` is ``"strict"`` or ``"lenient"``.  Lenient mode first runs the
    repair pipeline: (1) inject the MathML namespace if the math element
    declares none, (2) replace HTML5/MathML named entities with their code
    points, (3) drop namespace prefixes on MathML-namespace elements and
    attributes.  Strict mode rejects any input those rules would rewrite.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown parse mode {mode!r}")
    if not text or text.isspace():
        raise MalformedInput("empty input")

    repairs: list[Repair] = []
    work = text
    if mode == "lenient":
        work, repairs = _repair(text)

    raw_root = _expat_parse(work)
    if raw_root.name != "math":
        raise MalformedInput(
            f"input does not contain a math root element (found {raw_root.name!r})"
        )
    if mode == "strict":
        _validate_strict(raw_root)
    root = _strip_namespace_attrs(raw_root, True)
    doc = MathDoc(root)
    report = ParseReport(repairs=tuple(repairs), dangling_xrefs=doc.dangling_xrefs)
    return doc, report


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return _escape_text(value).replace('"', "&quot;")


def _emit(node: MathNode, out: list[str], depth: int, pretty: bool,
          extra_attrs: tuple[tuple[str, str], ...] = ()) -> None:
    indent = "  " * depth if pretty else ""
    attrs = "".join(
        f' {key}="{_escape_attr(value)}"' for key, value in extra_attrs + node.attributes
    )
    if not node.children and node.text is None:
        out.append(f"{indent}<{node.name}{attrs}/>")
        return
    if not node.children:
        out.append(f"{indent}<{node.name}{attrs}>{_escape_text(node.text)}</{node.name}>")
        return
    out.append(f"{indent}<{node.name}{attrs}>")
    if node.text is not None:
        out.append(("  " * (depth + 1) if pretty else "") + _escape_text(node.text))
    for child in node.children:
        _emit(child, out, depth + 1, pretty)
    out.append(f"{indent}</{node.name}>")


def serialize_node(node: MathNode, pretty: bool = False) -> str:
    """Serialize a node subtree as an XML fragment (no namespace injected)."""
    out: list[str] = []
    _emit(node, out, 0, pretty)
    return "\n".join(out) if pretty else "".join(out)


def serialize(doc: MathDoc, pretty: bool = False) -> str:
    """Serialize a document as well-formed XML with the MathML namespace
    declared on the math element.  Byte-deterministic for a given input;
    ``parse(serialize(doc), "strict")`` reproduces an equal tree."""
    out: list[str] = []
    _emit(doc.root, out, 0, pretty, extra_attrs=(("xmlns", MATHML_NS),))
    return "\n".join(out) if pretty else "".join(out)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def split_presentation(doc: MathDoc) -> MathDoc:
    """A standalone document holding only the presentation branch.

    Cross-reference attributes are kept verbatim; references into the
    discarded branch show up in the result's dangling list.
    """
    if not doc.presentation_nodes:
        raise MissingBranch("document has no presentation branch")
    return MathDoc(MathNode("math", doc.root.attributes, None, doc.presentation_nodes))


def split_content(doc: MathDoc) -> MathDoc:
    """A standalone document holding only the content branch."""
    if not doc.content_nodes:
        raise MissingBranch("document has no content branch")
    return MathDoc(MathNode("math", doc.root.attributes, None, doc.content_nodes))


def get_tex(doc: MathDoc) -> Optional[str]:
    """Payload of the first application/x-tex annotation, if any."""
    for encoding, payload in doc.annotations:
        if encoding == TEX_ENCODING:
            return payload
    return None


def extract_identifiers(
    doc: MathDoc, branch: str = "both"
) -> list[tuple[str, str, int]]:
    """Identifier elements (mi/ci) in document order as (name, text, handle).

    ``branch`` selects the presentation or content branch; ``"both"`` walks
    the entire document, so the result covers every identifier anywhere.
    """
    if branch == "presentation":
        roots = doc.presentation_nodes
        if not roots:
            raise MissingBranch("document has no presentation branch")
    elif branch == "content":
        roots = doc.content_nodes
        if not roots:
            raise MissingBranch("document has no content branch")
    elif branch == "both":
        roots = (doc.root,)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    found = []
    for root in roots:
        for node in iter_subtree(root):
            if node.name in ("mi", "ci"):
                found.append((node.name, node.text or "", doc.handle(node)))
    return found


CLEANABLE_FEATURES = frozenset(
    {"cross_references", "content_branch", "presentation_branch", "annotations"}
)


def clean(doc: MathDoc, features: Iterable[str]) -> MathDoc:
    """Remove the named features and return a new document.

    ``cross_references`` deletes every id and xref attribute;
    ``content_branch`` deletes MathML-Content annotation-xml elements;
    ``presentation_branch`` deletes the presentation child of semantics;
    ``annotations`` deletes annotation elements.  When a single branch and no
    annotations remain under semantics, the wrapper is unwrapped.
    """
    feature_set = frozenset(features)
    if not feature_set:
        raise ValueError("features must be non-empty")
    unknown = feature_set - CLEANABLE_FEATURES
    if unknown:
        raise ValueError(f"unknown clean features: {sorted(unknown)}")

    drop_content = "content_branch" in feature_set
    drop_presentation = "presentation_branch" in feature_set
    drop_annotations = "annotations" in feature_set
    drop_xrefs = "cross_references" in feature_set

    def is_content_xml(node: MathNode) -> bool:
        return node.name == "annotation-xml" and node.attr("encoding") == CONTENT_ENCODING

    def rebuild(node: MathNode) -> MathNode:
        kept = []
        for child in node.children:
            if drop_annotations and child.name == "annotation":
                continue
            if drop_content and is_content_xml(child):
                continue
            kept.append(rebuild(child))
        attrs = node.attributes
        if drop_xrefs:
            attrs = tuple((k, v) for k, v in attrs if k not in ("id", "xref"))
        return MathNode(node.name, attrs, node.text, tuple(kept))

    def rebuild_semantics(node: MathNode) -> list[MathNode]:
        kept = []
        for child in node.children:
            if drop_annotations and child.name == "annotation":
                continue
            if drop_content and is_content_xml(child):
                continue
            if drop_presentation and child.name not in ("annotation", "annotation-xml"):
                continue
            kept.append(rebuild(child))
        if len(kept) == 1 and kept[0].name not in ("annotation", "annotation-xml"):
            return [kept[0]]  # lone presentation branch: unwrap semantics
        if len(kept) == 1 and is_content_xml(kept[0]):
            return list(kept[0].children)  # lone content branch: unwrap both wrappers
        attrs = node.attributes
        if drop_xrefs:
            attrs = tuple((k, v) for k, v in attrs if k not in ("id", "xref"))
        return [MathNode(node.name, attrs, node.text, tuple(kept))] if kept else []

    new_children: list[MathNode] = []
    for child in doc.root.children:
        if child.name == "semantics":
            new_children.extend(rebuild_semantics(child))
        elif drop_annotations and child.name == "annotation":
            continue
        elif drop_content and is_content_xml(child):
            continue
        else:
            new_children.append(rebuild(child))

    root_attrs = doc.root.attributes
    if drop_xrefs:
        root_attrs = tuple((k, v) for k, v in root_attrs if k not in ("id", "xref"))
    result = MathDoc(MathNode("math", root_attrs, doc.root.text, tuple(new_children)))
    if not result.presentation_nodes and not result.content_nodes:
        raise WouldBeEmpty("cleaning would leave no math content")
    return result


def resolve_xref(doc: MathDoc, id_value: str) -> Optional[int]:
    """Handle of the cross-reference partner of the node with the given id,
    following links in both directions; ``None`` for unknown or dangling ids."""
    return doc._xref_map.get(id_value)
