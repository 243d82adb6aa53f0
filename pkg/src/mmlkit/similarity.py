"""Similarity and distance measures over MathML documents.

Everything here reduces a document (or one of its branches) to either an
element-name histogram or a labeled ordered tree, then compares those:

* L1 histogram distance, absolute and relative,
* ordered tree edit distance (Zhang/Shasha) with configurable costs,
* earth mover's distance, solved exactly as a small transportation problem,
* cosine similarity of histogram vectors,
* aggregate document-collection distance over any of the histogram measures.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .core import MathDoc, MathNode, iter_subtree
from .errors import EmptyHistogram, MissingBranch

#: Wrapper elements that carry no mathematical content of their own.
STRUCTURAL_NAMES = frozenset({"math", "semantics", "annotation", "annotation-xml"})


# ---------------------------------------------------------------------------
# histograms
# ---------------------------------------------------------------------------

class Histogram:
    """An immutable element-name multiset.  Zero counts are dropped, so two
    histograms over different universes compare equal when their positive
    counts agree."""

    __slots__ = ("_counts", "_total")

    def __init__(self, counts: Optional[Mapping[str, int]] = None):
        cleaned: dict[str, int] = {}
        for key, value in (counts or {}).items():
            if not isinstance(key, str):
                raise TypeError(f"histogram keys must be strings, got {key!r}")
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"count for {key!r} must be an integer")
            if value < 0:
                raise ValueError(f"count for {key!r} is negative")
            if value > 0:
                cleaned[key] = value
        self._counts = cleaned
        self._total = sum(cleaned.values())

    @classmethod
    def from_elements(cls, names: Iterable[str]) -> "Histogram":
        return cls(Counter(names))

    @property
    def counts(self) -> Mapping[str, int]:
        return MappingProxyType(self._counts)

    @property
    def total(self) -> int:
        return self._total

    def __getitem__(self, key: str) -> int:
        return self._counts.get(key, 0)

    def __len__(self):
        return len(self._counts)

    def __iter__(self):
        return iter(self._counts)

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return self._counts == other._counts

    def __repr__(self):
        return f"Histogram({self._counts!r})"

    def to_text(self) -> str:
        """Deterministic text form: one ``name<TAB>count`` line per key,
        sorted by name."""
        return "".join(f"{k}\t{self._counts[k]}\n" for k in sorted(self._counts))


def _scope_roots(doc: MathDoc, scope: str) -> tuple[MathNode, ...]:
    if scope == "whole":
        return (doc.root,)
    if scope == "presentation":
        if not doc.presentation_nodes:
            raise MissingBranch("document has no presentation branch")
        return doc.presentation_nodes
    if scope == "content":
        if not doc.content_nodes:
            raise MissingBranch("document has no content branch")
        return doc.content_nodes
    raise ValueError(f"unknown scope {scope!r}")


def histogram(doc: MathDoc, scope: str = "whole", include_structural: bool = False) -> Histogram:
    """Element-name histogram of a document or one of its branches.

    Structural wrappers (math, semantics, annotation, annotation-xml) are
    excluded unless ``include_structural`` is set.
    """
    counter: Counter[str] = Counter()
    for root in _scope_roots(doc, scope):
        for node in iter_subtree(root):
            if include_structural or node.name not in STRUCTURAL_NAMES:
                counter[node.name] += 1
    return Histogram(counter)


def accumulate(histograms: Iterable[Histogram]) -> Histogram:
    """Key-wise sum of histograms (empty input gives the empty histogram)."""
    counter: Counter[str] = Counter()
    for hist in histograms:
        counter.update(hist.counts)
    return Histogram(counter)


def hist_distance_absolute(a: Histogram, b: Histogram) -> float:
    """L1 distance over the union of keys."""
    keys = set(a.counts) | set(b.counts)
    return float(sum(abs(a[k] - b[k]) for k in keys))


def hist_distance_relative(a: Histogram, b: Histogram) -> float:
    """Absolute L1 distance scaled by the two totals; 0 when both are empty.
    Bounded by [0, 1]."""
    denominator = a.total + b.total
    if denominator == 0:
        return 0.0
    return hist_distance_absolute(a, b) / denominator


def cosine_similarity(a: Histogram, b: Histogram) -> float:
    """Cosine of the angle between the two count vectors, clamped to [0, 1].

    Counts are integers, so the sums below are exact; proportional vectors
    (Cauchy-Schwarz equality) give exactly 1.0 and disjoint ones exactly 0.0.
    """
    if a.total == 0 or b.total == 0:
        raise EmptyHistogram("cosine similarity needs non-empty histograms")
    dot = sum(count * b[key] for key, count in a.counts.items())
    norm_sq_a = sum(c * c for c in a.counts.values())
    norm_sq_b = sum(c * c for c in b.counts.values())
    if dot == 0:
        return 0.0
    if dot * dot == norm_sq_a * norm_sq_b:
        return 1.0
    return min(1.0, max(0.0, dot / math.sqrt(norm_sq_a * norm_sq_b)))


# ---------------------------------------------------------------------------
# tree edit distance (Zhang/Shasha over ordered labeled trees)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostConfig:
    """Per-operation edit costs; all must be finite and non-negative."""

    insert: float = 1.0
    delete: float = 1.0
    rename: float = 1.0

    def __post_init__(self):
        for op in ("insert", "delete", "rename"):
            value = getattr(self, op)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise TypeError(f"{op} cost must be a number")
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{op} cost must be finite and non-negative")
            object.__setattr__(self, op, float(value))


def _node_label(node: MathNode, label_mode: str):
    if label_mode == "name-text" and not node.children:
        return (node.name, node.text)
    return node.name


class _FlatTree:
    """Postorder arrays for Zhang/Shasha: labels, leftmost-leaf indices,
    and keyroots, all 1-indexed."""

    def __init__(self, root: MathNode, label_mode: str):
        labels = [None]
        lml = [0]
        order: list[tuple[MathNode, int]] = []  # (node, postorder index)
        index_of: dict[int, int] = {}

        def walk(node: MathNode) -> int:
            first_child_index = None
            for child in node.children:
                child_index = walk(child)
                if first_child_index is None:
                    first_child_index = child_index
            labels.append(_node_label(node, label_mode))
            my_index = len(labels) - 1
            lml.append(lml[first_child_index] if first_child_index else my_index)
            index_of[id(node)] = my_index
            return my_index

        walk(root)
        self.n = len(labels) - 1
        self.labels = labels
        self.lml = lml
        last_with_lml: dict[int, int] = {}
        for i in range(1, self.n + 1):
            last_with_lml[lml[i]] = i
        self.keyroots = sorted(last_with_lml.values())


def _as_node(tree: Union[MathDoc, MathNode]) -> MathNode:
    return tree.root if isinstance(tree, MathDoc) else tree


def tree_edit_distance(
    a: Union[MathDoc, MathNode],
    b: Union[MathDoc, MathNode],
    costs: Optional[CostConfig] = None,
    label_mode: str = "name",
) -> float:
    """Minimum-cost ordered edit script turning tree ``a`` into tree ``b``.

    ``label_mode`` is ``"name"`` (labels are element names) or ``"name-text"``
    (leaf labels additionally carry the text content).  With unit costs this
    is a metric; rename cost 0 collapses relabelings.
    """
    if label_mode not in ("name", "name-text"):
        raise ValueError(f"unknown label mode {label_mode!r}")
    costs = costs or CostConfig()
    ta = _FlatTree(_as_node(a), label_mode)
    tb = _FlatTree(_as_node(b), label_mode)
    insert, delete, rename = costs.insert, costs.delete, costs.rename

    td = [[0.0] * (tb.n + 1) for _ in range(ta.n + 1)]
    for i in ta.keyroots:
        for j in tb.keyroots:
            li, lj = ta.lml[i], tb.lml[j]
            m, n = i - li + 2, j - lj + 2
            fd = [[0.0] * n for _ in range(m)]
            ioff, joff = li - 1, lj - 1
            for x in range(1, m):
                fd[x][0] = fd[x - 1][0] + delete
            for y in range(1, n):
                fd[0][y] = fd[0][y - 1] + insert
            for x in range(1, m):
                for y in range(1, n):
                    if ta.lml[x + ioff] == li and tb.lml[y + joff] == lj:
                        cost = 0.0 if ta.labels[x + ioff] == tb.labels[y + joff] else rename
                        fd[x][y] = min(
                            fd[x - 1][y] + delete,
                            fd[x][y - 1] + insert,
                            fd[x - 1][y - 1] + cost,
                        )
                        td[x + ioff][y + joff] = fd[x][y]
                    else:
                        p = ta.lml[x + ioff] - 1 - ioff
                        q = tb.lml[y + joff] - 1 - joff
                        fd[x][y] = min(
                            fd[x - 1][y] + delete,
                            fd[x][y - 1] + insert,
                            fd[p][q] + td[x + ioff][y + joff],
                        )
    return td[ta.n][tb.n]


# ---------------------------------------------------------------------------
# earth mover's distance (exact transportation problem)
# ---------------------------------------------------------------------------

class GroundDistance:
    """Ground metric between histogram keys.

    The default is the discrete metric (0 on the diagonal, 1 elsewhere);
    individual unordered pairs can be overridden with non-negative values.
    """

    def __init__(self, overrides: Optional[Mapping[tuple[str, str], float]] = None):
        normalized: dict[tuple[str, str], float] = {}
        for (x, y), value in (overrides or {}).items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise TypeError(f"ground distance for {(x, y)!r} must be a number")
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"ground distance for {(x, y)!r} must be finite and >= 0")
            if x == y:
                if value != 0:
                    raise ValueError(f"ground distance of {x!r} to itself must be 0")
                continue
            normalized[(x, y) if x <= y else (y, x)] = float(value)
        self._overrides = normalized

    def distance(self, x: str, y: str) -> float:
        if x == y:
            return 0.0
        key = (x, y) if x <= y else (y, x)
        return self._overrides.get(key, 1.0)


def _min_cost_transport(supply: list[int], demand: list[int],
                        cost: list[list[float]]) -> float:
    """Exact min-cost flow for a balanced transportation problem, via
    successive shortest paths (Bellman-Ford handles residual negatives)."""
    m, n = len(supply), len(demand)
    source, sink = m + n, m + n + 1
    node_count = m + n + 2
    graph: list[list[list]] = [[] for _ in range(node_count)]  # [to, cap, cost, rev_idx]

    def add_edge(u: int, v: int, cap: int, weight: float) -> None:
        graph[u].append([v, cap, weight, len(graph[v])])
        graph[v].append([u, 0, -weight, len(graph[u]) - 1])

    for i, s in enumerate(supply):
        add_edge(source, i, s, 0.0)
    for j, d in enumerate(demand):
        add_edge(m + j, sink, d, 0.0)
    for i in range(m):
        for j in range(n):
            add_edge(i, m + j, sum(supply), cost[i][j])

    total_flow_needed = sum(supply)
    total_cost = 0.0
    flow = 0
    while flow < total_flow_needed:
        dist = [math.inf] * node_count
        in_queue = [False] * node_count
        prev_edge: list[Optional[tuple[int, int]]] = [None] * node_count
        dist[source] = 0.0
        queue = deque([source])
        in_queue[source] = True
        while queue:
            u = queue.popleft()
            in_queue[u] = False
            for edge_index, edge in enumerate(graph[u]):
                v, cap, weight, _ = edge
                if cap > 0 and dist[u] + weight < dist[v] - 1e-12:
                    dist[v] = dist[u] + weight
                    prev_edge[v] = (u, edge_index)
                    if not in_queue[v]:
                        queue.append(v)
                        in_queue[v] = True
        if not math.isfinite(dist[sink]):
            raise ArithmeticError("transportation problem is infeasible")
        bottleneck = total_flow_needed - flow
        v = sink
        while v != source:
            u, edge_index = prev_edge[v]
            bottleneck = min(bottleneck, graph[u][edge_index][1])
            v = u
        v = sink
        while v != source:
            u, edge_index = prev_edge[v]
            edge = graph[u][edge_index]
            edge[1] -= bottleneck
            graph[v][edge[3]][1] += bottleneck
            v = u
        flow += bottleneck
        total_cost += bottleneck * dist[sink]
    return total_cost


def emd(a: Histogram, b: Histogram, ground: Optional[GroundDistance] = None) -> float:
    """Earth mover's distance between the two histograms, each normalized to
    total mass 1, solved exactly.

    Masses are brought to a common integer scale (the lcm of the totals), the
    resulting balanced transportation problem is solved with exact integer
    flows, and the optimal cost is scaled back.  With the discrete ground
    metric this equals half the L1 distance of the normalized histograms.
    """
    ground = ground or GroundDistance()
    if a.total == 0 or b.total == 0:
        raise EmptyHistogram("earth mover's distance needs non-empty histograms")
    keys_a = sorted(a.counts)
    keys_b = sorted(b.counts)
    scale = math.lcm(a.total, b.total)
    supply = [a[k] * (scale // a.total) for k in keys_a]
    demand = [b[k] * (scale // b.total) for k in keys_b]
    cost = [[ground.distance(ka, kb) for kb in keys_b] for ka in keys_a]
    return _min_cost_transport(supply, demand, cost) / scale


# ---------------------------------------------------------------------------
# document-collection distance
# ---------------------------------------------------------------------------

def document_distance(
    a_docs: Iterable[MathDoc],
    b_docs: Iterable[MathDoc],
    measure: str = "emd",
    scope: str = "whole",
    include_structural: bool = False,
    ground: Optional[GroundDistance] = None,
) -> float:
    """Distance between two document collections: histograms are accumulated
    per side, then compared with the selected measure (``emd`` or
    ``cosine``)."""
    a_list = list(a_docs)
    b_list = list(b_docs)
    if not a_list or not b_list:
        raise ValueError("document collections must be non-empty")
    hist_a = accumulate(histogram(d, scope, include_structural) for d in a_list)
    hist_b = accumulate(histogram(d, scope, include_structural) for d in b_list)
    if measure == "emd":
        return emd(hist_a, hist_b, ground)
    if measure == "cosine":
        return cosine_similarity(hist_a, hist_b)
    raise ValueError(f"unknown measure {measure!r}")
