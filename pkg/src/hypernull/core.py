"""Directed hypergraphs, their bipartite-digraph form, degrees, and the joint tensor.

A directed hypergraph is a node set plus a weighted multiset of hyperedges, each a
(head, tail) pair of node sets.  It maps losslessly to a bipartite digraph with one
left vertex per node and one right vertex per hyperedge copy: a head membership is
an arc left -> right (direction +1), a tail membership an arc right -> left
(direction -1).  The samplers mutate the bipartite form; everything else consumes
the hypergraph form.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, NamedTuple


class ParseError(ValueError):
    """Raised when an input file does not conform to the expected text format."""


@dataclass(frozen=True)
class Hyperedge:
    """One directed hyperedge: a head set, a tail set, and a positive weight.

    The two sides may overlap, and either side may be empty as long as the other
    is not.  ``size`` is the total number of memberships, |head| + |tail|.
    """

    head: frozenset
    tail: frozenset
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "head", frozenset(self.head))
        object.__setattr__(self, "tail", frozenset(self.tail))
        if not self.head and not self.tail:
            raise ValueError("hyperedge needs a non-empty head or tail")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")

    @property
    def size(self) -> int:
        return len(self.head) + len(self.tail)

    @property
    def key(self):
        """Canonical sort key: (sorted head, sorted tail)."""
        return (tuple(sorted(self.head)), tuple(sorted(self.tail)))


@dataclass
class DirectedHypergraph:
    """Node set plus a weighted multiset of hyperedges, kept in canonical form.

    Edges are sorted by (sorted head, sorted tail) with duplicates folded into
    multiplicities, so two hypergraphs compare equal exactly when they are the
    same weighted multiset over the same nodes.  Internal node ids are dense
    integers 0..num_nodes-1; ``labels[i]`` retains the external id of node i
    (None means external == internal).
    """

    edges: list
    num_nodes: int
    labels: list | None = None

    def __post_init__(self):
        folded = Counter()
        for e in self.edges:
            folded[(e.head, e.tail)] += e.multiplicity
        self.edges = [
            Hyperedge(h, t, m)
            for (h, t), m in sorted(
                folded.items(),
                key=lambda item: (tuple(sorted(item[0][0])), tuple(sorted(item[0][1]))),
            )
        ]
        for e in self.edges:
            for v in e.head | e.tail:
                if not 0 <= v < self.num_nodes:
                    raise ValueError(f"node {v} out of range 0..{self.num_nodes - 1}")
        if self.labels is not None and len(self.labels) != self.num_nodes:
            raise ValueError("labels must list one external id per node")

    @property
    def num_edges(self) -> int:
        """Number of hyperedge copies, multiplicities counted."""
        return sum(e.multiplicity for e in self.edges)

    def expanded_edges(self) -> Iterator[Hyperedge]:
        """Yield every hyperedge once per multiplicity copy, in canonical order."""
        for e in self.edges:
            for _ in range(e.multiplicity):
                yield Hyperedge(e.head, e.tail)

    def label_of(self, v: int):
        return v if self.labels is None else self.labels[v]


class DirectedEdge(NamedTuple):
    """A bipartite arc: +1 means left is in the head of right, -1 in the tail."""

    left: int
    right: int
    direction: int


@dataclass
class BipartiteDigraph:
    """Mutable bipartite-digraph state kept as four adjacency arrays of sets.

    left_out[v]  -- right vertices whose head contains v (arcs v -> e, d=+1)
    left_in[v]   -- right vertices whose tail contains v (arcs e -> v, d=-1)
    right_in[a]  -- the head of right vertex a
    right_out[a] -- the tail of right vertex a

    The two views are redundant on purpose: swaps update both, and validate()
    cross-checks them.  A chain owns its graph exclusively while running.
    """

    left_out: list
    left_in: list
    right_in: list
    right_out: list
    labels: list | None = None

    @property
    def left_count(self) -> int:
        return len(self.left_out)

    @property
    def right_count(self) -> int:
        return len(self.right_in)

    def plus_edges(self) -> int:
        """Total number of +1 arcs (head memberships)."""
        return sum(len(s) for s in self.left_out)

    def minus_edges(self) -> int:
        """Total number of -1 arcs (tail memberships)."""
        return sum(len(s) for s in self.left_in)

    def edges(self) -> Iterator[DirectedEdge]:
        for v, outs in enumerate(self.left_out):
            for a in outs:
                yield DirectedEdge(v, a, +1)
        for v, ins in enumerate(self.left_in):
            for a in ins:
                yield DirectedEdge(v, a, -1)

    def copy(self) -> "BipartiteDigraph":
        return BipartiteDigraph(
            [set(s) for s in self.left_out],
            [set(s) for s in self.left_in],
            [set(s) for s in self.right_in],
            [set(s) for s in self.right_out],
            labels=None if self.labels is None else list(self.labels),
        )

    def validate(self):
        """Raise ValueError if the four adjacency arrays disagree."""
        if len(self.left_out) != len(self.left_in):
            raise ValueError("left adjacency arrays differ in length")
        if len(self.right_in) != len(self.right_out):
            raise ValueError("right adjacency arrays differ in length")
        n, r = self.left_count, self.right_count
        for v, outs in enumerate(self.left_out):
            for a in outs:
                if not 0 <= a < r or v not in self.right_in[a]:
                    raise ValueError(f"arc ({v},{a},+1) missing from right view")
        for v, ins in enumerate(self.left_in):
            for a in ins:
                if not 0 <= a < r or v not in self.right_out[a]:
                    raise ValueError(f"arc ({v},{a},-1) missing from right view")
        if sum(len(s) for s in self.right_in) != self.plus_edges():
            raise ValueError("+1 arc count mismatch between views")
        if sum(len(s) for s in self.right_out) != self.minus_edges():
            raise ValueError("-1 arc count mismatch between views")
        for a, head in enumerate(self.right_in):
            for v in head:
                if not 0 <= v < n or a not in self.left_out[v]:
                    raise ValueError(f"arc ({v},{a},+1) missing from left view")
        for a, tail in enumerate(self.right_out):
            for v in tail:
                if not 0 <= v < n or a not in self.left_in[v]:
                    raise ValueError(f"arc ({v},{a},-1) missing from left view")


@dataclass
class DegreeProfile:
    """The four degree sequences of a bipartite digraph, indexed by vertex."""

    left_in: list
    left_out: list
    right_in: list   # head sizes
    right_out: list  # tail sizes


@dataclass
class DegreeHistograms:
    """Histograms (degree -> vertex count) of the four positive degree sequences."""

    left_in: dict
    left_out: dict
    right_in: dict
    right_out: dict


@dataclass
class JointTensor:
    """Sparse 5-index tensor counting arcs by endpoint degrees.

    counts[(i, j, k, l, d)] is the number of arcs with direction d between a
    left vertex with in-degree i and out-degree j and a right vertex with
    in-degree k (head size) and out-degree l (tail size).
    """

    counts: dict

    def total(self, direction: int) -> int:
        return sum(c for (*_, d), c in self.counts.items() if d == direction)


@dataclass
class UndirectedHypergraph:
    """Plain undirected hypergraph: a list of node sets, repeats allowed."""

    edges: list
    num_nodes: int
    labels: list | None = None

    def label_of(self, v: int):
        return v if self.labels is None else self.labels[v]


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------


def _as_lines(source):
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return source.splitlines()
    if hasattr(source, "read"):
        return _as_lines(source.read())
    return list(source)


def _parse_side(text, lineno, side):
    text = text.strip()
    if not text:
        return frozenset()
    nodes = []
    for token in text.split(","):
        token = token.strip()
        try:
            v = int(token)
        except ValueError:
            raise ParseError(f"line {lineno}: bad node id {token!r}") from None
        if v < 0:
            raise ParseError(f"line {lineno}: negative node id {v}")
        nodes.append(v)
    if len(set(nodes)) != len(nodes):
        raise ParseError(f"line {lineno}: duplicate node within {side}")
    return frozenset(nodes)


def parse_hypergraph(source) -> DirectedHypergraph:
    """Parse directed-hypergraph text: one "h1,h2,...|t1,t2,..." line per edge copy.

    '#'-prefixed lines are comments; either side of '|' may be blank but not
    both; repeating a line raises that hyperedge's multiplicity.  External node
    ids (arbitrary non-negative integers) are re-indexed densely in ascending
    order and kept in ``labels``.

    Accepts a str, bytes, open file, or iterable of lines.
    """
    raw = []
    seen = set()
    for lineno, line in enumerate(_as_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.count("|") != 1:
            raise ParseError(f"line {lineno}: expected exactly one '|'")
        head_text, tail_text = stripped.split("|")
        head = _parse_side(head_text, lineno, "head")
        tail = _parse_side(tail_text, lineno, "tail")
        if not head and not tail:
            raise ParseError(f"line {lineno}: head and tail are both empty")
        raw.append((head, tail))
        seen |= head | tail
    labels = sorted(seen)
    index = {ext: i for i, ext in enumerate(labels)}
    edges = [
        Hyperedge(frozenset(index[v] for v in h), frozenset(index[v] for v in t))
        for h, t in raw
    ]
    return DirectedHypergraph(edges, len(labels), labels)


def format_hypergraph(H: DirectedHypergraph) -> str:
    """Serialize to the text format, one line per edge copy, external ids."""
    lines = []
    for e in H.expanded_edges():
        head = ",".join(str(H.label_of(v)) for v in sorted(e.head))
        tail = ",".join(str(H.label_of(v)) for v in sorted(e.tail))
        lines.append(f"{head}|{tail}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_undirected(source) -> UndirectedHypergraph:
    """Parse undirected-hypergraph text: one comma-separated node set per line."""
    raw = []
    seen = set()
    for lineno, line in enumerate(_as_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        nodes = _parse_side(stripped, lineno, "hyperedge")
        if not nodes:
            raise ParseError(f"line {lineno}: empty hyperedge")
        raw.append(nodes)
        seen |= nodes
    labels = sorted(seen)
    index = {ext: i for i, ext in enumerate(labels)}
    edges = [frozenset(index[v] for v in e) for e in raw]
    return UndirectedHypergraph(edges, len(labels), labels)


def format_undirected(U: UndirectedHypergraph) -> str:
    lines = [",".join(str(U.label_of(v)) for v in sorted(e)) for e in U.edges]
    return "\n".join(lines) + ("\n" if lines else "")


def read_labels(source) -> dict:
    """Read a node-category CSV ("node_id,category"); a header row is skipped."""
    categories = {}
    for lineno, line in enumerate(_as_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        node_text, _, category = stripped.partition(",")
        try:
            node = int(node_text.strip())
        except ValueError:
            if lineno == 1:  # tolerate a header row
                continue
            raise ParseError(f"line {lineno}: bad node id {node_text!r}") from None
        categories[node] = category.strip()
    return categories


# ---------------------------------------------------------------------------
# Conversions
# ---------------------------------------------------------------------------


def to_bipartite(H: DirectedHypergraph) -> BipartiteDigraph:
    """Expand a hypergraph to its bipartite digraph; one right vertex per copy."""
    n = H.num_nodes
    left_out = [set() for _ in range(n)]
    left_in = [set() for _ in range(n)]
    right_in = []
    right_out = []
    for e in H.expanded_edges():
        a = len(right_in)
        right_in.append(set(e.head))
        right_out.append(set(e.tail))
        for v in e.head:
            left_out[v].add(a)
        for v in e.tail:
            left_in[v].add(a)
    labels = None if H.labels is None else list(H.labels)
    return BipartiteDigraph(left_out, left_in, right_in, right_out, labels)


def to_hypergraph(G: BipartiteDigraph) -> DirectedHypergraph:
    """Collapse right vertices back to hyperedges, folding identical copies."""
    edges = []
    for a in range(G.right_count):
        head, tail = G.right_in[a], G.right_out[a]
        if not head and not tail:
            raise ValueError(f"right vertex {a} has no incident arcs")
        edges.append(Hyperedge(frozenset(head), frozenset(tail)))
    labels = None if G.labels is None else list(G.labels)
    return DirectedHypergraph(edges, G.left_count, labels)


def undirected_to_directed(U: UndirectedHypergraph) -> DirectedHypergraph:
    """Lift an undirected hypergraph: each node set becomes head = tail = set."""
    edges = [Hyperedge(e, e) for e in U.edges]
    labels = None if U.labels is None else list(U.labels)
    return DirectedHypergraph(edges, U.num_nodes, labels)


def merge_to_undirected(H: DirectedHypergraph) -> UndirectedHypergraph:
    """Merge each hyperedge's head and tail into one undirected node set."""
    edges = [e.head | e.tail for e in H.expanded_edges()]
    labels = None if H.labels is None else list(H.labels)
    return UndirectedHypergraph(edges, H.num_nodes, labels)


# ---------------------------------------------------------------------------
# Degrees and the joint tensor
# ---------------------------------------------------------------------------


def degree_profile(G: BipartiteDigraph) -> DegreeProfile:
    """The four degree sequences read off the adjacency arrays."""
    return DegreeProfile(
        [len(s) for s in G.left_in],
        [len(s) for s in G.left_out],
        [len(s) for s in G.right_in],
        [len(s) for s in G.right_out],
    )


def positive_histograms(p: DegreeProfile) -> DegreeHistograms:
    """Histograms of the four degree sequences, zero-degree vertices excluded."""

    def hist(seq):
        return dict(Counter(d for d in seq if d > 0))

    return DegreeHistograms(hist(p.left_in), hist(p.left_out), hist(p.right_in), hist(p.right_out))


def compute_joint(G: BipartiteDigraph) -> JointTensor:
    """Count every arc by its endpoint degree combination (i, j, k, l, d)."""
    counts = Counter()
    for v in range(G.left_count):
        i = len(G.left_in[v])
        j = len(G.left_out[v])
        for a in G.left_out[v]:
            counts[(i, j, len(G.right_in[a]), len(G.right_out[a]), +1)] += 1
        for a in G.left_in[v]:
            counts[(i, j, len(G.right_in[a]), len(G.right_out[a]), -1)] += 1
    return JointTensor(dict(counts))


def joint_marginals(J: JointTensor) -> DegreeHistograms:
    """Recover the four positive-degree histograms from the tensor alone.

    A right vertex with head size k carries exactly k arcs of direction +1, so
    summing the +1 slice over everything but k and dividing by k counts the
    vertices; the other three marginals work the same way.  Zero-degree
    vertices touch no arcs and are invisible to the tensor, hence the
    positive-degree convention.
    """
    left_in = Counter()
    left_out = Counter()
    right_in = Counter()
    right_out = Counter()
    for (i, j, k, l, d), c in J.counts.items():
        if d == +1:
            right_in[k] += c
            left_out[j] += c
        else:
            right_out[l] += c
            left_in[i] += c

    def divide(counter):
        out = {}
        for degree, arcs in counter.items():
            if arcs % degree != 0:
                raise ValueError("inconsistent tensor: arc count not divisible by degree")
            out[degree] = arcs // degree
        return out

    return DegreeHistograms(divide(left_in), divide(left_out), divide(right_in), divide(right_out))
