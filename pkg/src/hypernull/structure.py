"""Structural observables: reciprocity, hyper-core decomposition, group
entropy, centrality scores, and the multi-order Laplacian spectrum.

Reciprocity asks how well the reverse flow of a hyperedge is realized by
some subset of the other hyperedges; each head node compares the
distribution its reciprocators route back to against the uniform
distribution over the edge's tail (Jensen-Shannon divergence, base 2), and
a soft penalty discounts large reciprocal sets.  Core decomposition peels
one side of the hypergraph: the (k, m) core keeps nodes appearing on the
tracked side of at least k hyperedges whose size -- counting tracked-side
survivors plus the whole opposite side -- stays at least m.  The spectrum
combines one Laplacian per hyperedge size d, each normalized by the mean
order-d degree, into a single multi-order operator.
"""

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from statistics import fmean
from typing import NamedTuple

import numpy as np

from .core import BipartiteDigraph, DirectedHypergraph, Hyperedge, UndirectedHypergraph, merge_to_undirected

SIDES = ("head", "tail")


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


# ---------------------------------------------------------------------------
# Reciprocity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReciprocityConfig:
    """Knobs for reciprocity scoring and the reciprocal-set search.

    alpha is the exponent of the (1/|R|)^alpha size penalty: small enough to
    leave scores essentially intact, nonzero so that among equally good
    reciprocal sets the smallest wins.  Searches enumerate every subset of
    the candidates up to exact_limit candidates and fall back to greedy
    forward selection beyond that.
    """

    alpha: float = 1e-6
    exact_limit: int = 15

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.exact_limit < 0:
            raise ValueError("exact_limit must be non-negative")


class ReciprocityResult(NamedTuple):
    value: float
    per_edge: tuple


def _jensen_shannon(p: dict, q: dict) -> float:
    """Base-2 Jensen-Shannon divergence of two sparse distributions."""
    total = 0.0
    for dist, other in ((p, q), (q, p)):
        for v, mass in dist.items():
            if mass > 0.0:
                total += mass * math.log2(2.0 * mass / (mass + other.get(v, 0.0)))
    return 0.5 * total


def hyperedge_reciprocity(e: Hyperedge, reciprocators, config: ReciprocityConfig | None = None) -> float:
    """Score in [0, 1] for how well `reciprocators` reverse the edge e.

    Each head node u draws its return distribution from the reciprocators
    whose tail contains u (uniformly across them, uniformly within each
    head); nodes no reciprocator points back to pay the maximal divergence
    of 1.  An empty reciprocator set scores 0.
    """
    config = config or ReciprocityConfig()
    if not e.head or not e.tail:
        raise ValueError("reciprocity needs a non-empty head and tail")
    reciprocators = list(reciprocators)
    if not reciprocators:
        return 0.0
    ideal = {v: 1.0 / len(e.tail) for v in e.tail}
    divergence = 0.0
    for u in e.head:
        relevant = [f for f in reciprocators if u in f.tail]
        if not relevant:
            divergence += 1.0
            continue
        returned = defaultdict(float)
        weight = 1.0 / len(relevant)
        for f in relevant:
            if f.head:
                share = weight / len(f.head)
                for v in f.head:
                    returned[v] += share
        divergence += _jensen_shannon(returned, ideal)
    penalty = (1.0 / len(reciprocators)) ** config.alpha
    return penalty * (1.0 - divergence / len(e.head))


def _reciprocal_candidates(H: DirectedHypergraph, e: Hyperedge) -> list:
    """Hyperedge copies that could reciprocate e, minus one copy of e itself."""
    skipped_self = False
    out = []
    for f in H.expanded_edges():
        if not skipped_self and f.head == e.head and f.tail == e.tail:
            skipped_self = True
            continue
        if (f.tail & e.head) and (f.head & e.tail):
            out.append(f)
    return out


def search_reciprocal_set(H: DirectedHypergraph, e: Hyperedge, config: ReciprocityConfig | None = None):
    """Best-scoring reciprocal set for e among the other edges of H.

    Returns (edges, score).  Exhaustive over all candidate subsets up to
    config.exact_limit candidates, greedy forward selection (stopping at the
    first non-improving extension) beyond that.
    """
    config = config or ReciprocityConfig()
    if not e.head or not e.tail:
        return ((), 0.0)
    candidates = _reciprocal_candidates(H, e)
    if not candidates:
        return ((), 0.0)
    if len(candidates) <= config.exact_limit:
        best, best_score = (), 0.0
        for mask in range(1, 1 << len(candidates)):
            subset = [c for i, c in enumerate(candidates) if mask >> i & 1]
            score = hyperedge_reciprocity(e, subset, config)
            if score > best_score:
                best, best_score = tuple(subset), score
        return (best, best_score)
    chosen: list = []
    score = 0.0
    remaining = list(candidates)
    while remaining:
        best_index, best_score = None, score
        for i, f in enumerate(remaining):
            trial = hyperedge_reciprocity(e, chosen + [f], config)
            if trial > best_score:
                best_index, best_score = i, trial
        if best_index is None:
            break
        chosen.append(remaining.pop(best_index))
        score = best_score
    return (tuple(chosen), score)


def hypergraph_reciprocity(H: DirectedHypergraph, config: ReciprocityConfig | None = None) -> ReciprocityResult:
    """Mean best reciprocity over all hyperedge copies of H."""
    expanded = list(H.expanded_edges())
    if not expanded:
        raise ValueError("reciprocity of an empty hypergraph is undefined")
    scores = [search_reciprocal_set(H, e, config)[1] for e in expanded]
    return ReciprocityResult(fmean(scores), tuple(scores))


# ---------------------------------------------------------------------------
# Hyper-core decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorenessProfile:
    """Shell indices per size threshold m and their sum (the hypercoreness).

    shells[m][v] is the largest k such that v survives (k, m)-core peeling
    on the tracked side; hypercoreness[v] sums shells over m = 2..max_size.
    """

    side: str
    max_size: int
    shells: dict
    hypercoreness: tuple


def _peel(sides, extras, survivors, k, m):
    survivors = set(survivors)
    while True:
        qualifying = Counter()
        for members, extra in zip(sides, extras):
            alive = members & survivors
            if len(alive) + extra >= m:
                for v in alive:
                    qualifying[v] += 1
        bad = {v for v in survivors if qualifying[v] < k}
        if not bad:
            return survivors
        survivors -= bad


def hyper_core_decomposition(H: DirectedHypergraph, side: str) -> CorenessProfile:
    """Peel the tracked side of H at every size threshold m = 2..max size.

    A node is in the (k, m) core when it sits on the tracked side of at
    least k hyperedges whose current size -- tracked-side survivors plus the
    full opposite side -- is at least m.  Removing a node deletes only its
    tracked-side occurrences; opposite-side occurrences keep counting
    toward sizes.
    """
    _check_side(side)
    expanded = list(H.expanded_edges())
    sides = [e.head if side == "head" else e.tail for e in expanded]
    extras = [len(e.tail if side == "head" else e.head) for e in expanded]
    max_size = max((e.size for e in expanded), default=0)
    tracked = frozenset().union(*sides) if sides else frozenset()
    shells = {}
    for m in range(2, max_size + 1):
        shell = [0] * H.num_nodes
        survivors = set(tracked)
        k = 1
        while survivors:
            survivors = _peel(sides, extras, survivors, k, m)
            for v in survivors:
                shell[v] = k
            k += 1
        shells[m] = tuple(shell)
    hypercoreness = tuple(
        float(sum(shells[m][v] for m in shells)) for v in range(H.num_nodes)
    )
    return CorenessProfile(side=side, max_size=max_size, shells=shells, hypercoreness=hypercoreness)


# ---------------------------------------------------------------------------
# Structural entropy
# ---------------------------------------------------------------------------


def binary_entropy(p: float) -> float:
    """Shannon entropy (base 2) of a Bernoulli probability."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must be in [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def _groups_of(H: DirectedHypergraph, side: str, group_size: int) -> set:
    groups = set()
    for e in H.expanded_edges():
        members = e.head if side == "head" else e.tail
        for combo in itertools.combinations(sorted(members), group_size):
            groups.add(frozenset(combo))
    return groups


def structural_entropy(observed: DirectedHypergraph, samples, group_size: int, side: str) -> dict:
    """Entropy of each observed node group's presence across the samples.

    A group of group_size nodes is present in a sample when it is contained
    in the chosen side of one of its hyperedges.  Groups that appear in
    every sample or in none score 0; maximally unpredictable groups score 1.
    """
    _check_side(side)
    if group_size < 1:
        raise ValueError("group_size must be at least 1")
    samples = list(samples)
    if not samples:
        raise ValueError("at least one sample is required")
    groups = _groups_of(observed, side, group_size)
    counts = dict.fromkeys(groups, 0)
    for sample in samples:
        present = _groups_of(sample, side, group_size)
        for g in groups:
            if g in present:
                counts[g] += 1
    return {g: binary_entropy(c / len(samples)) for g, c in counts.items()}


# ---------------------------------------------------------------------------
# Centrality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedDigraph:
    """Integer-weighted digraph as a successor map per node."""

    num_nodes: int
    successors: tuple


def project_weighted(H: DirectedHypergraph) -> WeightedDigraph:
    """Pairwise projection: one arc u -> v per head node u, tail node v,
    and hyperedge copy, with parallel arcs folded into weights."""
    successors = [Counter() for _ in range(H.num_nodes)]
    for e in H.expanded_edges():
        for u in e.head:
            for v in e.tail:
                successors[u][v] += 1
    return WeightedDigraph(H.num_nodes, tuple(dict(s) for s in successors))


def pagerank(g: WeightedDigraph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 10_000) -> list:
    """Power iteration with uniform teleport; dangling mass is spread
    uniformly.  Stops when the L1 change drops to tol, raises RuntimeError
    at max_iter."""
    n = g.num_nodes
    if n == 0:
        return []
    out_total = [sum(nbrs.values()) for nbrs in g.successors]
    scores = [1.0 / n] * n
    for _ in range(max_iter):
        dangling = sum(scores[u] for u in range(n) if out_total[u] == 0)
        base = (1.0 - damping) / n + damping * dangling / n
        fresh = [base] * n
        for u, nbrs in enumerate(g.successors):
            if not nbrs:
                continue
            share = damping * scores[u] / out_total[u]
            for v, w in nbrs.items():
                fresh[v] += share * w
        delta = sum(abs(a - b) for a, b in zip(fresh, scores))
        scores = fresh
        if delta <= tol:
            return scores
    raise RuntimeError(f"pagerank did not converge in {max_iter} iterations")


def _unit(vec):
    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0.0:
        return [0.0] * len(vec)
    return [x / norm for x in vec]


def hits(G: BipartiteDigraph, tol: float = 1e-10, max_iter: int = 10_000):
    """Hub and authority scores on the combined left+right vertex set.

    A +1 arc points from its left vertex to its right vertex, a -1 arc the
    other way; both score vectors are L2-normalized every round and listed
    left vertices first.  Returns (hubs, authorities).
    """
    n = G.left_count + G.right_count
    if n == 0:
        return ([], [])
    outgoing = [[] for _ in range(n)]
    incoming = [[] for _ in range(n)]
    for v, a, d in G.edges():
        s, t = (v, G.left_count + a) if d == +1 else (G.left_count + a, v)
        outgoing[s].append(t)
        incoming[t].append(s)
    start = 1.0 / math.sqrt(n)
    hubs = [start] * n
    auths = [start] * n
    for _ in range(max_iter):
        fresh_a = _unit([sum(hubs[s] for s in incoming[t]) for t in range(n)])
        fresh_h = _unit([sum(fresh_a[t] for t in outgoing[s]) for s in range(n)])
        delta = max(
            max(abs(a - b) for a, b in zip(fresh_h, hubs)),
            max(abs(a - b) for a, b in zip(fresh_a, auths)),
        )
        hubs, auths = fresh_h, fresh_a
        if delta <= tol:
            return (hubs, auths)
    raise RuntimeError(f"hits did not converge in {max_iter} iterations")


# ---------------------------------------------------------------------------
# Multi-order Laplacian
# ---------------------------------------------------------------------------


def multi_order_laplacian(
    U: UndirectedHypergraph,
    D: int | None = None,
    weights=None,
    order_is_size_minus_one: bool = False,
):
    """Sum of per-order Laplacians L(d) = d*K(d) - A(d) for d = 2..D.

    K(d) counts each node's order-d hyperedges, A(d) counts order-d
    co-memberships (zero diagonal), and each L(d) is scaled by
    weights(d) divided by the mean of K(d) over all nodes.  Orders without
    hyperedges are skipped; if none contribute, raises ValueError.  With
    order_is_size_minus_one, a hyperedge of size s counts toward order s-1.
    """
    n = U.num_nodes
    orders = [len(m) - 1 if order_is_size_minus_one else len(m) for m in U.edges]
    if D is None:
        D = min(8, max(orders, default=0))
    weight_of = weights or (lambda d: 1.0)
    laplacian = np.zeros((n, n))
    contributed = False
    for d in range(2, D + 1):
        members = [m for m, o in zip(U.edges, orders) if o == d]
        if not members:
            continue
        degree = np.zeros(n)
        adjacency = np.zeros((n, n))
        for m in members:
            nodes = sorted(m)
            for v in nodes:
                degree[v] += 1.0
            for u, v in itertools.combinations(nodes, 2):
                adjacency[u, v] += 1.0
                adjacency[v, u] += 1.0
        mean_degree = degree.sum() / n
        laplacian += (weight_of(d) / mean_degree) * (d * np.diag(degree) - adjacency)
        contributed = True
    if not contributed:
        raise ValueError(f"no hyperedges of any order between 2 and {D}")
    return laplacian


def laplacian_spectrum(
    H: DirectedHypergraph,
    k: int = 6,
    D: int | None = None,
    weights=None,
    order_is_size_minus_one: bool = False,
):
    """The k smallest multi-order Laplacian eigenvalues, ascending."""
    if k < 1:
        raise ValueError("k must be at least 1")
    U = merge_to_undirected(H)
    L = multi_order_laplacian(U, D=D, weights=weights, order_is_size_minus_one=order_is_size_minus_one)
    values = np.linalg.eigvalsh(L)
    return tuple(float(x) for x in values[: min(k, U.num_nodes)])


def spectral_distance(
    H1: DirectedHypergraph,
    H2: DirectedHypergraph,
    k: int = 6,
    weights=None,
    order_is_size_minus_one: bool = False,
) -> float:
    """Mean L2 gap between the k smallest multi-order eigenvalues of two
    hypergraphs on the same node set, with the order cutoff shared."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if H1.num_nodes != H2.num_nodes:
        raise ValueError("spectral distance needs matching node counts")
    U1, U2 = merge_to_undirected(H1), merge_to_undirected(H2)
    orders = [
        len(m) - 1 if order_is_size_minus_one else len(m)
        for U in (U1, U2)
        for m in U.edges
    ]
    D = min(8, max(orders, default=0))
    spectra = []
    for U in (U1, U2):
        L = multi_order_laplacian(U, D=D, weights=weights, order_is_size_minus_one=order_is_size_minus_one)
        spectra.append(np.linalg.eigvalsh(L))
    k_eff = min(k, H1.num_nodes)
    diff = spectra[0][:k_eff] - spectra[1][:k_eff]
    return float(np.linalg.norm(diff) / k_eff)
