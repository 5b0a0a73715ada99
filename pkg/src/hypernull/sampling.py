"""Edge-swap Markov chains over directed hypergraphs.

Two uniform samplers operate on the bipartite digraph: the degree-preserving
chain (model "degs") keeps all four degree sequences fixed via parity swaps,
and the joint-preserving chain (model "joint") keeps the full joint degree
tensor fixed via restricted parity swaps between vertices of equal degree
class.  A Metropolis-Hastings variant ("degs-mh") targets the degree ensemble
through uniform edge-pair proposals corrected by the exact count of applicable
swaps.  The "null" model keeps only the head/tail size sequences.
"""

from __future__ import annotations

import hashlib
import math
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field

from hypernull.core import (
    BipartiteDigraph,
    DirectedHypergraph,
    Hyperedge,
    to_bipartite,
    to_hypergraph,
)

MODELS = ("degs", "joint", "degs-mh", "null")


class FrozenEnsembleError(RuntimeError):
    """Raised when a sampler is asked to move but no swap exists anywhere."""


def derive_seed(master_seed: int, role: str, index: int = 0) -> int:
    """Stable 64-bit sub-seed for (master seed, role, index).

    Hash-based so that per-sample and per-purpose random streams are
    independent and reproducible across platforms.
    """
    digest = hashlib.sha256(f"{master_seed}:{role}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class SwapProposal:
    """A parity swap: replace (left1,right1,d),(left2,right2,d) by the crossed
    pair (left1,right2,d),(left2,right1,d)."""

    left1: int
    right1: int
    left2: int
    right2: int
    direction: int

    def reverse(self) -> "SwapProposal":
        """The proposal that undoes this one on the swapped graph."""
        return SwapProposal(self.left1, self.right2, self.left2, self.right1, self.direction)


@dataclass
class ChainConfig:
    """Run descriptor: model, steps per sample, seeding, and sample layout.

    steps="auto" resolves to 20 * w where w is the total number of bipartite
    arcs.  thinning defaults to steps, which means every sample comes from an
    independent chain restarted at the observed graph; a smaller thinning runs
    one long chain and emits every `thinning` steps after a `steps` burn-in.
    """

    model: str = "degs"
    steps: object = "auto"
    seed: int = 0
    sample_count: int = 1
    thinning: int | None = None
    heads_prob: float | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.steps != "auto" and (not isinstance(self.steps, int) or self.steps < 0):
            raise ValueError("steps must be 'auto' or a non-negative integer")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.heads_prob is not None and not 0.0 <= self.heads_prob <= 1.0:
            raise ValueError("heads_prob must lie in [0, 1]")

    def resolved_steps(self, G: BipartiteDigraph) -> int:
        if self.steps == "auto":
            return math.ceil(20 * (G.plus_edges() + G.minus_edges()))
        return self.steps


class _ClassFamily:
    """Degree classes of one vertex family with cumulative pair-count tables.

    Sampling draws a class with probability proportional to C(|class|, 2) via
    binary search, then a uniform ordered pair inside the class.  Classes are
    invariant under restricted swaps, so the tables are built once.
    """

    def __init__(self, groups: dict):
        self.members = []
        self.cumulative = []
        total = 0
        for key in sorted(groups):
            size = len(groups[key])
            weight = size * (size - 1) // 2
            if weight == 0:
                continue
            total += weight
            self.members.append(sorted(groups[key]))
            self.cumulative.append(total)
        self.total = total

    def sample_pair(self, rng):
        """A uniform ordered pair of distinct vertices from a weight-picked class."""
        if self.total == 0:
            return None
        draw = rng.randrange(self.total)
        members = self.members[bisect_right(self.cumulative, draw)]
        i = rng.randrange(len(members))
        j = rng.randrange(len(members) - 1)
        if j >= i:
            j += 1
        return members[i], members[j]


@dataclass
class DegreeClasses:
    left_plus: _ClassFamily   # left vertices with out-degree >= 1, keyed (in, out)
    left_minus: _ClassFamily  # left vertices with in-degree >= 1
    right_plus: _ClassFamily  # right vertices with non-empty tail
    right_minus: _ClassFamily  # right vertices with non-empty head


def _build_degree_classes(G: BipartiteDigraph) -> DegreeClasses:
    left_plus, left_minus, right_plus, right_minus = {}, {}, {}, {}
    for v in range(G.left_count):
        i, j = len(G.left_in[v]), len(G.left_out[v])
        if j >= 1:
            left_plus.setdefault((i, j), []).append(v)
        if i >= 1:
            left_minus.setdefault((i, j), []).append(v)
    for a in range(G.right_count):
        k, l = len(G.right_in[a]), len(G.right_out[a])
        if l >= 1:
            right_plus.setdefault((k, l), []).append(a)
        if k >= 1:
            right_minus.setdefault((k, l), []).append(a)
    return DegreeClasses(
        _ClassFamily(left_plus),
        _ClassFamily(left_minus),
        _ClassFamily(right_plus),
        _ClassFamily(right_minus),
    )


@dataclass
class ChainState:
    """Mutable sampler state: the graph plus the per-model static indexes."""

    graph: BipartiteDigraph
    rng: random.Random
    heads_prob: float
    positive_out_left: list
    positive_out_right: list
    degree_classes: DegreeClasses | None = None
    swap_count: int | None = None
    edge_list: list | None = None
    debug: bool = False


def make_chain_state(
    G: BipartiteDigraph,
    seed: int,
    model: str = "degs",
    heads_prob: float | None = None,
    debug: bool = False,
) -> ChainState:
    """Initialize a chain on G (owned by the chain and mutated in place)."""
    m_plus, m_minus = G.plus_edges(), G.minus_edges()
    total = m_plus + m_minus
    if heads_prob is None:
        heads_prob = m_plus / total if total else 0.5
    state = ChainState(
        graph=G,
        rng=random.Random(seed),
        heads_prob=heads_prob,
        positive_out_left=[v for v in range(G.left_count) if G.left_out[v]],
        positive_out_right=[a for a in range(G.right_count) if G.right_out[a]],
        debug=debug,
    )
    if model == "joint":
        state.degree_classes = _build_degree_classes(G)
    elif model == "degs-mh":
        state.swap_count = state_degree_pso(G)
        state.edge_list = sorted(G.edges())
    return state


# ---------------------------------------------------------------------------
# Swap operations
# ---------------------------------------------------------------------------


def apply_pso(G: BipartiteDigraph, p: SwapProposal) -> None:
    """Apply a parity swap in place; all four degree sequences are unchanged."""
    u, a, v, b = p.left1, p.right1, p.left2, p.right2
    assert u != v and a != b, "swap endpoints must be distinct"
    if p.direction == +1:
        assert a in G.left_out[u] and b in G.left_out[v], "swapped arcs must exist"
        assert b not in G.left_out[u] and a not in G.left_out[v], "crossed arcs must be absent"
        G.left_out[u].remove(a)
        G.left_out[u].add(b)
        G.left_out[v].remove(b)
        G.left_out[v].add(a)
        G.right_in[a].remove(u)
        G.right_in[a].add(v)
        G.right_in[b].remove(v)
        G.right_in[b].add(u)
    else:
        assert a in G.left_in[u] and b in G.left_in[v], "swapped arcs must exist"
        assert b not in G.left_in[u] and a not in G.left_in[v], "crossed arcs must be absent"
        G.left_in[u].remove(a)
        G.left_in[u].add(b)
        G.left_in[v].remove(b)
        G.left_in[v].add(a)
        G.right_out[a].remove(u)
        G.right_out[a].add(v)
        G.right_out[b].remove(v)
        G.right_out[b].add(u)


def apply_rpso(G: BipartiteDigraph, p: SwapProposal) -> None:
    """Apply a restricted parity swap; the joint tensor is unchanged.

    On top of the plain-swap preconditions, the two left endpoints must share
    their (in, out) degree pair, or the two right endpoints must share theirs.
    """
    u, a, v, b = p.left1, p.right1, p.left2, p.right2
    left_match = (len(G.left_in[u]), len(G.left_out[u])) == (len(G.left_in[v]), len(G.left_out[v]))
    right_match = (len(G.right_in[a]), len(G.right_out[a])) == (
        len(G.right_in[b]),
        len(G.right_out[b]),
    )
    assert left_match or right_match, "restricted swap needs matching degree classes"
    apply_pso(G, p)


# ---------------------------------------------------------------------------
# Chain steps
# ---------------------------------------------------------------------------


def _pick_pair(rng, pool):
    """Uniform ordered pair of distinct entries of pool."""
    i = rng.randrange(len(pool))
    j = rng.randrange(len(pool) - 1)
    if j >= i:
        j += 1
    return pool[i], pool[j]


def _pick_diff(rng, first: set, second: set):
    """Uniform element of first - second, or None if the difference is empty.

    Sorted before drawing so the choice depends only on the rng stream, not on
    set iteration order.
    """
    candidates = sorted(first - second)
    if not candidates:
        return None
    return candidates[rng.randrange(len(candidates))]


def nudhy_degs_step(state: ChainState) -> bool:
    """One degree-preserving chain step; returns True when a swap was applied.

    A biased coin picks the arc direction (heads probability |D+|/|D| unless
    overridden), a uniform vertex pair is drawn from the positive-out-degree
    pool of the matching side, and a uniform crossed pair from the
    out-neighborhood differences completes the swap.  Any shortage — pool
    smaller than two, empty difference — is a self-loop of the chain.
    """
    G, rng = state.graph, state.rng
    if rng.random() < state.heads_prob:
        pool = state.positive_out_left
        if len(pool) < 2:
            return False
        u, v = _pick_pair(rng, pool)
        a = _pick_diff(rng, G.left_out[u], G.left_out[v])
        b = _pick_diff(rng, G.left_out[v], G.left_out[u])
        if a is None or b is None:
            return False
        proposal = SwapProposal(u, a, v, b, +1)
    else:
        pool = state.positive_out_right
        if len(pool) < 2:
            return False
        a, b = _pick_pair(rng, pool)
        u = _pick_diff(rng, G.right_out[a], G.right_out[b])
        v = _pick_diff(rng, G.right_out[b], G.right_out[a])
        if u is None or v is None:
            return False
        proposal = SwapProposal(u, a, v, b, -1)
    apply_pso(G, proposal)
    if state.debug:
        G.validate()
    return True


def nudhy_joint_step(state: ChainState) -> bool:
    """One joint-preserving chain step; returns True when a swap was applied.

    The direction coin works as in the degree chain; a second fair coin picks
    which side's degree classes to sample.  A class is drawn with probability
    proportional to its number of vertex pairs, a uniform pair inside it, and
    a uniform crossed pair from the corresponding neighborhood differences.
    """
    G, rng, classes = state.graph, state.rng, state.degree_classes
    plus_direction = rng.random() < state.heads_prob
    left_side = rng.random() < 0.5
    if plus_direction:
        if left_side:
            pair = classes.left_plus.sample_pair(rng)
            if pair is None:
                return False
            u, v = pair
            a = _pick_diff(rng, G.left_out[u], G.left_out[v])
            b = _pick_diff(rng, G.left_out[v], G.left_out[u])
            if a is None or b is None:
                return False
            proposal = SwapProposal(u, a, v, b, +1)
        else:
            pair = classes.right_minus.sample_pair(rng)
            if pair is None:
                return False
            a, b = pair
            u = _pick_diff(rng, G.right_in[a], G.right_in[b])
            v = _pick_diff(rng, G.right_in[b], G.right_in[a])
            if u is None or v is None:
                return False
            proposal = SwapProposal(u, a, v, b, +1)
    else:
        if left_side:
            pair = classes.left_minus.sample_pair(rng)
            if pair is None:
                return False
            u, v = pair
            a = _pick_diff(rng, G.left_in[u], G.left_in[v])
            b = _pick_diff(rng, G.left_in[v], G.left_in[u])
            if a is None or b is None:
                return False
            proposal = SwapProposal(u, a, v, b, -1)
        else:
            pair = classes.right_plus.sample_pair(rng)
            if pair is None:
                return False
            a, b = pair
            u = _pick_diff(rng, G.right_out[a], G.right_out[b])
            v = _pick_diff(rng, G.right_out[b], G.right_out[a])
            if u is None or v is None:
                return False
            proposal = SwapProposal(u, a, v, b, -1)
    apply_rpso(G, proposal)
    if state.debug:
        G.validate()
    return True


# ---------------------------------------------------------------------------
# Swap counting and the Metropolis-Hastings chain
# ---------------------------------------------------------------------------


def state_degree_pso(G: BipartiteDigraph) -> int:
    """Exact number of applicable parity swaps in G.

    Counted as disjoint same-direction arc pairs, minus pairs blocked by one
    crossing arc (three-arc paths), plus twice the complete 2x2 bicliques that
    the path count double-subtracts.
    """
    li = [len(s) for s in G.left_in]
    lo = [len(s) for s in G.left_out]
    ri = [len(s) for s in G.right_in]
    ro = [len(s) for s in G.right_out]
    m_plus = sum(lo)
    m_minus = sum(li)

    disjoint = (
        m_plus * (m_plus + 1) - sum(x * x for x in lo) - sum(x * x for x in ri)
    ) // 2 + (
        m_minus * (m_minus + 1) - sum(x * x for x in li) - sum(x * x for x in ro)
    ) // 2

    paths = 0
    for v in range(G.left_count):
        for a in G.left_out[v]:
            paths += (lo[v] - 1) * (ri[a] - 1)
        for a in G.left_in[v]:
            paths += (li[v] - 1) * (ro[a] - 1)

    bicliques = 0
    for sides in (G.right_in, G.right_out):
        pair_counts = Counter()
        for members in sides:
            ordered = sorted(members)
            for x in range(len(ordered)):
                for y in range(x + 1, len(ordered)):
                    pair_counts[(ordered[x], ordered[y])] += 1
        bicliques += sum(c * (c - 1) // 2 for c in pair_counts.values())

    return disjoint - paths + 2 * bicliques


def delta_state_degree_pso(G: BipartiteDigraph, p: SwapProposal) -> int:
    """Change in state_degree_pso if p were applied, from local counts only."""
    u, a, v, b = p.left1, p.right1, p.left2, p.right2
    if p.direction == +1:
        left_adj, right_adj = G.left_out, G.right_in
    else:
        left_adj, right_adj = G.left_in, G.right_out
    d_paths = (len(left_adj[u]) - len(left_adj[v])) * (len(right_adj[b]) - len(right_adj[a]))
    d_bicliques = 0
    for w in right_adj[b] - right_adj[a]:
        if w == v:
            continue
        d_bicliques += len(left_adj[u] & left_adj[w]) - (len(left_adj[v] & left_adj[w]) - 1)
    for w in right_adj[a] - right_adj[b]:
        if w == u:
            continue
        d_bicliques += len(left_adj[v] & left_adj[w]) - (len(left_adj[u] & left_adj[w]) - 1)
    return -d_paths + 2 * d_bicliques


def nudhy_degs_mh_step(state: ChainState) -> bool:
    """One Metropolis-Hastings step on the degree ensemble.

    Uniform arc pairs are rejection-sampled until they form an applicable
    swap, which is then accepted with probability min(1, d(G)/d(G')) using the
    incremental swap-count bookkeeping.  Raises FrozenEnsembleError when the
    graph admits no swap at all (the loop could never terminate).
    """
    G, rng = state.graph, state.rng
    if state.swap_count == 0:
        raise FrozenEnsembleError("no applicable swap exists in this graph")
    edges = state.edge_list
    while True:
        i = rng.randrange(len(edges))
        j = rng.randrange(len(edges) - 1)
        if j >= i:
            j += 1
        u, a, d1 = edges[i]
        v, b, d2 = edges[j]
        if d1 != d2 or u == v or a == b:
            continue
        if d1 == +1:
            if b in G.left_out[u] or a in G.left_out[v]:
                continue
        else:
            if b in G.left_in[u] or a in G.left_in[v]:
                continue
        proposal = SwapProposal(u, a, v, b, d1)
        break
    delta = delta_state_degree_pso(G, proposal)
    new_count = state.swap_count + delta
    ratio = state.swap_count / new_count
    if ratio < 1.0 and rng.random() >= ratio:
        return False
    apply_pso(G, proposal)
    edges[i] = edges[i]._replace(right=b)
    edges[j] = edges[j]._replace(right=a)
    state.swap_count = new_count
    if state.debug:
        G.validate()
        assert state.swap_count == state_degree_pso(G)
    return True


# ---------------------------------------------------------------------------
# Null sampler and the chain runner
# ---------------------------------------------------------------------------


def null_sample(H: DirectedHypergraph, seed: int) -> DirectedHypergraph:
    """Random hypergraph with H's head/tail size sequences, nodes drawn
    uniformly without replacement per side."""
    rng = random.Random(seed)
    n = H.num_nodes
    edges = []
    for e in H.expanded_edges():
        if len(e.head) > n or len(e.tail) > n:
            raise ValueError("hyperedge side larger than the node set")
        head = frozenset(rng.sample(range(n), len(e.head)))
        tail = frozenset(rng.sample(range(n), len(e.tail)))
        edges.append(Hyperedge(head, tail))
    labels = None if H.labels is None else list(H.labels)
    return DirectedHypergraph(edges, n, labels)


_STEP_FUNCTIONS = {
    "degs": nudhy_degs_step,
    "joint": nudhy_joint_step,
    "degs-mh": nudhy_degs_mh_step,
}


def run_chain(H: DirectedHypergraph, config: ChainConfig):
    """Generate config.sample_count random hypergraphs from H's ensemble.

    By default each sample comes from an independent chain seeded by
    derive_seed(seed, "chain", index) and run for the resolved step count
    starting at H; with thinning < steps a single chain burns in `steps`
    steps, then emits every `thinning` steps.  Output is fully determined by
    (H, config).
    """
    if config.model == "null":
        for index in range(config.sample_count):
            yield null_sample(H, derive_seed(config.seed, "null", index))
        return
    G0 = to_bipartite(H)
    steps = config.resolved_steps(G0)
    step = _STEP_FUNCTIONS[config.model]
    thinning = config.thinning if config.thinning is not None else steps
    if thinning == steps:
        for index in range(config.sample_count):
            state = make_chain_state(
                G0.copy(), derive_seed(config.seed, "chain", index), config.model,
                heads_prob=config.heads_prob,
            )
            for _ in range(steps):
                step(state)
            yield to_hypergraph(state.graph)
    else:
        state = make_chain_state(
            G0.copy(), derive_seed(config.seed, "chain", 0), config.model,
            heads_prob=config.heads_prob,
        )
        for _ in range(steps):
            step(state)
        yield to_hypergraph(state.graph)
        for _ in range(config.sample_count - 1):
            for _ in range(thinning):
                step(state)
            yield to_hypergraph(state.graph)


# ---------------------------------------------------------------------------
# Transition probabilities (used by the symmetry property tests)
# ---------------------------------------------------------------------------


def degs_step_probability(G: BipartiteDigraph, p: SwapProposal, heads_prob=None) -> float:
    """Probability that one degree-chain step proposes exactly the swap p."""
    m_plus, m_minus = G.plus_edges(), G.minus_edges()
    total = m_plus + m_minus
    u, a, v, b = p.left1, p.right1, p.left2, p.right2
    if p.direction == +1:
        direction_prob = heads_prob if heads_prob is not None else m_plus / total
        pool = sum(1 for s in G.left_out if s)
        diff = len(G.left_out[u] - G.left_out[v]) * len(G.left_out[v] - G.left_out[u])
    else:
        direction_prob = (
            (1.0 - heads_prob) if heads_prob is not None else m_minus / total
        )
        pool = sum(1 for s in G.right_out if s)
        diff = len(G.right_out[a] - G.right_out[b]) * len(G.right_out[b] - G.right_out[a])
    pairs = pool * (pool - 1) // 2
    if pairs == 0 or diff == 0:
        return 0.0
    return direction_prob / pairs / diff


def joint_step_probability(G: BipartiteDigraph, p: SwapProposal) -> float:
    """Probability that one joint-chain step proposes exactly the swap p.

    Sums the left-class and right-class sampling routes; a route contributes
    only when its endpoint pair shares a degree class.
    """
    li = [len(s) for s in G.left_in]
    lo = [len(s) for s in G.left_out]
    ri = [len(s) for s in G.right_in]
    ro = [len(s) for s in G.right_out]
    m_plus, m_minus = sum(lo), sum(li)
    total_arcs = m_plus + m_minus
    classes = _build_degree_classes(G)
    u, a, v, b = p.left1, p.right1, p.left2, p.right2
    probability = 0.0
    if p.direction == +1:
        direction_prob = m_plus / total_arcs
        if (li[u], lo[u]) == (li[v], lo[v]) and classes.left_plus.total:
            diff = len(G.left_out[u] - G.left_out[v]) * len(G.left_out[v] - G.left_out[u])
            if diff:
                probability += direction_prob * 0.5 / (classes.left_plus.total * diff)
        if (ri[a], ro[a]) == (ri[b], ro[b]) and classes.right_minus.total:
            diff = len(G.right_in[a] - G.right_in[b]) * len(G.right_in[b] - G.right_in[a])
            if diff:
                probability += direction_prob * 0.5 / (classes.right_minus.total * diff)
    else:
        direction_prob = m_minus / total_arcs
        if (li[u], lo[u]) == (li[v], lo[v]) and classes.left_minus.total:
            diff = len(G.left_in[u] - G.left_in[v]) * len(G.left_in[v] - G.left_in[u])
            if diff:
                probability += direction_prob * 0.5 / (classes.left_minus.total * diff)
        if (ri[a], ro[a]) == (ri[b], ro[b]) and classes.right_plus.total:
            diff = len(G.right_out[a] - G.right_out[b]) * len(G.right_out[b] - G.right_out[a])
            if diff:
                probability += direction_prob * 0.5 / (classes.right_plus.total * diff)
    return probability
