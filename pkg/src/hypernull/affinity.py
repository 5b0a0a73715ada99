"""Group affinity and homophily for labeled directed hypergraphs.

The (alpha, beta, k)-affinity of a class measures how often its members sit in
the tail of a size-k hyperedge whose size-beta head contains exactly alpha
class members.  Observed scores are compared against the mean over randomized
samples and against a closed-form hypergeometric baseline.  The single-head
special case (one sponsor, many co-sponsors) gets dedicated helpers, including
the per-sponsor homophily mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean, pstdev
from typing import NamedTuple

from hypernull.core import DirectedHypergraph

DEFAULT_SIZE_RANGE = tuple(range(2, 15))


@dataclass(frozen=True)
class CategoryPartition:
    """Assignment of every node to exactly one category label, index-aligned
    with the hypergraph's node ids."""

    assignments: tuple

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(self.assignments))
        if not self.assignments:
            raise ValueError("partition must cover at least one node")

    @property
    def n(self) -> int:
        return len(self.assignments)

    @property
    def categories(self) -> tuple:
        return tuple(sorted(set(self.assignments)))

    def size_of(self, category) -> int:
        size = sum(1 for label in self.assignments if label == category)
        if size == 0:
            raise ValueError(f"unknown category {category!r}")
        return size


class MeanRatio(NamedTuple):
    value: float
    skipped: tuple


class HomophilyResult(NamedTuple):
    value: float | None
    observed: float
    sample_mean: float


def _check_category(P: CategoryPartition, Xi) -> None:
    if Xi not in set(P.assignments):
        raise ValueError(f"unknown category {Xi!r}")


def affinity(
    H: DirectedHypergraph, P: CategoryPartition, Xi, alpha: int, beta: int, k: int
) -> float | None:
    """(alpha, beta, k)-affinity of class Xi, or None when undefined.

    Over the k-uniform sub-hypergraph, the fraction of class-Xi tail
    memberships in beta-headed hyperedges whose head holds exactly alpha
    class-Xi nodes.  Undefined when no class member sits in any such tail.
    """
    _check_category(P, Xi)
    if not 0 <= alpha <= beta <= k:
        raise ValueError("need 0 <= alpha <= beta <= k")
    numerator = denominator = 0
    for e in H.expanded_edges():
        if e.size != k or len(e.head) != beta:
            continue
        tail_members = sum(1 for v in e.tail if P.assignments[v] == Xi)
        if tail_members == 0:
            continue
        denominator += tail_members
        head_members = sum(1 for u in e.head if P.assignments[u] == Xi)
        if head_members == alpha:
            numerator += tail_members
    if denominator == 0:
        return None
    return numerator / denominator


def affinity_baseline(P: CategoryPartition, Xi, alpha: int, beta: int, k: int) -> float:
    """Hypergeometric baseline: the null probability that a size-beta head
    contains exactly alpha nodes of class Xi.

    Exact big-integer arithmetic replaces the usual log-space evaluation; the
    ratio is below one, so the division never overflows.
    """
    size = P.size_of(Xi)
    if not 0 <= alpha <= beta <= k:
        raise ValueError("need 0 <= alpha <= beta <= k")
    total = math.comb(P.n, beta)
    if total == 0:
        raise ValueError("head size beta exceeds the population")
    return math.comb(size, alpha) * math.comb(P.n - size, beta - alpha) / total


def affinity_head1(H: DirectedHypergraph, P: CategoryPartition, Xi, k: int) -> float | None:
    """Single-sponsor affinity: how often class-Xi nodes co-sponsor size-k
    hyperedges whose (single-node) head is also in Xi.

    Every hyperedge of size k must have a one-node head; other sizes are
    outside the sub-hypergraph and may be arbitrary.
    """
    _check_category(P, Xi)
    numerator = denominator = 0
    for e in H.expanded_edges():
        if e.size != k:
            continue
        if len(e.head) != 1:
            raise ValueError(
                "size-k hyperedge with a non-singleton head; use the general affinity"
            )
        tail_members = sum(1 for v in e.tail if P.assignments[v] == Xi)
        if tail_members == 0:
            continue
        denominator += tail_members
        (sponsor,) = e.head
        if P.assignments[sponsor] == Xi:
            numerator += tail_members
    if denominator == 0:
        return None
    return numerator / denominator


def _sample_mean_affinity(samples, P, Xi, k):
    values = [affinity_head1(S, P, Xi, k) for S in samples]
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return fmean(defined)


def mean_affinity_ratio(
    H: DirectedHypergraph,
    P: CategoryPartition,
    Xi,
    samples=None,
    k_range=None,
    use_baseline: bool = False,
) -> MeanRatio:
    """Mean over k of the observed single-sponsor affinity divided by its
    reference: the sample mean, or the hypergeometric baseline.

    Sizes where either term is undefined (or the reference is zero) are
    skipped and reported in the result; all sizes undefined is an error.
    """
    if use_baseline == (samples is not None):
        raise ValueError("provide samples or set use_baseline, not both")
    if k_range is None:
        k_range = DEFAULT_SIZE_RANGE
    ratios = []
    skipped = []
    for k in k_range:
        observed = affinity_head1(H, P, Xi, k)
        if use_baseline:
            reference = affinity_baseline(P, Xi, 1, 1, k)
        else:
            reference = _sample_mean_affinity(samples, P, Xi, k)
        if observed is None or reference is None or reference == 0:
            skipped.append(k)
            continue
        ratios.append(observed / reference)
    if not ratios:
        raise ValueError("affinity undefined for every hyperedge size in range")
    return MeanRatio(fmean(ratios), tuple(skipped))


def edge_homophily_mass(H: DirectedHypergraph, P: CategoryPartition, Xi) -> float:
    """Total same-class tail fraction over hyperedges sponsored by class Xi.

    Each single-head hyperedge whose sponsor is in Xi contributes the fraction
    of its tail belonging to Xi; empty tails contribute nothing.
    """
    _check_category(P, Xi)
    total = 0.0
    for e in H.expanded_edges():
        if len(e.head) != 1:
            raise ValueError("homophily requires single-node heads")
        (sponsor,) = e.head
        if P.assignments[sponsor] != Xi or not e.tail:
            continue
        total += sum(1 for v in e.tail if P.assignments[v] == Xi) / len(e.tail)
    return total


def homophily(H: DirectedHypergraph, P: CategoryPartition, Xi, samples) -> HomophilyResult:
    """Observed homophily mass over its mean across samples.

    The ratio is None (undefined) when the sample mean vanishes; the observed
    mass and sample mean are always reported alongside.
    """
    observed = edge_homophily_mass(H, P, Xi)
    sample_mean = fmean([edge_homophily_mass(S, P, Xi) for S in samples])
    if sample_mean == 0:
        return HomophilyResult(None, observed, sample_mean)
    return HomophilyResult(observed / sample_mean, observed, sample_mean)


def affinity_report(
    H: DirectedHypergraph, P: CategoryPartition, samples_by_model: dict, k_range=None
) -> list:
    """Per (category, k) single-sponsor affinity rows: observed value,
    hypergeometric baseline, and mean/std/ratio per sampler model.

    Undefined quantities are carried as None so downstream serialization can
    mark them explicitly rather than coercing to zero.
    """
    if k_range is None:
        k_range = DEFAULT_SIZE_RANGE
    rows = []
    for category in P.categories:
        for k in k_range:
            observed = affinity_head1(H, P, category, k)
            models = {}
            for model, samples in samples_by_model.items():
                values = [affinity_head1(S, P, category, k) for S in samples]
                defined = [v for v in values if v is not None]
                if not defined:
                    models[model] = {"mean": None, "std": None, "ratio": None}
                    continue
                mean = fmean(defined)
                std = pstdev(defined)
                ratio = None
                if observed is not None and mean > 0:
                    ratio = observed / mean
                models[model] = {"mean": mean, "std": std, "ratio": ratio}
            rows.append(
                {
                    "category": category,
                    "k": k,
                    "observed": observed,
                    "baseline": affinity_baseline(P, category, 1, 1, k) if k >= 1 else None,
                    "models": models,
                }
            )
    return rows
