"""Nonlinear SIS contagion on undirected hypergraphs.

Each susceptible member of a hyperedge e with i_e infected members gets
infected at rate lam * i_e**nu, and infected nodes recover at rate mu, so a
hyperedge fires infection events at the aggregate rate s_e * lam * i_e**nu
and then picks one of its susceptible members uniformly.  Exact event-driven
simulation (Gillespie) keeps the per-edge rates in a sum tree for O(log m)
sampling and updating.  Stationary densities come either from a plain run,
which stops at the absorbing state, or from the quasi-stationary method,
which revives the chain from a buffer of recent snapshots whenever it
absorbs and thereby resolves endemic branches near and below threshold.
"""

from __future__ import annotations

import json
import math
import random
import statistics
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

from hypernull.core import UndirectedHypergraph
from hypernull.sampling import derive_seed

METHODS = ("stationary", "quasi-stationary")

# Events between full recomputations of the per-edge counters and rate tree.
RESYNC_EVERY = 100_000

# Fraction of the mean the two halves of the sample window may drift apart
# before the burn-in adequacy warning fires.
DRIFT_TOLERANCE = 0.01


class Thresholds(NamedTuple):
    """Invasion thresholds (linear and super-linear regime) and bistability
    threshold of a dataset, consumed as inputs when rescaling sweep output."""

    lambda_linear: float
    lambda_superlinear: float
    nu_bistable: float


DEFAULT_THRESHOLDS = {
    "lyon": Thresholds(0.0474, 0.0382, 2.5415),
    "high": Thresholds(0.0101, 0.0096, 2.4337),
    "email-enron": Thresholds(0.0060, 0.0025, 1.3182),
    "email-eu": Thresholds(0.0009, 0.0008, 1.2313),
}


def load_thresholds(path=None) -> dict:
    """Shipped default thresholds, overlaid with entries from a JSON file
    mapping dataset name to lambda_c_linear / lambda_c_superlinear / nu_c."""
    merged = dict(DEFAULT_THRESHOLDS)
    if path is None:
        return merged
    with open(path, encoding="utf-8") as handle:
        raw = json.load(handle)
    for name, entry in raw.items():
        try:
            merged[name] = Thresholds(
                float(entry["lambda_c_linear"]),
                float(entry["lambda_c_superlinear"]),
                float(entry["nu_c"]),
            )
        except KeyError as missing:
            raise ValueError(
                f"thresholds entry {name!r} is missing key {missing}"
            ) from None
    return merged


@dataclass(frozen=True)
class SISConfig:
    """Parameters of one SIS run: rates, initial density, and the burn-in /
    sampling / snapshot clocks (all in simulated time units)."""

    lam: float
    nu: float
    mu: float = 1.0
    rho0: float = 0.01
    burn_in: float = 10_000.0
    sample_count: int = 10_000
    decorrelation: float = 1.0
    qs_history_size: int = 50
    snapshot_interval: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        if self.lam < 0 or self.mu < 0 or self.nu < 0:
            raise ValueError("rates and the non-linearity exponent must be >= 0")
        if not 0.0 <= self.rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in [0, 1], got {self.rho0}")
        if self.burn_in < 0:
            raise ValueError("burn-in must be >= 0")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.decorrelation <= 0:
            raise ValueError("decorrelation period must be > 0")
        if self.qs_history_size < 1:
            raise ValueError("qs_history_size must be >= 1")
        if self.snapshot_interval <= 0:
            raise ValueError("snapshot interval must be > 0")


class Event(NamedTuple):
    """One committed transition: the clock after it fired, its kind
    ("infection" or "recovery"), and the toggled node."""

    time: float
    kind: str
    node: int


class StationaryResult(NamedTuple):
    """Mean and standard deviation of the sampled infected density; absorbed
    reports early absorption (plain runs) or any buffer revival (QS runs)."""

    mean: float
    std: float
    absorbed: bool


class SweepPoint(NamedTuple):
    """One phase-diagram point: infection rate, rate over the supplied
    invasion threshold (None when no threshold was given), density mean and
    standard deviation, estimation method, and the absorption flag."""

    lam: float
    rescaled: float | None
    rho_mean: float
    rho_std: float
    method: str
    absorbed: bool


class SumTree:
    """Fixed-capacity sum tree over non-negative leaf values: point update
    and prefix-sum descent both in O(log n)."""

    def __init__(self, values):
        values = list(values)
        self.count = len(values)
        size = 1
        while size < max(self.count, 1):
            size *= 2
        self.size = size
        self.nodes = [0.0] * (2 * size)
        self.nodes[size : size + self.count] = values
        for i in range(size - 1, 0, -1):
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1]

    def total(self) -> float:
        return self.nodes[1]

    def get(self, index: int) -> float:
        return self.nodes[self.size + index]

    def set(self, index: int, value: float):
        i = self.size + index
        self.nodes[i] = value
        i //= 2
        while i:
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1]
            i //= 2

    def find(self, target: float) -> int:
        """Index of the first leaf whose cumulative sum exceeds target."""
        i = 1
        while i < self.size:
            left = self.nodes[2 * i]
            if target < left:
                i = 2 * i
            else:
                target -= left
                i = 2 * i + 1
        # Rounding in the internal sums can, very rarely, push the descent
        # past the last live leaf or onto a dead one; clamp, then walk to the
        # nearest leaf with mass.
        index = min(i - self.size, self.count - 1)
        while self.nodes[self.size + index] == 0.0 and index > 0:
            index -= 1
        while self.nodes[self.size + index] == 0.0 and index < self.count - 1:
            index += 1
        return index


class SISState:
    """Dynamic state of one simulation: infected set, per-edge infected and
    susceptible counts, and the aggregate event rates.

    Invariants: infected_per_edge[e] + susceptible_per_edge[e] == |e| after
    every event, recovery_rate == mu * infected_count, and the rate tree
    matches the recomputed per-edge rates (resync() restores the latter
    exactly; gillespie_step calls it every RESYNC_EVERY events).
    """

    def __init__(self, num_nodes, edges, cfg: SISConfig, infected_nodes=()):
        self.num_nodes = num_nodes
        self.edges = [tuple(sorted(e)) for e in edges]
        self.lam = cfg.lam
        self.nu = cfg.nu
        self.mu = cfg.mu
        incidence = [[] for _ in range(num_nodes)]
        for index, edge in enumerate(self.edges):
            for v in edge:
                incidence[v].append(index)
        self.incidence = incidence
        self.clock = 0.0
        self.events_since_resync = 0
        self.reset_infected(infected_nodes)

    def reset_infected(self, infected_nodes):
        """Reinitialize the infected set and rebuild every derived counter."""
        self.infected = bytearray(self.num_nodes)
        self.infected_list = []
        self.position = [-1] * self.num_nodes
        for v in infected_nodes:
            if not self.infected[v]:
                self.infected[v] = 1
                self.position[v] = len(self.infected_list)
                self.infected_list.append(v)
        self.infected_count = len(self.infected_list)
        self.resync()

    def resync(self):
        """Recompute per-edge counters and rates from the node states."""
        self.infected_per_edge = [
            sum(self.infected[v] for v in edge) for edge in self.edges
        ]
        self.susceptible_per_edge = [
            len(edge) - i for edge, i in zip(self.edges, self.infected_per_edge)
        ]
        self.rates = SumTree(
            self._edge_rate(i, s)
            for i, s in zip(self.infected_per_edge, self.susceptible_per_edge)
        )
        self.recovery_rate = self.mu * self.infected_count
        self.events_since_resync = 0

    def _edge_rate(self, infected, susceptible) -> float:
        if infected == 0 or susceptible == 0:
            return 0.0
        return susceptible * self.lam * infected**self.nu

    def total_rate(self) -> float:
        return self.recovery_rate + self.rates.total()

    def rho(self) -> float:
        return self.infected_count / self.num_nodes

    def snapshot(self) -> tuple:
        return tuple(self.infected_list)

    def draw_event(self, rng: random.Random):
        """Pick the next event proportionally to the current rates without
        committing it; returns (kind, node)."""
        total = self.total_rate()
        target = rng.random() * total
        if target < self.recovery_rate:
            node = self.infected_list[rng.randrange(self.infected_count)]
            return "recovery", node
        edge = self.edges[self.rates.find(target - self.recovery_rate)]
        susceptibles = [v for v in edge if not self.infected[v]]
        return "infection", susceptibles[rng.randrange(len(susceptibles))]

    def apply(self, kind: str, node: int):
        """Commit a toggle and update the counters of every incident edge."""
        if kind == "recovery":
            self.infected[node] = 0
            last = self.infected_list.pop()
            slot = self.position[node]
            if last != node:
                self.infected_list[slot] = last
                self.position[last] = slot
            self.position[node] = -1
            self.infected_count -= 1
            delta = -1
        else:
            self.infected[node] = 1
            self.position[node] = len(self.infected_list)
            self.infected_list.append(node)
            self.infected_count += 1
            delta = 1
        self.recovery_rate = self.mu * self.infected_count
        for index in self.incidence[node]:
            i = self.infected_per_edge[index] + delta
            s = self.susceptible_per_edge[index] - delta
            self.infected_per_edge[index] = i
            self.susceptible_per_edge[index] = s
            self.rates.set(index, self._edge_rate(i, s))
        self.events_since_resync += 1
        if self.events_since_resync >= RESYNC_EVERY:
            self.resync()


def make_sis_state(
    H: UndirectedHypergraph, infected_nodes, cfg: SISConfig
) -> SISState:
    """State for H with the given nodes initially infected."""
    return SISState(H.num_nodes, H.edges, cfg, infected_nodes)


def gillespie_step(state: SISState, rng: random.Random):
    """Advance one event: exponential waiting time at the total rate, event
    choice proportional to the individual rates, incremental state update.
    Returns the committed Event, or None when no event can fire (the
    absorbing state, or a fully frozen configuration when mu == 0)."""
    total = state.total_rate()
    if total <= 0.0:
        return None
    state.clock += rng.expovariate(total)
    kind, node = state.draw_event(rng)
    state.apply(kind, node)
    return Event(state.clock, kind, node)


def _initial_infected(num_nodes: int, rho0: float, rng: random.Random) -> list:
    return rng.sample(range(num_nodes), math.ceil(rho0 * num_nodes))


def _summarize(samples, absorbed: bool) -> StationaryResult:
    mean = statistics.fmean(samples)
    std = statistics.pstdev(samples)
    if len(samples) >= 20 and mean > 0:
        half = len(samples) // 2
        drift = abs(
            statistics.fmean(samples[half:]) - statistics.fmean(samples[:half])
        )
        if drift > DRIFT_TOLERANCE * mean:
            warnings.warn(
                "infected density is still drifting across the sampling "
                "window; consider a longer burn-in",
                RuntimeWarning,
                stacklevel=3,
            )
    return StationaryResult(mean, std, absorbed)


def _run(H: UndirectedHypergraph, cfg: SISConfig, quasi_stationary: bool):
    rng = random.Random(cfg.seed)
    initial = _initial_infected(H.num_nodes, cfg.rho0, rng)
    state = make_sis_state(H, initial, cfg)
    buffer = []
    revived = False
    samples = []
    next_sample = cfg.burn_in + cfg.decorrelation
    next_snapshot = cfg.snapshot_interval
    while len(samples) < cfg.sample_count:
        total = state.total_rate()
        if total <= 0.0:
            if state.infected_count > 0:
                # mu == 0 with nothing left to infect: the configuration is
                # frozen, so every remaining sample reads the same density.
                samples.extend([state.rho()] * (cfg.sample_count - len(samples)))
                break
            if not quasi_stationary:
                return StationaryResult(0.0, 0.0, True)
            revived = True
            restored = rng.choice(buffer) if buffer else initial
            if not restored:
                return StationaryResult(0.0, 0.0, True)
            state.reset_infected(restored)
            continue
        event_time = state.clock + rng.expovariate(total)
        if quasi_stationary:
            while next_snapshot <= event_time:
                buffer.append(state.snapshot())
                if len(buffer) > cfg.qs_history_size:
                    buffer.pop(0)
                next_snapshot += cfg.snapshot_interval
        while next_sample <= event_time and len(samples) < cfg.sample_count:
            samples.append(state.rho())
            next_sample += cfg.decorrelation
        if len(samples) == cfg.sample_count:
            break
        state.clock = event_time
        kind, node = state.draw_event(rng)
        state.apply(kind, node)
    return _summarize(samples, revived)


def run_stationary(H: UndirectedHypergraph, cfg: SISConfig) -> StationaryResult:
    """Plain stationary estimate: seed ceil(rho0 * |V|) uniform infected
    nodes, burn in, then record the density every decorrelation period.
    Absorption at any point ends the run with (0, 0, absorbed=True)."""
    return _run(H, cfg, quasi_stationary=False)


def run_quasi_stationary(
    H: UndirectedHypergraph, cfg: SISConfig
) -> StationaryResult:
    """Stationary estimate with the quasi-stationary revival rule: a buffer
    of the last qs_history_size snapshots (one per snapshot_interval of
    simulated time) replaces the state uniformly at random whenever the
    absorbing state is reached; before the first snapshot exists the run
    falls back to its initial condition.  The absorbed flag reports whether
    any revival happened (a sub-threshold signature)."""
    return _run(H, cfg, quasi_stationary=True)


def phase_sweep(
    H: UndirectedHypergraph,
    lambda_grid,
    cfg: SISConfig,
    method="stationary",
    lambda_c: float | None = None,
) -> list:
    """One stationary estimate per infection rate in lambda_grid.

    method is a single name or one name per grid point ("stationary" or
    "quasi-stationary"); each point runs on its own sub-seed derived from
    cfg.seed, so the curve is reproducible and points are independent.
    lambda_c fills the rescaled column (lam / lambda_c) when supplied.
    """
    grid = [float(lam) for lam in lambda_grid]
    if isinstance(method, str):
        methods = [method] * len(grid)
    else:
        methods = list(method)
        if len(methods) != len(grid):
            raise ValueError(
                f"{len(grid)} grid points but {len(methods)} method entries"
            )
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown method(s): {sorted(unknown)}")
    curve = []
    for index, (lam, name) in enumerate(zip(grid, methods)):
        point_cfg = replace(
            cfg, lam=lam, seed=derive_seed(cfg.seed or 0, "sweep", index)
        )
        runner = run_stationary if name == "stationary" else run_quasi_stationary
        result = runner(H, point_cfg)
        curve.append(
            SweepPoint(
                lam,
                lam / lambda_c if lambda_c else None,
                result.mean,
                result.std,
                name,
                result.absorbed,
            )
        )
    return curve
