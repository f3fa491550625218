"""Decentralized greedy over a communication graph: message schedules, link
failures, the realized information-sharing digraph, and its analytics.

Agents own disjoint blocks of the ground set (block i belongs to agent i) and
see only their own block, their budget, and whatever picks reach them through
messages.  A run is deterministic given the schedule and the drop pattern;
independent trials derive per-trial seeds, so sweeps are reproducible no
matter how they are scheduled.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bruteforce import brute_force_opt
from .core import CallCounter, Subset, ValueOracle
from .greedy import GreedyTrace
from .matroids import PartitionMatroid


class DisconnectedGraphError(ValueError):
    """No covering walk exists on a disconnected communication graph."""


@dataclass(frozen=True)
class CommGraph:
    """Simple undirected graph over agents 0..n_agents-1."""

    n_agents: int
    edges: frozenset

    @classmethod
    def from_edges(cls, n_agents: int, edges) -> "CommGraph":
        if n_agents < 1:
            raise ValueError("need at least one agent")
        canon = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at agent {a}")
            if not (0 <= a < n_agents and 0 <= b < n_agents):
                raise ValueError(f"edge ({a}, {b}) outside agent range")
            canon.add((min(a, b), max(a, b)))
        return cls(n_agents, frozenset(canon))

    def neighbors(self, i: int) -> tuple:
        out = [b if a == i else a for a, b in self.edges if i in (a, b)]
        return tuple(sorted(out))

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def is_connected(self) -> bool:
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for u in self.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        return len(seen) == self.n_agents


@dataclass(frozen=True)
class MessageSchedule:
    """Walk along graph edges that visits every agent at least once."""

    graph: CommGraph
    walk: tuple
    hamiltonian: bool = field(init=False)
    optimal: bool = True

    def __post_init__(self):
        n = self.graph.n_agents
        if not self.walk:
            raise ValueError("empty walk")
        for v in self.walk:
            if not 0 <= v < n:
                raise ValueError(f"walk visits unknown agent {v}")
        for a, b in zip(self.walk, self.walk[1:]):
            if not self.graph.has_edge(a, b):
                raise ValueError(f"walk step ({a}, {b}) is not a graph edge")
        if len(set(self.walk)) != n:
            raise ValueError("walk must cover every agent")
        object.__setattr__(self, "hamiltonian", len(self.walk) == n)

    @property
    def revisits(self) -> int:
        return len(self.walk) - self.graph.n_agents

    def first_visit_order(self) -> tuple:
        seen = []
        for v in self.walk:
            if v not in seen:
                seen.append(v)
        return tuple(seen)


def find_message_sequence(graph: CommGraph, exact_limit: int = 12) -> MessageSchedule:
    """Shortest covering walk, lexicographically smallest among the shortest.

    An exact search over (vertex, visited-set) states runs up to
    ``exact_limit`` agents; it returns a true shortest walk, which has no
    revisits exactly when the graph admits a single-visit path.  Larger graphs
    fall back to a nearest-unvisited heuristic flagged non-optimal.
    """
    n = graph.n_agents
    if not graph.is_connected():
        raise DisconnectedGraphError("communication graph is disconnected")
    if n == 1:
        return MessageSchedule(graph, (0,))
    if n > exact_limit:
        return MessageSchedule(graph, _nearest_neighbor_walk(graph), optimal=False)
    return MessageSchedule(graph, _exact_shortest_walk(graph), optimal=True)


def _exact_shortest_walk(graph: CommGraph) -> tuple:
    n = graph.n_agents
    full = (1 << n) - 1
    neighbors = [graph.neighbors(v) for v in range(n)]
    # Backward BFS on (vertex, visited) states: remaining hops to coverage.
    remaining = {(v, full): 0 for v in range(n)}
    current = list(remaining)
    hops = 0
    while current:
        hops += 1
        nxt = []
        for v, visited in current:
            # A predecessor state (u, prev) steps to (v, visited) when
            # prev | bit(v) == visited and u is adjacent to v.
            bit_v = 1 << v
            if not visited & bit_v:
                continue
            for prev in (visited, visited ^ bit_v):
                for u in neighbors[v]:
                    if not prev >> u & 1:
                        continue
                    state = (u, prev)
                    if state not in remaining:
                        remaining[state] = hops
                        nxt.append(state)
        current = nxt
    best_len = min(remaining.get((v, 1 << v), math.inf) for v in range(n))
    if math.isinf(best_len):
        raise DisconnectedGraphError("no covering walk found")
    start = min(v for v in range(n) if remaining.get((v, 1 << v)) == best_len)
    walk = [start]
    visited = 1 << start
    left = best_len
    v = start
    while left:
        for u in neighbors[v]:
            state = (u, visited | (1 << u))
            if remaining.get(state) == left - 1:
                walk.append(u)
                visited |= 1 << u
                v = u
                left -= 1
                break
        else:
            raise RuntimeError("walk reconstruction lost the shortest path")
    return tuple(walk)


def _nearest_neighbor_walk(graph: CommGraph) -> tuple:
    n = graph.n_agents
    dist, via = _all_pairs_shortest(graph)
    walk = [0]
    unvisited = set(range(n)) - {0}
    v = 0
    while unvisited:
        target = min(unvisited, key=lambda u: (dist[v][u], u))
        walk.extend(_expand_path(via, v, target))
        unvisited -= set(walk)
        v = target
    return tuple(walk)


def _all_pairs_shortest(graph: CommGraph):
    n = graph.n_agents
    dist = [[math.inf] * n for _ in range(n)]
    via = [[None] * n for _ in range(n)]
    for s in range(n):
        dist[s][s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for u in graph.neighbors(v):
                    if dist[s][u] > dist[s][v] + 1:
                        dist[s][u] = dist[s][v] + 1
                        via[s][u] = v
                        nxt.append(u)
            frontier = nxt
    return dist, via


def _expand_path(via, s: int, t: int) -> list:
    path = [t]
    while path[-1] != s:
        path.append(via[s][path[-1]])
    path.reverse()
    return path[1:]


@dataclass(frozen=True)
class DropModel:
    """Per-hop message-loss model: none, Bernoulli successes, or an explicit
    set of failed hop indices.  A drop destroys the in-flight copy only."""

    mode: str = "none"
    p_success: float = 1.0
    failed_hops: frozenset = frozenset()
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("none", "bernoulli", "explicit"):
            raise ValueError(f"unknown drop mode {self.mode!r}")
        if not 0.0 <= self.p_success <= 1.0:
            raise ValueError("p_success must lie in [0, 1]")

    def realize(self, n_hops: int) -> tuple:
        if self.mode == "none":
            return tuple(True for _ in range(n_hops))
        if self.mode == "explicit":
            return tuple(k not in self.failed_hops for k in range(n_hops))
        rng = np.random.default_rng(self.seed)
        return tuple(bool(b) for b in rng.random(n_hops) < self.p_success)


@dataclass(frozen=True)
class InfoGraph:
    """Directed record of whose picks reached whom before deciding: an edge
    (i, j) means agent j already knew agent i's picks when it chose."""

    n_agents: int
    edges: frozenset

    def in_neighbors(self, j: int) -> tuple:
        return tuple(sorted(i for i, jj in self.edges if jj == j))

    def undirected_adjacency(self) -> list:
        adj = [0] * self.n_agents
        for i, j in self.edges:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return adj


def run_distributed_sg(f: ValueOracle, matroid: PartitionMatroid,
                       schedule: MessageSchedule, drops: DropModel):
    """Simulate blockwise greedy driven by sequential message passing.

    Each agent decides at its first visit in the walk, making its budget of
    greedy picks from its own block conditioned only on the picks that have
    reached it; each hop then forwards everything the sender knows, subject to
    the drop model.  Returns (final set, realized info graph, trace).
    """
    n_agents = schedule.graph.n_agents
    if len(matroid.blocks) != n_agents:
        raise ValueError("one block per agent required")
    counter = CallCounter(f)
    n = f.n
    success = drops.realize(len(schedule.walk) - 1)

    known_origins = [set() for _ in range(n_agents)]  # other agents whose picks arrived
    picks_of = {}
    provenance = {}
    picks = []
    calls_per_step = []

    for idx, agent in enumerate(schedule.walk):
        if agent not in picks_of:
            provenance[agent] = tuple(sorted(known_origins[agent]))
            context = Subset.empty(n)
            for origin in provenance[agent]:
                for p in picks_of[origin]:
                    context = context.add(p)
            own = []
            current = counter(context)
            block = matroid.blocks[agent]
            for _ in range(matroid.kappas[agent]):
                best_p, best_value = -1, -math.inf
                calls = 0
                for p in block:
                    if p in context:
                        continue
                    value = counter(context.add(p))
                    calls += 1
                    if value > best_value:
                        best_p, best_value = p, value
                picks.append((best_p, best_value - current))
                calls_per_step.append(calls)
                own.append(best_p)
                context = context.add(best_p)
                current = best_value
            picks_of[agent] = tuple(own)
        if idx + 1 < len(schedule.walk) and success[idx]:
            receiver = schedule.walk[idx + 1]
            known_origins[receiver] |= known_origins[agent] | {agent}
            known_origins[receiver].discard(receiver)

    final = Subset.of(n, [p for chosen in picks_of.values() for p in chosen])
    value = counter(final)
    edges = frozenset((i, j) for j, origins in provenance.items() for i in origins)
    info = InfoGraph(n_agents, edges)
    trace = GreedyTrace("distributed-sg", tuple(picks), tuple(calls_per_step),
                        final, float(value), counter.calls)
    return final, info, trace


def clique_number(info: InfoGraph) -> int:
    """Largest mutually informed agent group: maximum clique of the undirected
    closure, found by branch and bound.  An isolated agent still counts 1."""
    n = info.n_agents
    if n > 20:
        raise ValueError(f"exact clique search is limited to 20 agents, got {n}")
    if n == 0:
        return 0
    adj = info.undirected_adjacency()
    best = 1

    def expand(candidates: int, size: int):
        nonlocal best
        if size + candidates.bit_count() <= best:
            return
        if not candidates:
            best = max(best, size)
            return
        while candidates:
            if size + candidates.bit_count() <= best:
                return
            low = candidates & -candidates
            v = low.bit_length() - 1
            candidates ^= low
            expand(candidates & adj[v], size + 1)

    expand((1 << n) - 1, 0)
    return best


def gap_bound_incomplete(n_agents: int, omega: int) -> float:
    """Guaranteed ratio under incomplete information sharing: 1/(2 + N - omega),
    which recovers 1/2 when every agent informed every other."""
    if not 1 <= omega <= n_agents:
        raise ValueError(f"clique number must lie in [1, {n_agents}], got {omega}")
    return 1.0 / (2.0 + n_agents - omega)


@dataclass(frozen=True)
class SweepResult:
    """Per-trial rows plus one summary row per success probability."""

    trials: tuple
    summary: tuple


def bernoulli_sweep(f: ValueOracle, matroid: PartitionMatroid,
                    schedule: MessageSchedule, p_grid, trials: int,
                    seed: int) -> SweepResult:
    """Seeded study of the ratio-vs-reliability curve.

    For each success probability, runs the simulator ``trials`` times with
    per-trial derived drop seeds and records the realized ratio and clique
    number; the summary reports mean/min ratio and mean clique number per
    probability (any monotonicity in p is reported, not asserted).
    """
    _, opt = brute_force_opt(f, matroid)
    rows = []
    summary = []
    for p_idx, p in enumerate(p_grid):
        ratios = []
        omegas = []
        for trial in range(trials):
            drop_seed = int(np.random.default_rng([seed, p_idx, trial]).integers(2 ** 63))
            drops = DropModel("bernoulli", float(p), seed=drop_seed)
            final, info, _ = run_distributed_sg(f, matroid, schedule, drops)
            ratio = 1.0 if opt <= 0 else f(final) / opt
            omega = clique_number(info)
            ratios.append(ratio)
            omegas.append(omega)
            rows.append({
                "trial": trial,
                "p": float(p),
                "ratio": ratio,
                "omega": omega,
                "hamiltonian_flag": schedule.hamiltonian,
            })
        summary.append({
            "p": float(p),
            "mean_ratio": float(np.mean(ratios)),
            "min_ratio": float(np.min(ratios)),
            "mean_omega": float(np.mean(omegas)),
        })
    return SweepResult(tuple(rows), tuple(summary))
