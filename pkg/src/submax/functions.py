"""Concrete set-function oracles and seeded instance generators.

Instances are plain frozen dataclasses (hashable, serializable); the oracle
adapters hold the numpy precomputations.  All generators take an explicit rng
so every random artifact in the repo flows from named seeds.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import GroundSet, Subset, ValueOracle
from .matroids import PartitionMatroid

EPS_RANK = 1e-7


# ---------------------------------------------------------------------------
# modular

@dataclass(frozen=True)
class ModularInstance:
    """Nonnegative per-element weights."""

    weights: tuple

    def __post_init__(self):
        if not self.weights or any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonempty and nonnegative")


class ModularOracle(ValueOracle):
    def __init__(self, instance: ModularInstance, name: str = "modular"):
        w = np.asarray(instance.weights, dtype=float)
        super().__init__(len(w), name, value_bound=float(w.sum()), curvature_hint=0.0)
        self.instance = instance
        self._w = w

    def value_of_mask(self, mask: int) -> float:
        total = 0.0
        while mask:
            low = mask & -mask
            total += self._w[low.bit_length() - 1]
            mask ^= low
        return float(total)


# ---------------------------------------------------------------------------
# weighted coverage

@dataclass(frozen=True)
class CoverageInstance:
    """Weighted universe items and, per ground-set element, the items it covers."""

    item_weights: tuple
    cover_sets: tuple  # tuple of sorted item-index tuples, one per element

    def __post_init__(self):
        if any(w < 0 for w in self.item_weights):
            raise ValueError("item weights must be nonnegative")
        m = len(self.item_weights)
        for cover in self.cover_sets:
            for item in cover:
                if not 0 <= item < m:
                    raise ValueError(f"covered item {item} outside universe of size {m}")


class CoverageOracle(ValueOracle):
    def __init__(self, instance: CoverageInstance, name: str = "coverage"):
        super().__init__(len(instance.cover_sets), name)
        self.instance = instance
        self._w = np.asarray(instance.item_weights, dtype=float)
        self._cover_masks = tuple(
            sum(1 << item for item in cover) for cover in instance.cover_sets)
        union = 0
        for cover_mask in self._cover_masks:
            union |= cover_mask
        self.value_bound = self._union_weight(union)

    def _union_weight(self, union: int) -> float:
        total = 0.0
        while union:
            low = union & -union
            total += self._w[low.bit_length() - 1]
            union ^= low
        return float(total)

    def value_of_mask(self, mask: int) -> float:
        union = 0
        while mask:
            low = mask & -mask
            union |= self._cover_masks[low.bit_length() - 1]
            mask ^= low
        return self._union_weight(union)


def coverage_value(instance: CoverageInstance, subset: Subset) -> float:
    """Total weight of the items covered by the chosen elements."""
    return CoverageOracle(instance).evaluate(subset)


# ---------------------------------------------------------------------------
# exemplar selection

@dataclass(frozen=True)
class ExemplarInstance:
    """Candidate points, data points, and a phantom reference point.

    Dissimilarities default to Euclidean distances between the stored 2-D
    coordinates; pass explicit ``dissimilarity`` (candidates x data) and
    ``phantom_dissimilarity`` rows to model asymmetric costs.
    """

    candidates: tuple  # ((x, y), ...)
    data_points: tuple
    phantom: tuple     # (x, y)
    dissimilarity: tuple | None = None
    phantom_dissimilarity: tuple | None = None

    def __post_init__(self):
        if not self.candidates or not self.data_points:
            raise ValueError("need at least one candidate and one data point")
        if self.dissimilarity is not None:
            if len(self.dissimilarity) != len(self.candidates):
                raise ValueError("one dissimilarity row per candidate required")
            for row in self.dissimilarity:
                if len(row) != len(self.data_points) or any(d < 0 for d in row):
                    raise ValueError("dissimilarities must be nonnegative, one per data point")
        if self.phantom_dissimilarity is not None and (
                len(self.phantom_dissimilarity) != len(self.data_points)
                or any(d < 0 for d in self.phantom_dissimilarity)):
            raise ValueError("phantom dissimilarities must be nonnegative, one per data point")


def _exemplar_matrices(instance: ExemplarInstance):
    if instance.dissimilarity is not None:
        dist = np.asarray(instance.dissimilarity, dtype=float)
    else:
        cand = np.asarray(instance.candidates, dtype=float)
        data = np.asarray(instance.data_points, dtype=float)
        dist = np.linalg.norm(cand[:, None, :] - data[None, :, :], axis=2)
    if instance.phantom_dissimilarity is not None:
        phantom = np.asarray(instance.phantom_dissimilarity, dtype=float)
    else:
        data = np.asarray(instance.data_points, dtype=float)
        phantom = np.linalg.norm(np.asarray(instance.phantom, dtype=float)[None, :] - data,
                                 axis=1)
    return dist, phantom


def exemplar_loss(instance: ExemplarInstance, chosen: Subset, *,
                  mode: str = "kmedoid", include_phantom: bool = False) -> float:
    """Representation loss of the chosen candidates.

    ``kmedoid`` (default): every data point is served by its nearest chosen
    point, and the per-data-point costs are summed.  ``mean``: average over
    the chosen points of each point's distance to its nearest data point.
    Only the k-medoid form makes the derived utility monotone submodular.
    """
    dist, phantom = _exemplar_matrices(instance)
    rows = [dist[p] for p in chosen]
    if include_phantom:
        rows.append(phantom)
    if not rows:
        raise ValueError("loss of an empty selection is undefined")
    stacked = np.stack(rows)
    if mode == "kmedoid":
        return float(stacked.min(axis=0).sum())
    if mode == "mean":
        return float(stacked.min(axis=1).mean())
    raise ValueError(f"unknown mode {mode!r}")


def exemplar_utility(instance: ExemplarInstance, chosen: Subset, *,
                     mode: str = "kmedoid") -> float:
    """Loss reduction of the chosen candidates relative to the phantom alone."""
    n = len(instance.candidates)
    base = exemplar_loss(instance, Subset.empty(n), mode=mode, include_phantom=True)
    return base - exemplar_loss(instance, chosen, mode=mode, include_phantom=True)


class ExemplarOracle(ValueOracle):
    """K-medoid exemplar utility; normal, monotone, and submodular."""

    def __init__(self, instance: ExemplarInstance, name: str = "exemplar"):
        super().__init__(len(instance.candidates), name)
        self.instance = instance
        self._dist, self._phantom = _exemplar_matrices(instance)
        self._base = float(self._phantom.sum())
        self.value_bound = self.value_of_mask((1 << self.n) - 1)

    def value_of_mask(self, mask: int) -> float:
        best = self._phantom
        rows = []
        while mask:
            low = mask & -mask
            rows.append(low.bit_length() - 1)
            mask ^= low
        if rows:
            best = np.minimum(self._dist[rows].min(axis=0), best)
        return self._base - float(best.sum())


# ---------------------------------------------------------------------------
# measurement-rank objective

@dataclass(frozen=True)
class RankInstance:
    """Fixed base equation rows plus one selectable measurement row per element."""

    base_rows: tuple       # tuple of row tuples (may be empty)
    candidate_rows: tuple  # one row tuple per ground-set element

    def __post_init__(self):
        if not self.candidate_rows:
            raise ValueError("need at least one candidate row")
        width = len(self.candidate_rows[0])
        for row in tuple(self.base_rows) + tuple(self.candidate_rows):
            if len(row) != width:
                raise ValueError("all rows must have identical width")


def row_elimination_rank(rows: np.ndarray, rel_tol: float = EPS_RANK) -> int:
    """Matrix rank by Gaussian elimination with partial pivoting.

    Pivots below rel_tol times the largest absolute entry of the input are
    treated as zero.
    """
    a = np.array(rows, dtype=float)
    if a.size == 0:
        return 0
    tol = rel_tol * np.abs(a).max()
    if tol == 0.0:
        return 0
    n_rows, n_cols = a.shape
    rank = 0
    for col in range(n_cols):
        piv = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[piv, col]) <= tol:
            continue
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        below = a[rank + 1:, col] / a[rank, col]
        a[rank + 1:] -= np.outer(below, a[rank])
        rank += 1
        if rank == n_rows:
            break
    return rank


def _stack_rows(instance: RankInstance, mask: int) -> np.ndarray:
    rows = [list(r) for r in instance.base_rows]
    for p in range(len(instance.candidate_rows)):
        if mask >> p & 1:
            rows.append(list(instance.candidate_rows[p]))
    if not rows:
        return np.zeros((0, len(instance.candidate_rows[0])))
    return np.asarray(rows, dtype=float)


def rank_value(instance: RankInstance, measured: Subset) -> float:
    """Rank of the base rows stacked with the selected measurement rows."""
    return float(row_elimination_rank(_stack_rows(instance, measured.mask)))


class RankOracle(ValueOracle):
    """Rank gain of the selected measurement rows over the base rows alone.

    Subtracting the base rank keeps the oracle normal; monotonicity and
    submodularity are inherited from matrix rank.
    """

    def __init__(self, instance: RankInstance, name: str = "rank"):
        super().__init__(len(instance.candidate_rows), name)
        self.instance = instance
        self._base_rank = row_elimination_rank(_stack_rows(instance, 0))
        self.value_bound = float(
            row_elimination_rank(_stack_rows(instance, (1 << self.n) - 1))
            - self._base_rank)

    def value_of_mask(self, mask: int) -> float:
        return float(row_elimination_rank(_stack_rows(self.instance, mask))
                     - self._base_rank)


# ---------------------------------------------------------------------------
# simple analytic oracles (tests, decoys)

class BoundedCardinalityOracle(ValueOracle):
    """f(S) = min(|S|, cap); curvature 1 whenever cap < n."""

    def __init__(self, n: int, cap: int = 1, name: str = "bounded-cardinality"):
        super().__init__(n, name, value_bound=float(cap))
        self.cap = cap

    def value_of_mask(self, mask: int) -> float:
        return float(min(mask.bit_count(), self.cap))


class CardinalityPowerOracle(ValueOracle):
    """f(S) = |S| ** exponent; supermodular for exponent > 1 (decoy)."""

    def __init__(self, n: int, exponent: float = 2.0, name: str = "cardinality-power"):
        super().__init__(n, name, value_bound=float(n) ** exponent)
        self.exponent = exponent

    def value_of_mask(self, mask: int) -> float:
        return float(mask.bit_count()) ** self.exponent


# ---------------------------------------------------------------------------
# welfare lift

class WelfareOracle(ValueOracle):
    """Sum of per-agent utilities over the items assigned to each agent.

    Ground-set element i * N + j means "give item i to agent j".
    """

    def __init__(self, local_oracles, m: int, name: str = "welfare"):
        self.locals = tuple(local_oracles)
        self.m = m
        for f in self.locals:
            if f.n != m:
                raise ValueError("every local oracle must range over the item set")
        bound = sum(f.value_bound for f in self.locals) if all(
            f.value_bound is not None for f in self.locals) else None
        super().__init__(m * len(self.locals), name, value_bound=bound)

    def value_of_mask(self, mask: int) -> float:
        n_agents = len(self.locals)
        item_masks = [0] * n_agents
        while mask:
            low = mask & -mask
            e = low.bit_length() - 1
            item_masks[e % n_agents] |= 1 << (e // n_agents)
            mask ^= low
        return sum(f.value_of_mask(item_masks[j]) for j, f in enumerate(self.locals))


def welfare_lift(local_oracles, m: int):
    """Cast item assignment across agents as a partition-constrained problem.

    Returns the lifted ground set of (item, agent) pairs, the summed oracle,
    and the partition matroid with one budget-1 block per item, so each item
    goes to at most one agent.
    """
    oracles = tuple(local_oracles)
    n_agents = len(oracles)
    if n_agents < 1 or m < 1:
        raise ValueError("need at least one agent and one item")
    n = m * n_agents
    blocks = [
        Subset.of(n, [i * n_agents + j for j in range(n_agents)]) for i in range(m)
    ]
    matroid = PartitionMatroid(tuple(blocks), tuple(1 for _ in range(m)))
    return GroundSet(n), WelfareOracle(oracles, m), matroid


# ---------------------------------------------------------------------------
# lifted exemplar instance for the multi-agent setting

class LiftedPointOracle(ValueOracle):
    """Evaluates a point-set oracle on the deduplicated points behind
    (agent, point) pairs; pairs from different agents may share a point."""

    def __init__(self, inner: ValueOracle, point_ids: tuple, name: str | None = None):
        super().__init__(len(point_ids), name or f"lifted-{inner.name}",
                         value_bound=inner.value_bound)
        self.inner = inner
        self.point_ids = tuple(point_ids)

    def value_of_mask(self, mask: int) -> float:
        point_mask = 0
        while mask:
            low = mask & -mask
            point_mask |= 1 << self.point_ids[low.bit_length() - 1]
            mask ^= low
        return self.inner.value_of_mask(point_mask)


# ---------------------------------------------------------------------------
# seeded generators

def random_modular_instance(n: int, rng: np.random.Generator) -> ModularInstance:
    return ModularInstance(tuple(float(w) for w in rng.uniform(0.5, 2.5, size=n)))


def random_coverage_instance(n: int, rng: np.random.Generator,
                             n_items: int | None = None) -> CoverageInstance:
    m = n_items if n_items is not None else 2 * n
    weights = tuple(float(w) for w in rng.uniform(0.2, 1.0, size=m))
    covers = []
    for _ in range(n):
        size = int(rng.integers(1, min(4, m) + 1))
        covers.append(tuple(sorted(int(i) for i in rng.choice(m, size=size, replace=False))))
    return CoverageInstance(weights, tuple(covers))


def random_exemplar_instance(n: int, rng: np.random.Generator,
                             n_data: int | None = None) -> ExemplarInstance:
    d = n_data if n_data is not None else n
    cand = rng.uniform(0.0, 10.0, size=(n, 2))
    data = rng.uniform(0.0, 10.0, size=(d, 2))
    # Phantom strictly farther from every data point than any candidate.
    span = 10.0 * math.sqrt(2.0)
    phantom = (10.0 + 2.0 * span, 10.0 + 2.0 * span)
    return ExemplarInstance(
        tuple((float(x), float(y)) for x, y in cand),
        tuple((float(x), float(y)) for x, y in data),
        phantom,
    )


def random_rank_instance(n: int, rng: np.random.Generator,
                         n_nodes: int | None = None) -> RankInstance:
    k = n_nodes if n_nodes is not None else max(3, n // 2 + 1)
    # Random directed links over k nodes: a connecting chain plus random extras.
    links = []
    order = rng.permutation(k)
    for i in range(min(n, k - 1)):
        links.append((int(order[i]), int(order[i + 1])))
    while len(links) < n:
        u, v = rng.integers(0, k, size=2)
        if u != v:
            links.append((int(u), int(v)))
    base = np.zeros((k, n))
    for l, (u, v) in enumerate(links):
        base[u, l] -= 1.0  # outflow
        base[v, l] += 1.0  # inflow
    eye = np.eye(n)
    return RankInstance(
        tuple(tuple(float(x) for x in row) for row in base),
        tuple(tuple(float(x) for x in row) for row in eye),
    )


def make_oracle(instance) -> ValueOracle:
    if isinstance(instance, ModularInstance):
        return ModularOracle(instance)
    if isinstance(instance, CoverageInstance):
        return CoverageOracle(instance)
    if isinstance(instance, ExemplarInstance):
        return ExemplarOracle(instance)
    if isinstance(instance, RankInstance):
        return RankOracle(instance)
    raise TypeError(f"no oracle adapter for {type(instance).__name__}")


INSTANCE_FAMILIES = ("modular", "coverage", "exemplar", "rank")


def random_instance(family: str, n: int, rng: np.random.Generator):
    """Generate one instance of the named family; returns (instance, oracle)."""
    if family == "modular":
        inst = random_modular_instance(n, rng)
    elif family == "coverage":
        inst = random_coverage_instance(n, rng)
    elif family == "exemplar":
        inst = random_exemplar_instance(n, rng)
    elif family == "rank":
        inst = random_rank_instance(n, rng)
    else:
        raise ValueError(f"unknown family {family!r}")
    return inst, make_oracle(inst)


def random_partition_blocks(n: int, n_blocks: int, rng: np.random.Generator,
                            max_budget: int = 2):
    """Random disjoint blocks covering 0..n-1 with budgets in [1, max_budget]."""
    if n_blocks > n:
        raise ValueError("more blocks than elements")
    owner = list(range(n_blocks)) + [int(rng.integers(n_blocks)) for _ in range(n - n_blocks)]
    rng.shuffle(owner)
    blocks = [[] for _ in range(n_blocks)]
    for p, b in enumerate(owner):
        blocks[b].append(p)
    kappas = [int(rng.integers(1, min(len(b), max_budget) + 1)) for b in blocks]
    return [sorted(b) for b in blocks], kappas


def random_harvesting_instance(n_agents: int, rng: np.random.Generator, *,
                               pool_size: int = 6, points_per_agent: int = 3,
                               n_data: int = 5):
    """Multi-agent deployment over overlapping per-agent point menus.

    Agents draw their menus from one shared pool, so the same physical point
    can appear in several menus; the lifted (agent, point) pairs still form
    disjoint blocks.  Returns (oracle, matroid, point_ids).
    """
    base = random_exemplar_instance(pool_size, rng, n_data=n_data)
    inner = ExemplarOracle(base)
    point_ids = []
    block_lists = []
    next_id = 0
    for _ in range(n_agents):
        menu = sorted(int(i) for i in rng.choice(pool_size, size=points_per_agent,
                                                 replace=False))
        block_lists.append(list(range(next_id, next_id + len(menu))))
        point_ids.extend(menu)
        next_id += len(menu)
    n = len(point_ids)
    oracle = LiftedPointOracle(inner, tuple(point_ids))
    kappas = [int(rng.integers(1, min(2, len(b)) + 1)) for b in block_lists]
    matroid = PartitionMatroid.from_block_lists(n, block_lists, kappas)
    return oracle, matroid, tuple(point_ids)
