"""Discrete sequential greedy solvers and their a-priori bound calculators.

All solvers break ties toward the lowest element index; the lazy variant and
the message-passing simulator rely on that to reproduce the plain solver's
output exactly.
"""

import heapq
import math
from dataclasses import dataclass

from .core import CallCounter, Subset, ValueOracle
from .matroids import PartitionMatroid, matroid_rank_ceiling


@dataclass(frozen=True)
class GreedyTrace:
    """Audit trail of one greedy run.

    ``picks`` holds (element, marginal gain at pick time) in pick order;
    ``oracle_calls_per_step`` the evaluations spent selecting each pick (the
    first entry includes any initial full scan); ``final_value`` is the
    oracle's value of ``final_set``.
    """

    solver: str
    picks: tuple
    oracle_calls_per_step: tuple
    final_set: Subset
    final_value: float
    total_oracle_calls: int

    def as_row(self) -> dict:
        return {
            "solver": self.solver,
            "picks": ";".join(f"{p}:{g!r}" for p, g in self.picks),
            "value": repr(self.final_value),
            "oracle_calls": self.total_oracle_calls,
        }


def sequential_greedy(f: ValueOracle, matroid) -> GreedyTrace:
    """Add the feasible element of maximum marginal gain until no element can
    be added; works with any independence oracle."""
    counter = CallCounter(f)
    n = f.n
    chosen = Subset.empty(n)
    current = counter(chosen)
    picks = []
    calls_per_step = []
    while True:
        best_p, best_value = -1, -math.inf
        calls = 0
        for p in range(n):
            if p in chosen or not matroid.is_independent(chosen.add(p)):
                continue
            value = counter(chosen.add(p))
            calls += 1
            if value > best_value:
                best_p, best_value = p, value
        if best_p < 0:
            break
        picks.append((best_p, best_value - current))
        calls_per_step.append(calls)
        chosen = chosen.add(best_p)
        current = best_value
    return GreedyTrace("sg", tuple(picks), tuple(calls_per_step), chosen,
                       float(current), counter.calls)


def sequential_greedy_partition(f: ValueOracle, matroid: PartitionMatroid,
                                block_order=None) -> GreedyTrace:
    """Blockwise greedy: fill each block's budget in turn, conditioning every
    pick on all previous picks.  ``block_order`` defaults to natural order."""
    n_blocks = len(matroid.blocks)
    order = tuple(range(n_blocks)) if block_order is None else tuple(block_order)
    if sorted(order) != list(range(n_blocks)):
        raise ValueError("block_order must be a permutation of the block indices")
    counter = CallCounter(f)
    chosen = Subset.empty(f.n)
    current = counter(chosen)
    picks = []
    calls_per_step = []
    for i in order:
        block = matroid.blocks[i]
        for _ in range(matroid.kappas[i]):
            best_p, best_value = -1, -math.inf
            calls = 0
            for p in block:
                if p in chosen:
                    continue
                value = counter(chosen.add(p))
                calls += 1
                if value > best_value:
                    best_p, best_value = p, value
            picks.append((best_p, best_value - current))
            calls_per_step.append(calls)
            chosen = chosen.add(best_p)
            current = best_value
    return GreedyTrace("sg-partition", tuple(picks), tuple(calls_per_step), chosen,
                       float(current), counter.calls)


LAZY_SLACK = 1e-9


def lazy_greedy(f: ValueOracle, matroid) -> GreedyTrace:
    """Sequential greedy with stale-bound pruning.

    Keeps a max-heap of previously computed gains, which diminishing returns
    makes valid upper bounds on current gains; per pick, only candidates whose
    bound comes within LAZY_SLACK of the best re-evaluated gain are touched,
    and the winner among re-evaluated candidates is chosen with the same
    comparator as sequential_greedy (raw value, ties to the lowest index).
    The slack absorbs the ulp-scale drift of floating-point oracle sums, so
    the output set matches sequential_greedy's exactly on submodular input.
    For non-submodular f the output may differ; that is documented, not
    detected.
    """
    counter = CallCounter(f)
    n = f.n
    chosen = Subset.empty(n)
    current = counter(chosen)
    heap = []  # (stale negated gain, element)
    fresh = {}
    for p in range(n):
        if matroid.is_independent(chosen.add(p)):
            fresh[p] = counter(chosen.add(p))
    picks = []
    calls_per_step = []
    step_calls = len(fresh)
    while True:
        best_p, best_value = -1, -math.inf
        for p, value in fresh.items():
            if value > best_value or (value == best_value and p < best_p):
                best_p, best_value = p, value
        while heap:
            neg_bound, p = heap[0]
            if p in chosen or not matroid.is_independent(chosen.add(p)):
                heapq.heappop(heap)  # dependence only grows; drop for good
                continue
            if best_p >= 0 and best_value - current >= -neg_bound + LAZY_SLACK:
                break
            heapq.heappop(heap)
            value = counter(chosen.add(p))
            step_calls += 1
            fresh[p] = value
            if value > best_value or (value == best_value and p < best_p):
                best_p, best_value = p, value
        if best_p < 0:
            break
        picks.append((best_p, best_value - current))
        calls_per_step.append(step_calls)
        step_calls = 0
        for p, value in fresh.items():
            if p != best_p:
                heapq.heappush(heap, (current - value, p))
        chosen = chosen.add(best_p)
        current = best_value
        fresh = {}
    return GreedyTrace("lazy", tuple(picks), tuple(calls_per_step), chosen,
                       float(current), counter.calls)


def bound_uniform_curvature(c: float) -> float:
    """A-priori ratio guarantee for budget-constrained greedy at curvature c:
    (1/c)(1 - e^{-c}), continuously extended to 1 at c = 0."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"curvature must lie in [0, 1], got {c}")
    if c == 0.0:
        return 1.0
    return -math.expm1(-c) / c


def bound_partition_curvature(c: float) -> float:
    """A-priori ratio guarantee for blockwise greedy at curvature c: 1/(1+c)."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"curvature must lie in [0, 1], got {c}")
    return 1.0 / (1.0 + c)
