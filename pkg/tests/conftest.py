"""Shared fixtures and independent reference implementations.

The reference functions here deliberately re-derive quantities by the most
direct route available (full enumeration, direct oracle calls) so library
results are checked against something that shares no code with them.
"""

import itertools

import numpy as np
import pytest

from submax import (
    PartitionMatroid,
    Subset,
    random_instance,
    random_partition_blocks,
)

MIXED_FAMILIES = ("coverage", "exemplar", "rank")


def build_corpus(seed, count, families=MIXED_FAMILIES, n_lo=5, n_hi=10):
    """Deterministic list of (family, oracle) pairs."""
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(n_lo, n_hi + 1))
        family = families[i % len(families)]
        _, oracle = random_instance(family, n, rng)
        out.append((family, oracle))
    return out


def build_partition_corpus(seed, count, families=MIXED_FAMILIES, n_lo=5, n_hi=9,
                           max_blocks=3):
    """Deterministic list of (family, oracle, matroid) triples."""
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(n_lo, n_hi + 1))
        family = families[i % len(families)]
        _, oracle = random_instance(family, n, rng)
        n_blocks = int(rng.integers(1, min(max_blocks, n) + 1))
        blocks, kappas = random_partition_blocks(n, n_blocks, rng)
        out.append((family, oracle, PartitionMatroid.from_block_lists(n, blocks, kappas)))
    return out


@pytest.fixture(scope="session")
def mixed_corpus():
    return build_corpus(100, 24)


@pytest.fixture(scope="session")
def partition_corpus():
    return build_partition_corpus(200, 18)


# ---------------------------------------------------------------------------
# reference implementations

def ref_four_set_submodular(f, eps=1e-9):
    """Directly check f(S) + f(R) >= f(S | R) + f(S & R) on every pair."""
    n = f.n
    for s in range(1 << n):
        for r in range(1 << n):
            lhs = f.value_of_mask(s) + f.value_of_mask(r)
            rhs = f.value_of_mask(s | r) + f.value_of_mask(s & r)
            if lhs < rhs - eps:
                return False
    return True


def ref_multilinear(f, x):
    """Term-by-term expectation over every subset."""
    n = f.n
    total = 0.0
    for mask in range(1 << n):
        weight = 1.0
        for p in range(n):
            weight *= x[p] if mask >> p & 1 else 1.0 - x[p]
        total += weight * f.value_of_mask(mask)
    return total


def ref_cross_partial(f, x, p, q):
    """Four-term expectation over the remaining coordinates."""
    n = f.n
    total = 0.0
    for mask in range(1 << n):
        if mask >> p & 1 or mask >> q & 1:
            continue
        weight = 1.0
        for r in range(n):
            if r in (p, q):
                continue
            weight *= x[r] if mask >> r & 1 else 1.0 - x[r]
        bp, bq = 1 << p, 1 << q
        total += weight * (
            f.value_of_mask(mask | bp | bq)
            - f.value_of_mask(mask | bq)
            - f.value_of_mask(mask | bp)
            + f.value_of_mask(mask)
        )
    return total


def ref_matroid_axioms(matroid):
    """Triple-loop axiom check; returns True when the family is a matroid."""
    n = matroid.n
    members = [m for m in range(1 << n)
               if matroid.is_independent(Subset(n, m))]
    member_set = set(members)
    if 0 not in member_set:
        return False
    for m in members:
        for p in range(n):
            if m >> p & 1 and (m ^ (1 << p)) not in member_set:
                return False
    for s in members:
        for r in members:
            if s.bit_count() <= r.bit_count():
                continue
            if not any((s >> p & 1) and not (r >> p & 1)
                       and (r | (1 << p)) in member_set for p in range(n)):
                return False
    return True


def ref_max_clique(adjacency_masks):
    """Maximum clique by enumeration of all vertex subsets."""
    n = len(adjacency_masks)
    best = 0
    for mask in range(1, 1 << n):
        vertices = [v for v in range(n) if mask >> v & 1]
        if all(adjacency_masks[a] >> b & 1
               for a, b in itertools.combinations(vertices, 2)):
            best = max(best, len(vertices))
    return best


def ref_hamiltonian_path_exists(graph):
    """Permutation scan."""
    n = graph.n_agents
    for perm in itertools.permutations(range(n)):
        if all(graph.has_edge(a, b) for a, b in zip(perm, perm[1:])):
            return True
    return False
