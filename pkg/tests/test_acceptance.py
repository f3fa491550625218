"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL
line (run with ``pytest tests/test_acceptance.py -v -s``).

Tolerances are pinned here and nowhere else: ratio checks allow 1e-9 slack,
gradient/finite-difference agreement 1e-6, cross partials 1e-9, boundary
sums 1e-12.
"""

import csv
import io as _io
import itertools
import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from submax import (
    CGParams,
    CommGraph,
    DropModel,
    MatroidPolytope,
    PartitionMatroid,
    Subset,
    UniformMatroid,
    bound_partition_curvature,
    bound_uniform_curvature,
    brute_force_opt,
    clique_number,
    continuous_greedy,
    cross_partial,
    decoy_non_matroid,
    find_message_sequence,
    gap_bound_incomplete,
    grad_exact,
    lazy_greedy,
    multilinear_estimate,
    multilinear_exact,
    pipage_round,
    random_coverage_instance,
    random_instance,
    random_partition_blocks,
    run_distributed_sg,
    sequential_greedy,
    sequential_greedy_partition,
    tabulate,
    total_curvature,
    verify_matroid_axioms,
)
from submax.cli import main as cli_main
from submax.functions import CoverageOracle
from submax.io import InstanceFile, serialize_instance

RATIO_TOL = 1e-9
MIXED = ("coverage", "exemplar", "rank")


def report(number, ok, detail):
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def uniform_sweep():
    """504 seeded instances with uniform budgets, solved and measured once."""
    records = []
    for i in range(504):
        rng = np.random.default_rng([1000, i])
        family = MIXED[i % 3]
        n = int(rng.integers(5, 11))
        kappa = int(rng.integers(1, 5))
        _, oracle = random_instance(family, n, rng)
        matroid = UniformMatroid(n, kappa)
        trace = sequential_greedy(oracle, matroid)
        _, opt = brute_force_opt(oracle, matroid)
        records.append((family, oracle, matroid, trace, opt))
    return records


def test_criterion_1_uniform_greedy_bound():
    floor = 1.0 - 1.0 / math.e
    start = time.perf_counter()
    failures = 0
    count = 0
    for i in range(504):
        rng = np.random.default_rng([1000, i])
        family = MIXED[i % 3]
        n = int(rng.integers(5, 11))
        kappa = int(rng.integers(1, 5))
        _, oracle = random_instance(family, n, rng)
        matroid = UniformMatroid(n, kappa)
        trace = sequential_greedy(oracle, matroid)
        _, opt = brute_force_opt(oracle, matroid)
        count += 1
        if opt > 0 and trace.final_value / opt < floor - RATIO_TOL:
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60.0 and count >= 500
    report(1, ok, f"{count} instances, {failures} below 1-1/e, {elapsed:.1f}s")
    assert failures == 0
    assert count >= 500
    assert elapsed < 60.0


def test_criterion_2_curvature_refinement(uniform_sweep):
    failures = 0
    for family, oracle, matroid, trace, opt in uniform_sweep:
        if opt <= 0:
            continue
        c = float(total_curvature(oracle))
        if trace.final_value / opt < bound_uniform_curvature(c) - RATIO_TOL:
            failures += 1
    modular_off = 0
    for i in range(40):
        rng = np.random.default_rng([1100, i])
        n = int(rng.integers(5, 11))
        _, oracle = random_instance("modular", n, rng)
        matroid = UniformMatroid(n, int(rng.integers(1, 5)))
        trace = sequential_greedy(oracle, matroid)
        _, opt = brute_force_opt(oracle, matroid)
        if trace.final_value / opt != 1.0:
            modular_off += 1
    ok = failures == 0 and modular_off == 0
    report(2, ok, f"{len(uniform_sweep)} refined checks, {failures} failures; "
                  f"{modular_off}/40 modular instances off ratio 1")
    assert failures == 0
    assert modular_off == 0


def test_criterion_3_partition_bound_all_orders():
    failures = 0
    count = 0
    for i in range(300):
        rng = np.random.default_rng([1200, i])
        family = MIXED[i % 3]
        n = int(rng.integers(5, 10))
        n_blocks = int(rng.integers(1, 4))
        _, oracle = random_instance(family, n, rng)
        blocks, kappas = random_partition_blocks(n, n_blocks, rng)
        matroid = PartitionMatroid.from_block_lists(n, blocks, kappas)
        c = float(total_curvature(oracle))
        floor = bound_partition_curvature(c)
        assert floor >= 0.5 - RATIO_TOL
        _, opt = brute_force_opt(oracle, matroid)
        count += 1
        if opt <= 0:
            continue
        for order in itertools.permutations(range(n_blocks)):
            trace = sequential_greedy_partition(oracle, matroid, order)
            if trace.final_value / opt < floor - RATIO_TOL:
                failures += 1
    ok = failures == 0 and count >= 300
    report(3, ok, f"{count} instances x all block orders, {failures} below 1/(1+c)")
    assert failures == 0
    assert count >= 300


def test_criterion_4_multilinear_correctness():
    vertex_bad = 0
    grad_worst = 0.0
    cross_worst = -math.inf
    for i in range(6):
        rng = np.random.default_rng([1300, i])
        family = MIXED[i % 3]
        _, oracle = random_instance(family, int(rng.integers(5, 11)), rng)
        tab = tabulate(oracle)
        for mask in range(1 << oracle.n):
            x = [(mask >> p) & 1 for p in range(oracle.n)]
            if multilinear_exact(oracle, x, table=tab) != tab[mask]:
                vertex_bad += 1
        x = rng.uniform(0.1, 0.9, oracle.n)
        g = grad_exact(oracle, x, table=tab)
        h = 1e-4
        for p in range(oracle.n):
            hi, lo = x.copy(), x.copy()
            hi[p] += h
            lo[p] -= h
            fd = (multilinear_exact(oracle, hi, table=tab)
                  - multilinear_exact(oracle, lo, table=tab)) / (2 * h)
            grad_worst = max(grad_worst, abs(fd - g[p]))
    for i in range(4):
        rng = np.random.default_rng([1310, i])
        _, oracle = random_instance(MIXED[i % 3], int(rng.integers(5, 9)), rng)
        tab = tabulate(oracle)
        x = rng.uniform(0.0, 1.0, oracle.n)
        for p, q in itertools.combinations(range(oracle.n), 2):
            cross_worst = max(cross_worst, cross_partial(oracle, x, p, q, table=tab))
    ok = vertex_bad == 0 and grad_worst <= 1e-6 and cross_worst <= 1e-9
    report(4, ok, f"vertex mismatches {vertex_bad}, max fd error {grad_worst:.2e}, "
                  f"max cross partial {cross_worst:.2e}")
    assert vertex_bad == 0
    assert grad_worst <= 1e-6
    assert cross_worst <= 1e-9


def test_criterion_5_estimator_calibration():
    oracle = CoverageOracle(random_coverage_instance(6, np.random.default_rng(1400)))
    x = np.full(6, 0.5)
    exact = multilinear_exact(oracle, x)
    covered = 0
    trials = 1000
    for t in range(trials):
        mean, half = multilinear_estimate(oracle, x, 400,
                                          np.random.default_rng([1401, t]),
                                          confidence=0.99)
        covered += abs(mean - exact) <= half
    ok = covered >= 990
    report(5, ok, f"interval covered the exact value in {covered}/{trials} trials")
    assert covered >= 990


def test_criterion_6_continuous_greedy_end_to_end():
    start = time.perf_counter()
    params = CGParams(T=50)
    floor_scale = 1.0 - 1.0 / math.e - 2.0 / params.T
    failures = []
    for i in range(30):
        rng = np.random.default_rng([1500, i])
        family = MIXED[i % 3]
        n = int(rng.integers(5, 11))
        n_blocks = int(rng.integers(1, 4))
        _, oracle = random_instance(family, n, rng)
        blocks, kappas = random_partition_blocks(n, n_blocks, rng)
        matroid = PartitionMatroid.from_block_lists(n, blocks, kappas)
        x, _ = continuous_greedy(oracle, matroid, params)
        tab = tabulate(oracle)
        value = multilinear_exact(oracle, x, table=tab)
        _, opt = brute_force_opt(oracle, matroid)
        if opt > 0 and value < floor_scale * opt:
            failures.append((i, "ascent below discretization floor"))
        rounded = pipage_round(x, matroid, oracle)
        if oracle(rounded) < value - RATIO_TOL:
            failures.append((i, "rounding lost extension value"))
        for total, kappa in zip(MatroidPolytope(matroid).block_sums(x), kappas):
            if abs(total - kappa) > 1e-12:
                failures.append((i, "boundary sums off"))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300.0
    report(6, ok, f"30 instances, failures {failures}, {elapsed:.1f}s")
    assert not failures
    assert elapsed < 300.0


def test_criterion_7_lazy_sequential_equivalence(uniform_sweep):
    mismatched = 0
    for family, oracle, matroid, trace, opt in uniform_sweep:
        if lazy_greedy(oracle, matroid).final_set != trace.final_set:
            mismatched += 1
    not_fewer = 0
    for i in range(40):
        rng = np.random.default_rng([1600, i])
        oracle = CoverageOracle(random_coverage_instance(10, rng))
        matroid = UniformMatroid(10, 4)
        lazy = lazy_greedy(oracle, matroid)
        plain = sequential_greedy(oracle, matroid)
        if lazy.final_set != plain.final_set:
            mismatched += 1
        if lazy.total_oracle_calls >= plain.total_oracle_calls:
            not_fewer += 1
    ok = mismatched == 0 and not_fewer == 0
    report(7, ok, f"{len(uniform_sweep) + 40} equivalence checks, {mismatched} "
                  f"mismatches; {not_fewer}/40 without strict call savings")
    assert mismatched == 0
    assert not_fewer == 0


def _random_ham_graph(n, rng):
    perm = [int(v) for v in rng.permutation(n)]
    edges = set(zip(perm, perm[1:]))
    for _ in range(int(rng.integers(0, n))):
        a, b = rng.integers(0, n, 2)
        if a != b:
            edges.add((int(a), int(b)))
    return CommGraph.from_edges(n, edges)


def _random_distributed_scenario(seed_key):
    rng = np.random.default_rng(seed_key)
    n_agents = int(rng.integers(2, 5))
    n = int(rng.integers(n_agents, 11))
    family = MIXED[int(rng.integers(3))]
    _, oracle = random_instance(family, n, rng)
    blocks, kappas = random_partition_blocks(n, n_agents, rng)
    matroid = PartitionMatroid.from_block_lists(n, blocks, kappas)
    graph = _random_ham_graph(n_agents, rng)
    return oracle, matroid, graph


def test_criterion_8_distributed_reduction():
    mismatched = 0
    count = 0
    for i in range(108):
        oracle, matroid, graph = _random_distributed_scenario([1700, i])
        schedule = find_message_sequence(graph)
        if not schedule.hamiltonian:
            continue
        count += 1
        final, _, _ = run_distributed_sg(oracle, matroid, schedule, DropModel("none"))
        central = sequential_greedy_partition(
            oracle, matroid, block_order=schedule.first_visit_order())
        if final != central.final_set:
            mismatched += 1
    ok = mismatched == 0 and count >= 100
    report(8, ok, f"{count} no-drop scenarios, {mismatched} mismatches")
    assert mismatched == 0
    assert count >= 100


def test_criterion_9_clique_number_bound():
    failures = 0
    trials = 0
    complete_failures = 0
    complete_trials = 0
    for i in range(28):
        oracle, matroid, graph = _random_distributed_scenario([1800, i])
        schedule = find_message_sequence(graph)
        _, opt = brute_force_opt(oracle, matroid)
        if opt <= 0:
            continue
        n_agents = graph.n_agents
        for p_idx, p in enumerate((0.3, 0.6, 1.0)):
            for t in range(6):
                drop_seed = int(np.random.default_rng([1801, i, p_idx, t])
                                .integers(2 ** 63))
                drops = DropModel("bernoulli", p, seed=drop_seed)
                final, info, trace = run_distributed_sg(oracle, matroid, schedule,
                                                        drops)
                omega = clique_number(info)
                ratio = trace.final_value / opt
                trials += 1
                if ratio < gap_bound_incomplete(n_agents, omega) - RATIO_TOL:
                    failures += 1
                if p == 1.0 and schedule.hamiltonian:
                    complete_trials += 1
                    if ratio < 0.5 - RATIO_TOL:
                        complete_failures += 1
    ok = failures == 0 and trials >= 500 and complete_failures == 0
    report(9, ok, f"{trials} drop trials, {failures} below 1/(2+N-omega); "
                  f"{complete_failures}/{complete_trials} complete-info below 1/2")
    assert failures == 0
    assert trials >= 500
    assert complete_failures == 0
    assert complete_trials > 0


def test_criterion_10_matroid_axioms_and_decoy():
    bad = 0
    for i in range(40):
        rng = np.random.default_rng([1900, i])
        n = int(rng.integers(3, 11))
        if not verify_matroid_axioms(UniformMatroid(n, int(rng.integers(1, n + 1)))).holds:
            bad += 1
        blocks, kappas = random_partition_blocks(n, int(rng.integers(1, min(4, n) + 1)),
                                                 rng)
        if not verify_matroid_axioms(
                PartitionMatroid.from_block_lists(n, blocks, kappas)).holds:
            bad += 1
    decoy_missed = 0
    for n in range(3, 9):
        family = decoy_non_matroid(n)
        found = verify_matroid_axioms(family)
        if found.holds:
            decoy_missed += 1
            continue
        s, r, _ = found.witness
        if not (family.is_independent(s) and family.is_independent(r)
                and len(s) > len(r)
                and all(not family.is_independent(r.add(p)) for p in s - r)):
            decoy_missed += 1
    ok = bad == 0 and decoy_missed == 0
    report(10, ok, f"80 matroids verified with {bad} failures; decoys missed "
                   f"{decoy_missed}/6")
    assert bad == 0
    assert decoy_missed == 0


def test_criterion_11_cli_reproducibility(tmp_path):
    runner = CliRunner()
    sweep_doc = {
        "format": "submax-sweep-v1",
        "families": ["coverage", "exemplar"],
        "sizes": [7],
        "kappas": [2],
        "seeds": [0, 1, 2],
        "solvers": ["sg", "lazy"],
    }
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps(sweep_doc))
    blobs = []
    for tag, workers in (("a", "1"), ("b", "2"), ("c", "1")):
        out = tmp_path / f"{tag}.csv"
        result = runner.invoke(cli_main, ["sweep", str(sweep_path), "--seed", "17",
                                          "--workers", workers, "--no-timestamp",
                                          "--out", str(out)])
        assert result.exit_code == 0, result.output
        blobs.append(out.read_bytes())

    inst = InstanceFile("repro", random_coverage_instance(8, np.random.default_rng(2000)),
                        UniformMatroid(8, 3))
    inst_path = tmp_path / "inst.json"
    inst_path.write_text(serialize_instance(inst))
    solves = []
    for tag in ("x", "y"):
        out = tmp_path / f"{tag}.csv"
        result = runner.invoke(cli_main, ["solve", str(inst_path), "--solver", "cg",
                                          "--cg-mode", "sampled", "--cg-samples", "60",
                                          "--cg-steps", "15", "--seed", "5",
                                          "--no-timestamp", "--out", str(out)])
        assert result.exit_code == 0, result.output
        solves.append(out.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2] and solves[0] == solves[1]
    report(11, ok, "sweep bytes identical across reruns and worker counts; "
                   "sampled-mode solve reruns identical")
    assert blobs[0] == blobs[1] == blobs[2]
    assert solves[0] == solves[1]
