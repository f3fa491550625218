"""Command-line driver: instance verification, solver runs, distributed
simulation, and batched sweeps with reproducible CSV output.

Exit codes: 0 success, 1 property violation, 2 usage or parse error.  With
``--no-timestamp`` the timestamp and wall-time columns are omitted entirely,
making repeated runs with the same master seed byte-identical regardless of
``--workers``.
"""

import csv
import io as _io
import itertools
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .bruteforce import brute_force_opt
from .continuous import CGParams, continuous_greedy, pipage_round
from .core import (
    GroundSetTooLargeError,
    N_MAX_EXHAUSTIVE,
    check_monotone,
    check_normal,
    check_submodular,
    total_curvature,
)
from .distributed import (
    CommGraph,
    DropModel,
    MessageSchedule,
    bernoulli_sweep,
    clique_number,
    find_message_sequence,
    gap_bound_incomplete,
    run_distributed_sg,
)
from .greedy import lazy_greedy, sequential_greedy, sequential_greedy_partition
from .io import ParseError, build_oracle, load_instance, load_scenario, load_sweep
from .matroids import (
    PartitionMatroid,
    UniformMatroid,
    verify_matroid_axioms,
)
from .functions import random_instance

BOUND_TOL = 1e-9
SOLVERS = ("sg", "sg-partition", "lazy", "cg")


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _emit_csv(rows, fieldnames, out_path) -> None:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in fieldnames})
    data = buf.getvalue()
    if out_path:
        Path(out_path).write_text(data, encoding="utf-8")
    else:
        click.echo(data, nl=False)


def _usage_error(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


@click.group()
def main():
    """Submodular maximization toolkit."""


def _seed_option(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="Master seed; all randomness derives from it.")(fn)
    fn = click.option("--workers", type=int, default=1, show_default=True,
                      help="Worker processes for batched runs.")(fn)
    fn = click.option("--out", "out_path", type=click.Path(dir_okay=False),
                      default=None, help="Write CSV here instead of stdout.")(fn)
    fn = click.option("--no-timestamp", is_flag=True,
                      help="Omit timestamp and wall-time columns (byte-stable output).")(fn)
    return fn


@main.command()
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@_seed_option
def verify(instance_path, seed, workers, out_path, no_timestamp):
    """Check oracle properties and constraint axioms of an instance file."""
    try:
        inst = load_instance(instance_path)
        oracle = build_oracle(inst)
    except (ParseError, OSError) as err:
        _usage_error(str(err))

    failures = 0
    sample_budget = 20000 if oracle.n > N_MAX_EXHAUSTIVE else None

    def show(label, report):
        nonlocal failures
        mode = "" if report.exhaustive else " (sampled, not proven)"
        if report.holds:
            click.echo(f"{label}: holds ({report.checks_performed} checks){mode}")
        else:
            failures += 1
            s, r, p = report.witness
            click.echo(f"{label}: FAILS{mode} witness S={s} R={r} p={p}")

    show("normal", check_normal(oracle))
    show("monotone", check_monotone(oracle, samples=sample_budget, seed=seed))
    show("submodular", check_submodular(oracle, samples=sample_budget, seed=seed))
    if failures == 0 and oracle.n <= N_MAX_EXHAUSTIVE:
        curv = total_curvature(oracle)
        flag = f" zero-value singletons: {list(curv.zero_value_singletons)}" \
            if curv.zero_value_singletons else ""
        click.echo(f"curvature: {curv.value:.6f}{flag}")
    try:
        axioms = verify_matroid_axioms(inst.matroid)
        if axioms.holds:
            click.echo(f"matroid-axioms: hold ({axioms.checks_performed} checks)")
        else:
            failures += 1
            s, r, _ = axioms.witness
            click.echo(f"matroid-axioms: FAIL witness S={s} R={r}")
    except GroundSetTooLargeError as err:
        click.echo(f"matroid-axioms: skipped ({err})")
    sys.exit(1 if failures else 0)


def _greedy_bound(matroid, solver: str, cg_steps: int) -> float | None:
    if solver == "cg":
        return 1.0 - 1.0 / np.e - 2.0 / cg_steps
    if isinstance(matroid, UniformMatroid):
        return 1.0 - 1.0 / np.e
    if isinstance(matroid, PartitionMatroid):
        return 0.5
    return None


def _run_solver(oracle, matroid, solver, cg_params: CGParams, trajectory_out=None):
    if solver == "sg":
        trace = sequential_greedy(oracle, matroid)
        return trace.final_set, trace.final_value, trace.total_oracle_calls
    if solver == "lazy":
        trace = lazy_greedy(oracle, matroid)
        return trace.final_set, trace.final_value, trace.total_oracle_calls
    if solver == "sg-partition":
        if not isinstance(matroid, PartitionMatroid):
            raise ValueError("sg-partition needs a partition constraint")
        trace = sequential_greedy_partition(oracle, matroid)
        return trace.final_set, trace.final_value, trace.total_oracle_calls
    if solver == "cg":
        if not isinstance(matroid, (PartitionMatroid, UniformMatroid)):
            raise ValueError("cg needs a uniform or partition constraint")
        x, trajectory = continuous_greedy(oracle, matroid, cg_params)
        if trajectory_out is not None:
            _emit_csv(
                [{"t": step.t,
                  "block_sums": "|".join(repr(s) for s in step.block_sums),
                  "extension_value": repr(step.value)}
                 for step in trajectory],
                ("t", "block_sums", "extension_value"), trajectory_out)
        rounded = pipage_round(x, matroid, oracle, exact=cg_params.mode == "exact",
                               rng=np.random.default_rng(cg_params.seed))
        value = oracle(rounded)
        return rounded, value, None
    raise ValueError(f"unknown solver {solver!r}")


SOLVE_FIELDS = ("instance", "solver", "n", "value", "opt", "ratio", "bound",
                "oracle_calls", "seed", "version", "wall_time_s", "timestamp")


def _solve_row(oracle, matroid, solver, cg_params, seed, name, trajectory_out=None):
    start = time.perf_counter()
    final, value, calls = _run_solver(oracle, matroid, solver, cg_params,
                                      trajectory_out)
    wall = time.perf_counter() - start
    row = {
        "instance": name,
        "solver": solver,
        "n": oracle.n,
        "value": repr(float(value)),
        "opt": "",
        "ratio": "",
        "bound": "",
        "oracle_calls": calls if calls is not None else "",
        "seed": seed,
        "version": __version__,
        "wall_time_s": repr(wall),
        "timestamp": "",
    }
    violation = False
    bound = _greedy_bound(matroid, solver, cg_params.T)
    if bound is not None:
        row["bound"] = repr(bound)
    if oracle.n <= 20:
        _, opt = brute_force_opt(oracle, matroid)
        row["opt"] = repr(float(opt))
        ratio = 1.0 if opt <= 0 else float(value) / opt
        row["ratio"] = repr(ratio)
        if bound is not None and ratio < bound - BOUND_TOL:
            violation = True
    return row, violation


@main.command()
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--solver", type=click.Choice(SOLVERS), default="sg", show_default=True)
@click.option("--cg-steps", type=int, default=50, show_default=True)
@click.option("--cg-samples", type=int, default=200, show_default=True)
@click.option("--cg-mode", type=click.Choice(["exact", "sampled"]), default="exact",
              show_default=True)
@click.option("--trajectory-out", type=click.Path(dir_okay=False), default=None,
              help="With --solver cg, also dump the ascent trajectory CSV here.")
@_seed_option
def solve(instance_path, solver, cg_steps, cg_samples, cg_mode, trajectory_out,
          seed, workers, out_path, no_timestamp):
    """Run one solver on an instance file and emit a CSV row."""
    try:
        inst = load_instance(instance_path)
        oracle = build_oracle(inst)
        cg_params = CGParams(cg_steps, cg_samples, seed, cg_mode)
        row, violation = _solve_row(oracle, inst.matroid, solver, cg_params, seed,
                                    inst.name, trajectory_out)
    except (ParseError, ValueError, OSError) as err:
        _usage_error(str(err))
    fields = SOLVE_FIELDS
    if no_timestamp:
        fields = tuple(f for f in fields if f not in ("wall_time_s", "timestamp"))
    else:
        row["timestamp"] = _timestamp()
    _emit_csv([row], fields, out_path)
    sys.exit(1 if violation else 0)


SIM_FIELDS = ("scenario", "mode", "trial", "p", "value", "opt", "ratio", "omega",
              "bound", "hamiltonian_flag", "revisits", "seed", "version",
              "wall_time_s", "timestamp")


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@_seed_option
def simulate(scenario_path, seed, workers, out_path, no_timestamp):
    """Simulate message-passing greedy on a scenario file."""
    try:
        scen = load_scenario(scenario_path)
        oracle = build_oracle(scen.instance)
        graph = CommGraph.from_edges(scen.n_agents, scen.edges)
        if scen.schedule_override is not None:
            schedule = MessageSchedule(graph, scen.schedule_override)
        else:
            schedule = find_message_sequence(graph)
    except (ParseError, ValueError, OSError) as err:
        _usage_error(str(err))

    matroid = scen.instance.matroid
    start = time.perf_counter()
    violation = False
    rows = []
    if scen.p_grid is not None:
        result = bernoulli_sweep(oracle, matroid, schedule, scen.p_grid,
                                 scen.trials, seed)
        for r in result.trials:
            bound = gap_bound_incomplete(scen.n_agents, r["omega"])
            if r["ratio"] < bound - BOUND_TOL:
                violation = True
            rows.append({
                "scenario": scen.instance.name,
                "mode": "sweep",
                "trial": r["trial"],
                "p": repr(r["p"]),
                "ratio": repr(r["ratio"]),
                "omega": r["omega"],
                "bound": repr(bound),
                "hamiltonian_flag": r["hamiltonian_flag"],
                "revisits": schedule.revisits,
                "seed": seed,
                "version": __version__,
            })
    else:
        drops = DropModel(scen.drop_mode, scen.p_success,
                          frozenset(scen.failed_hops), scen.drop_seed)
        final, info, trace = run_distributed_sg(oracle, matroid, schedule, drops)
        _, opt = brute_force_opt(oracle, matroid)
        ratio = 1.0 if opt <= 0 else trace.final_value / opt
        omega = clique_number(info)
        bound = gap_bound_incomplete(scen.n_agents, omega)
        violation = ratio < bound - BOUND_TOL
        rows.append({
            "scenario": scen.instance.name,
            "mode": "single",
            "trial": 0,
            "p": "",
            "value": repr(trace.final_value),
            "opt": repr(float(opt)),
            "ratio": repr(ratio),
            "omega": omega,
            "bound": repr(bound),
            "hamiltonian_flag": schedule.hamiltonian,
            "revisits": schedule.revisits,
            "seed": seed,
            "version": __version__,
        })
    wall = time.perf_counter() - start
    fields = SIM_FIELDS
    if no_timestamp:
        fields = tuple(f for f in fields if f not in ("wall_time_s", "timestamp"))
    else:
        stamp = _timestamp()
        for row in rows:
            row["wall_time_s"] = repr(wall)
            row["timestamp"] = stamp
    _emit_csv(rows, fields, out_path)
    sys.exit(1 if violation else 0)


SWEEP_FIELDS = ("family", "n", "kappa", "solver", "value", "opt", "ratio", "bound",
                "oracle_calls", "seed", "version", "wall_time_s", "timestamp")


def _sweep_item(args):
    """Top-level worker for one sweep grid point (picklable)."""
    master_seed, family, n, kappa, item_seed, solver, cg_steps, cg_samples, cg_mode = args
    family_index = ("modular", "coverage", "exemplar", "rank").index(family)
    rng = np.random.default_rng([master_seed, item_seed, n, family_index])
    _, oracle = random_instance(family, n, rng)
    matroid = UniformMatroid(n, min(kappa, n))
    cg_seed = int(np.random.SeedSequence([master_seed, item_seed]).generate_state(1)[0])
    cg_params = CGParams(cg_steps, cg_samples, cg_seed, cg_mode)
    row, violation = _solve_row(oracle, matroid, solver, cg_params, item_seed, family)
    row.update({"family": family, "n": n, "kappa": min(kappa, n)})
    return row, violation


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@_seed_option
def sweep(config_path, seed, workers, out_path, no_timestamp):
    """Run a cartesian grid of generated instances and emit one row each."""
    try:
        cfg = load_sweep(config_path)
        for family in cfg.families:
            if family not in ("modular", "coverage", "exemplar", "rank"):
                raise ParseError(f"sweep.families: unknown family {family!r}")
    except (ParseError, OSError) as err:
        _usage_error(str(err))

    items = [
        (seed, family, n, kappa, item_seed, solver,
         cfg.cg_steps, cfg.cg_samples, cfg.cg_mode)
        for family, n, kappa, item_seed, solver in itertools.product(
            cfg.families, cfg.sizes, cfg.kappas, cfg.seeds, cfg.solvers)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_item, items))
    else:
        results = [_sweep_item(item) for item in items]

    rows = [row for row, _ in results]
    violation = any(v for _, v in results)
    fields = SWEEP_FIELDS
    if no_timestamp:
        fields = tuple(f for f in fields if f not in ("wall_time_s", "timestamp"))
    else:
        stamp = _timestamp()
        for row in rows:
            row["timestamp"] = stamp
    _emit_csv(rows, fields, out_path)
    sys.exit(1 if violation else 0)


if __name__ == "__main__":
    main()
