"""Structured text formats for instances, simulation scenarios, and sweep grids.

Files are JSON with explicit field names.  Unknown fields are errors, parse
failures carry line/field diagnostics, and serialization is canonical, so
parse -> serialize is the identity up to whitespace.
"""

import json
from dataclasses import dataclass

from .core import Subset
from .functions import (
    CardinalityPowerOracle,
    CoverageInstance,
    CoverageOracle,
    ExemplarInstance,
    ExemplarOracle,
    ModularInstance,
    ModularOracle,
    RankInstance,
    RankOracle,
)
from .matroids import ExcludedPairsFamily, PartitionMatroid, UniformMatroid

INSTANCE_FORMAT = "submax-instance-v1"
SCENARIO_FORMAT = "submax-scenario-v1"
SWEEP_FORMAT = "submax-sweep-v1"


class ParseError(ValueError):
    """Malformed document; the message names the offending field or location."""


def _require_keys(obj: dict, required, optional=(), *, where: str) -> None:
    missing = [k for k in required if k not in obj]
    if missing:
        raise ParseError(f"{where}: missing field(s) {', '.join(missing)}")
    unknown = [k for k in obj if k not in set(required) | set(optional)]
    if unknown:
        raise ParseError(f"{where}: unknown field(s) {', '.join(unknown)}")


def _loads(text: str, where: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{where}: line {err.lineno} column {err.colno}: {err.msg}") from err
    if not isinstance(data, dict):
        raise ParseError(f"{where}: top level must be an object")
    return data


@dataclass(frozen=True)
class InstanceFile:
    """One optimization instance: a named oracle definition plus its constraint."""

    name: str
    oracle_def: object
    matroid: object
    power_exponent: float | None = None  # set only for the cardinality-power kind


def _parse_matroid(obj, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: matroid must be an object")
    kind = obj.get("kind")
    if kind == "uniform":
        _require_keys(obj, ["kind", "n", "kappa"], where=where)
        return UniformMatroid(int(obj["n"]), int(obj["kappa"]))
    if kind == "partition":
        _require_keys(obj, ["kind", "n", "blocks", "kappas"], where=where)
        return PartitionMatroid.from_block_lists(
            int(obj["n"]), obj["blocks"], obj["kappas"])
    if kind == "excluded_pairs":
        _require_keys(obj, ["kind", "n", "budget", "excluded_pairs"], where=where)
        return ExcludedPairsFamily(
            int(obj["n"]), int(obj["budget"]),
            tuple((int(a), int(b)) for a, b in obj["excluded_pairs"]))
    raise ParseError(f"{where}: unknown matroid kind {kind!r}")


def _serialize_matroid(m) -> dict:
    if isinstance(m, UniformMatroid):
        return {"kind": "uniform", "n": m.n, "kappa": m.kappa}
    if isinstance(m, PartitionMatroid):
        return {
            "kind": "partition",
            "n": m.n,
            "blocks": [list(b) for b in m.blocks],
            "kappas": list(m.kappas),
        }
    if isinstance(m, ExcludedPairsFamily):
        return {
            "kind": "excluded_pairs",
            "n": m.n,
            "budget": m.budget,
            "excluded_pairs": [list(p) for p in m.excluded_pairs],
        }
    raise TypeError(f"cannot serialize constraint {type(m).__name__}")


def _parse_oracle(obj, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: oracle must be an object")
    kind = obj.get("kind")
    try:
        if kind == "modular":
            _require_keys(obj, ["kind", "weights"], where=where)
            return ModularInstance(tuple(float(w) for w in obj["weights"])), None
        if kind == "coverage":
            _require_keys(obj, ["kind", "item_weights", "cover_sets"], where=where)
            return CoverageInstance(
                tuple(float(w) for w in obj["item_weights"]),
                tuple(tuple(int(i) for i in c) for c in obj["cover_sets"])), None
        if kind == "exemplar":
            _require_keys(obj, ["kind", "candidates", "data_points", "phantom"],
                          optional=["dissimilarity", "phantom_dissimilarity"], where=where)
            dis = obj.get("dissimilarity")
            phd = obj.get("phantom_dissimilarity")
            return ExemplarInstance(
                tuple(tuple(float(c) for c in pt) for pt in obj["candidates"]),
                tuple(tuple(float(c) for c in pt) for pt in obj["data_points"]),
                tuple(float(c) for c in obj["phantom"]),
                None if dis is None else tuple(tuple(float(d) for d in row) for row in dis),
                None if phd is None else tuple(float(d) for d in phd)), None
        if kind == "rank":
            _require_keys(obj, ["kind", "base_rows", "candidate_rows"], where=where)
            return RankInstance(
                tuple(tuple(float(x) for x in row) for row in obj["base_rows"]),
                tuple(tuple(float(x) for x in row) for row in obj["candidate_rows"])), None
        if kind == "cardinality_power":
            _require_keys(obj, ["kind", "n", "exponent"], where=where)
            return int(obj["n"]), float(obj["exponent"])
    except (TypeError, ValueError) as err:
        if isinstance(err, ParseError):
            raise
        raise ParseError(f"{where}: {err}") from err
    raise ParseError(f"{where}: unknown oracle kind {kind!r}")


def _serialize_oracle(inst: "InstanceFile") -> dict:
    d = inst.oracle_def
    if inst.power_exponent is not None:
        return {"kind": "cardinality_power", "n": d, "exponent": inst.power_exponent}
    if isinstance(d, ModularInstance):
        return {"kind": "modular", "weights": list(d.weights)}
    if isinstance(d, CoverageInstance):
        return {
            "kind": "coverage",
            "item_weights": list(d.item_weights),
            "cover_sets": [list(c) for c in d.cover_sets],
        }
    if isinstance(d, ExemplarInstance):
        out = {
            "kind": "exemplar",
            "candidates": [list(pt) for pt in d.candidates],
            "data_points": [list(pt) for pt in d.data_points],
            "phantom": list(d.phantom),
        }
        if d.dissimilarity is not None:
            out["dissimilarity"] = [list(row) for row in d.dissimilarity]
        if d.phantom_dissimilarity is not None:
            out["phantom_dissimilarity"] = list(d.phantom_dissimilarity)
        return out
    if isinstance(d, RankInstance):
        return {
            "kind": "rank",
            "base_rows": [list(r) for r in d.base_rows],
            "candidate_rows": [list(r) for r in d.candidate_rows],
        }
    raise TypeError(f"cannot serialize oracle definition {type(d).__name__}")


def parse_instance(text: str) -> InstanceFile:
    data = _loads(text, "instance")
    _require_keys(data, ["format", "name", "oracle", "matroid"], where="instance")
    if data["format"] != INSTANCE_FORMAT:
        raise ParseError(f"instance: unsupported format {data['format']!r}")
    oracle_def, exponent = _parse_oracle(data["oracle"], "instance.oracle")
    matroid = _parse_matroid(data["matroid"], "instance.matroid")
    try:
        inst = InstanceFile(str(data["name"]), oracle_def, matroid, exponent)
        _ = build_oracle(inst)  # surfaces size mismatches at parse time
    except (TypeError, ValueError) as err:
        if isinstance(err, ParseError):
            raise
        raise ParseError(f"instance: {err}") from err
    return inst


def serialize_instance(inst: InstanceFile) -> str:
    doc = {
        "format": INSTANCE_FORMAT,
        "name": inst.name,
        "oracle": _serialize_oracle(inst),
        "matroid": _serialize_matroid(inst.matroid),
    }
    return json.dumps(doc, indent=2) + "\n"


def build_oracle(inst: InstanceFile):
    if inst.power_exponent is not None:
        oracle = CardinalityPowerOracle(inst.oracle_def, inst.power_exponent)
    elif isinstance(inst.oracle_def, ModularInstance):
        oracle = ModularOracle(inst.oracle_def)
    elif isinstance(inst.oracle_def, CoverageInstance):
        oracle = CoverageOracle(inst.oracle_def)
    elif isinstance(inst.oracle_def, ExemplarInstance):
        oracle = ExemplarOracle(inst.oracle_def)
    elif isinstance(inst.oracle_def, RankInstance):
        oracle = RankOracle(inst.oracle_def)
    else:
        raise TypeError(f"no oracle adapter for {type(inst.oracle_def).__name__}")
    if oracle.n != inst.matroid.n:
        raise ValueError(
            f"oracle ground set ({oracle.n}) does not match constraint ({inst.matroid.n})")
    return oracle


def load_instance(path) -> InstanceFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(inst: InstanceFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))


@dataclass(frozen=True)
class ScenarioFile:
    """Distributed-run scenario: instance, topology, drops, optional sweep grid."""

    instance: InstanceFile
    n_agents: int
    edges: tuple
    schedule_override: tuple | None
    drop_mode: str
    p_success: float
    failed_hops: tuple
    drop_seed: int
    p_grid: tuple | None
    trials: int


def parse_scenario(text: str) -> ScenarioFile:
    data = _loads(text, "scenario")
    _require_keys(
        data, ["format", "instance", "topology"],
        optional=["schedule", "drops", "p_grid", "trials"], where="scenario")
    if data["format"] != SCENARIO_FORMAT:
        raise ParseError(f"scenario: unsupported format {data['format']!r}")

    inst_obj = data["instance"]
    if not isinstance(inst_obj, dict):
        raise ParseError("scenario.instance: must be an inline instance object")
    instance = parse_instance(json.dumps(inst_obj))
    if not isinstance(instance.matroid, PartitionMatroid):
        raise ParseError("scenario.instance: distributed runs need a partition constraint")

    topo = data["topology"]
    _require_keys(topo, ["agents", "edges"], where="scenario.topology")
    n_agents = int(topo["agents"])
    edges = tuple((int(a), int(b)) for a, b in topo["edges"])
    if len(instance.matroid.blocks) != n_agents:
        raise ParseError("scenario: one matroid block per agent required")

    schedule = data.get("schedule")
    schedule = None if schedule is None else tuple(int(v) for v in schedule)

    drops = data.get("drops", {"mode": "none"})
    _require_keys(drops, ["mode"], optional=["p_success", "failed_hops", "seed"],
                  where="scenario.drops")
    mode = drops["mode"]
    if mode not in ("none", "bernoulli", "explicit"):
        raise ParseError(f"scenario.drops: unknown mode {mode!r}")

    p_grid = data.get("p_grid")
    p_grid = None if p_grid is None else tuple(float(p) for p in p_grid)
    trials = int(data.get("trials", 1))
    if p_grid is not None and trials < 1:
        raise ParseError("scenario: trials must be positive for a probability sweep")

    return ScenarioFile(
        instance=instance,
        n_agents=n_agents,
        edges=edges,
        schedule_override=schedule,
        drop_mode=mode,
        p_success=float(drops.get("p_success", 1.0)),
        failed_hops=tuple(int(h) for h in drops.get("failed_hops", ())),
        drop_seed=int(drops.get("seed", 0)),
        p_grid=p_grid,
        trials=trials,
    )


def load_scenario(path) -> ScenarioFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


@dataclass(frozen=True)
class SweepFile:
    """Cartesian grid of generated instances x solvers x seeds."""

    families: tuple
    sizes: tuple
    kappas: tuple
    seeds: tuple
    solvers: tuple
    cg_steps: int
    cg_samples: int
    cg_mode: str


def parse_sweep(text: str) -> SweepFile:
    data = _loads(text, "sweep")
    _require_keys(
        data, ["format", "families", "sizes", "kappas", "seeds", "solvers"],
        optional=["cg_steps", "cg_samples", "cg_mode"], where="sweep")
    if data["format"] != SWEEP_FORMAT:
        raise ParseError(f"sweep: unsupported format {data['format']!r}")
    known_solvers = ("sg", "sg-partition", "lazy", "cg")
    solvers = tuple(str(s) for s in data["solvers"])
    for s in solvers:
        if s not in known_solvers:
            raise ParseError(f"sweep.solvers: unknown solver {s!r}")
    sweep = SweepFile(
        families=tuple(str(f) for f in data["families"]),
        sizes=tuple(int(n) for n in data["sizes"]),
        kappas=tuple(int(k) for k in data["kappas"]),
        seeds=tuple(int(s) for s in data["seeds"]),
        solvers=solvers,
        cg_steps=int(data.get("cg_steps", 50)),
        cg_samples=int(data.get("cg_samples", 200)),
        cg_mode=str(data.get("cg_mode", "exact")),
    )
    if not (sweep.families and sweep.sizes and sweep.kappas
            and sweep.seeds and sweep.solvers):
        raise ParseError("sweep: the grid must be nonempty in every dimension")
    if sweep.cg_mode not in ("exact", "sampled"):
        raise ParseError(f"sweep.cg_mode: unknown mode {sweep.cg_mode!r}")
    return sweep


def load_sweep(path) -> SweepFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sweep(fh.read())
