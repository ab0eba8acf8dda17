"""Scenario files, batch experiment runs, and machine-readable outputs.

Scenario files are YAML with a fixed schema; unknown keys are rejected so an
experiment record can always be replayed byte-for-byte. Batch runs emit CSV
rows with a fixed, versioned header plus optional per-episode trace files,
and a replay mode re-scores a trace against its scenario.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from hashlib import sha256
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence, TextIO

import yaml

from .cost import COST_TOL, CostWeights, EDGE_MODES
from .graph import LotLayout, build_lot
from .sim import (
    EpisodeResult,
    Scenario,
    build_context,
    run_episode,
    score,
    truth_from_bitmap,
    truth_from_fill,
    truth_to_bitmap,
)
from .strategies import STRATEGY_NAMES, SamplingConfig

RESULT_HEADER = (
    "scenario_id",
    "strategy",
    "seed",
    "outcome",
    "total_cost",
    "cycles",
    "parked_node",
    "path_length",
    "wall_ms",
)
TRACE_VERSION = "trace/v1"


class ScenarioError(ValueError):
    """Malformed scenario document; the message names the offending field."""


class ResultRow(NamedTuple):
    scenario_id: str
    strategy: str
    seed: int
    outcome: str
    total_cost: float | None
    cycles: int
    parked_node: int | None
    path_length: int
    wall_ms: float


# ---------------------------------------------------------------------------
# scenario documents


def _require_mapping(data, path: str) -> dict:
    if not isinstance(data, dict):
        raise ScenarioError(f"{path or 'document'}: expected a mapping")
    return data


def _check_keys(data: dict, path: str, required: set[str], optional: set[str] = frozenset()):
    allowed = required | optional
    for key in data:
        if key not in allowed:
            raise ScenarioError(f"{path}{key}: unknown key")
    for key in required:
        if key not in data:
            raise ScenarioError(f"{path}{key}: missing required key")


def _get_number(data: dict, path: str, key: str, kind=float):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}{key}: expected a number, got {value!r}")
    return kind(value)


def _get_int(data: dict, path: str, key: str, minimum: int | None = None) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"{path}{key}: must be >= {minimum}")
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse and validate one scenario document; raise ScenarioError on any defect."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"document is not valid YAML: {exc}") from exc
    data = _require_mapping(data, "")
    _check_keys(
        data,
        "",
        required={"layout", "truth", "weights", "edge_cost_mode", "strategy"},
        optional={"id", "sampling"},
    )

    lay = _require_mapping(data["layout"], "layout")
    _check_keys(
        lay,
        "layout.",
        required={"lanes", "nodes_per_lane", "door"},
        optional={"pitch", "entrance"},
    )
    lanes = _get_int(lay, "layout.", "lanes", minimum=1)
    npl = _get_int(lay, "layout.", "nodes_per_lane", minimum=1)
    door_map = _require_mapping(lay["door"], "layout.door")
    _check_keys(door_map, "layout.door.", required={"x", "y"})
    door = (_get_number(door_map, "layout.door.", "x"), _get_number(door_map, "layout.door.", "y"))
    pitch = _get_number(lay, "layout.", "pitch") if "pitch" in lay else 1.0
    entrance = lay.get("entrance", "left")
    if entrance not in ("left", "right"):
        raise ScenarioError("layout.entrance: must be 'left' or 'right'")
    try:
        layout = LotLayout(lanes, npl, entrance, door, pitch)
    except ValueError as exc:
        raise ScenarioError(f"layout: {exc}") from exc
    graph = build_lot(layout)

    tr = _require_mapping(data["truth"], "truth")
    if "bitmap" in tr:
        _check_keys(tr, "truth.", required={"bitmap"})
        bits = tr["bitmap"]
        if not isinstance(bits, str):
            raise ScenarioError("truth.bitmap: expected a string of 0/1 characters")
        try:
            truth = truth_from_bitmap(graph, bits)
        except ValueError as exc:
            raise ScenarioError(f"truth.bitmap: {exc}") from exc
    else:
        _check_keys(tr, "truth.", required={"fill_rate", "seed"})
        fill = _get_number(tr, "truth.", "fill_rate")
        if not 0.0 <= fill <= 1.0:
            raise ScenarioError("truth.fill_rate: must lie in [0, 1]")
        seed = _get_int(tr, "truth.", "seed")
        truth = truth_from_fill(graph, fill, random.Random(seed))

    wt = _require_mapping(data["weights"], "weights")
    _check_keys(wt, "weights.", required={"omega_r", "omega_t"})
    try:
        weights = CostWeights(
            _get_number(wt, "weights.", "omega_r"), _get_number(wt, "weights.", "omega_t")
        )
    except ValueError as exc:
        raise ScenarioError(f"weights: {exc}") from exc

    edge_mode = data["edge_cost_mode"]
    if edge_mode not in EDGE_MODES:
        raise ScenarioError(f"edge_cost_mode: must be one of {list(EDGE_MODES)}")
    strategy = data["strategy"]
    if strategy not in STRATEGY_NAMES:
        raise ScenarioError(f"strategy: must be one of {list(STRATEGY_NAMES)}")

    sampling = None
    if "sampling" in data:
        sm = _require_mapping(data["sampling"], "sampling")
        _check_keys(
            sm, "sampling.", required={"max_vehicle_actions", "max_lot_actions"}, optional={"seed"}
        )
        sampling = SamplingConfig(
            _get_int(sm, "sampling.", "max_vehicle_actions", minimum=1),
            _get_int(sm, "sampling.", "max_lot_actions", minimum=1),
            _get_int(sm, "sampling.", "seed") if "seed" in sm else 0,
        )

    scenario_id = data.get("id")
    if scenario_id is None:
        scenario_id = f"lot{lanes}x{npl}-{strategy}"
    elif not isinstance(scenario_id, str):
        raise ScenarioError("id: expected a string")

    return Scenario(scenario_id, layout, truth, weights, edge_mode, strategy, sampling)


def serialize_scenario(scenario: Scenario) -> str:
    """Render a scenario back to YAML; the truth is written as an explicit bitmap."""
    graph = build_lot(scenario.layout)
    doc: dict = {
        "id": scenario.scenario_id,
        "layout": {
            "lanes": scenario.layout.lane_count,
            "nodes_per_lane": scenario.layout.nodes_per_lane,
            "entrance": scenario.layout.entrance_side,
            "pitch": scenario.layout.pitch,
            "door": {"x": scenario.layout.door[0], "y": scenario.layout.door[1]},
        },
        "truth": {"bitmap": truth_to_bitmap(graph, scenario.truth)},
        "weights": {
            "omega_r": scenario.weights.omega_r,
            "omega_t": scenario.weights.omega_t,
        },
        "edge_cost_mode": scenario.edge_mode,
        "strategy": scenario.strategy,
    }
    if scenario.sampling is not None:
        doc["sampling"] = {
            "max_vehicle_actions": scenario.sampling.max_vehicle_actions,
            "max_lot_actions": scenario.sampling.max_lot_actions,
            "seed": scenario.sampling.seed,
        }
    return yaml.safe_dump(doc, sort_keys=False)


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text)


# ---------------------------------------------------------------------------
# traces


def format_trace(scenario: Scenario, seed: int, result: EpisodeResult) -> str:
    lines = [f"# {TRACE_VERSION}"]
    lines.append(f"scenario={scenario.scenario_id}")
    lines.append(f"strategy={scenario.strategy}")
    lines.append(f"seed={seed}")
    for entry in result.log:
        value = "-" if entry.value is None else repr(entry.value)
        nxt = "-" if entry.next_node is None else entry.next_node
        park = "-" if entry.park_node is None else entry.park_node
        lines.append(
            f"k={entry.cycle} node={entry.node} act={entry.kind} next={nxt} "
            f"park={park} value={value} na={entry.n_available} nu={entry.n_occupied} "
            f"revealed={entry.revealed_nodes}"
        )
    lines.append("path=" + ",".join(str(n) for n in result.path))
    lines.append(f"parked={result.parked_node if result.parked_node is not None else '-'}")
    lines.append(f"side={result.parked_side if result.parked_side is not None else '-'}")
    lines.append(
        "total_cost=" + ("-" if result.total_cost is None else repr(result.total_cost))
    )
    lines.append(f"outcome={result.outcome}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> dict:
    fields: dict = {}
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        key, _, value = line.partition("=")
        if key in ("path", "parked", "total_cost", "outcome", "scenario", "strategy", "seed"):
            fields[key] = value
    if "path" not in fields or "outcome" not in fields:
        raise ValueError("trace file is missing path/outcome lines")
    fields["path"] = tuple(int(n) for n in fields["path"].split(",") if n)
    fields["parked"] = None if fields.get("parked") in (None, "-") else int(fields["parked"])
    tc = fields.get("total_cost")
    fields["total_cost"] = None if tc in (None, "-") else float(tc)
    return fields


# ---------------------------------------------------------------------------
# batch running


def _derive_seed(*parts) -> int:
    digest = sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


class BatchTask(NamedTuple):
    scenario: Scenario
    strategy: str
    seed: int


def _run_task(task: BatchTask) -> tuple[ResultRow, str]:
    scenario = replace(task.scenario, strategy=task.strategy)
    if scenario.sampling is not None:
        scenario = replace(scenario, sampling=replace(scenario.sampling, seed=task.seed))
    start = time.perf_counter()
    result = run_episode(scenario)
    wall_ms = (time.perf_counter() - start) * 1000.0
    row = ResultRow(
        scenario.scenario_id,
        task.strategy,
        task.seed,
        result.outcome,
        result.total_cost,
        result.cycles,
        result.parked_node,
        len(result.path),
        round(wall_ms, 3),
    )
    return row, format_trace(scenario, task.seed, result)


def run_batch(
    scenarios: Sequence[Scenario],
    strategies: Sequence[str],
    seeds: Sequence[int],
    jobs: int = 1,
    trace_dir: str | Path | None = None,
) -> list[ResultRow]:
    """Run every (scenario, strategy, seed) combination.

    Output order is the deterministic task order regardless of worker count;
    per-episode failures surface as rows, not aborts.
    """
    tasks = [
        BatchTask(sc, strat, seed)
        for sc in scenarios
        for strat in strategies
        for seed in seeds
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(t) for t in tasks]
    rows = []
    for task, (row, trace) in zip(tasks, outcomes):
        rows.append(row)
        if trace_dir is not None:
            name = f"{row.scenario_id}__{row.strategy}__{row.seed}.trace"
            Path(trace_dir, name).write_text(trace, encoding="utf-8")
    return rows


def write_results(rows: Iterable[ResultRow], fh: TextIO) -> None:
    writer = csv.writer(fh)
    writer.writerow(RESULT_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.scenario_id,
                row.strategy,
                row.seed,
                row.outcome,
                "" if row.total_cost is None else repr(row.total_cost),
                row.cycles,
                "" if row.parked_node is None else row.parked_node,
                row.path_length,
                row.wall_ms,
            ]
        )


# ---------------------------------------------------------------------------
# command line


def _add_sampling_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--max-vehicle-actions",
        type=int,
        default=None,
        help="cap on sampled traversals per cycle (default: exact planning)",
    )
    parser.add_argument(
        "--max-lot-actions",
        type=int,
        default=None,
        help="cap on sampled arrangements per cycle (default: exact planning)",
    )


def _sampling_from_args(args, base: SamplingConfig | None, seed: int) -> SamplingConfig | None:
    if args.max_vehicle_actions is None and args.max_lot_actions is None:
        if base is None:
            return None
        return replace(base, seed=seed)
    veh = args.max_vehicle_actions
    lot = args.max_lot_actions
    if veh is None:
        veh = base.max_vehicle_actions if base else 10**9
    if lot is None:
        lot = base.max_lot_actions if base else 10**9
    return SamplingConfig(veh, lot, seed)


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.strategy is not None:
        scenario = replace(scenario, strategy=args.strategy)
    sampling = _sampling_from_args(args, scenario.sampling, args.seed)
    scenario = replace(scenario, sampling=sampling)
    start = time.perf_counter()
    result = run_episode(scenario)
    wall_ms = round((time.perf_counter() - start) * 1000.0, 3)
    row = ResultRow(
        scenario.scenario_id,
        scenario.strategy,
        args.seed,
        result.outcome,
        result.total_cost,
        result.cycles,
        result.parked_node,
        len(result.path),
        wall_ms,
    )
    if args.trace is not None:
        Path(args.trace).write_text(format_trace(scenario, args.seed, result), encoding="utf-8")
    _emit_rows([row], args.output)
    return 0


def _parse_seed_range(spec: str) -> list[int]:
    if ":" in spec:
        lo, _, hi = spec.partition(":")
        return list(range(int(lo), int(hi)))
    return [int(spec)]


def _cmd_batch(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGY_NAMES:
            raise ScenarioError(f"unknown strategy {s!r}")
    seeds = _parse_seed_range(args.seeds)
    if not seeds:
        raise ScenarioError("--seeds selects no seeds")

    scenarios: list[Scenario] = []
    if args.scenario:
        for path in args.scenario:
            scenarios.append(load_scenario(path))
    else:
        from .sim import random_scenario

        fills = [float(f) for f in args.fill_rates.split(",") if f]
        for fill in fills:
            for i in range(args.count):
                seed = _derive_seed(args.master_seed, fill, i)
                scenarios.append(
                    random_scenario(
                        args.lanes,
                        args.nodes_per_lane,
                        fill,
                        seed,
                        door=(args.door_x, args.door_y),
                        edge_mode=args.edge_cost_mode,
                        weights=CostWeights(args.omega_r, args.omega_t),
                        scenario_id=f"gen-{args.lanes}x{args.nodes_per_lane}-f{fill:g}-i{i}",
                    )
                )
    if not scenarios:
        raise ScenarioError("no scenarios to run: pass --scenario or --count")

    sampling_base = _sampling_from_args(args, None, 0)
    if sampling_base is not None:
        scenarios = [replace(sc, sampling=sampling_base) for sc in scenarios]

    if args.trace_dir is not None:
        Path(args.trace_dir).mkdir(parents=True, exist_ok=True)
    rows = run_batch(scenarios, strategies, seeds, jobs=args.jobs, trace_dir=args.trace_dir)
    _emit_rows(rows, args.output)
    return 0


def _cmd_replay(args) -> int:
    scenario = load_scenario(args.scenario)
    trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    if trace["outcome"] != "parked":
        print("trace recorded no parking; nothing to re-score")
        return 0
    ctx = build_context(scenario)
    recomputed = score(ctx, trace["path"], trace["parked"])
    recorded = trace["total_cost"]
    if recorded is None or abs(recomputed - recorded) > COST_TOL:
        print(f"MISMATCH: recorded {recorded}, recomputed {recomputed}")
        return 1
    print(f"OK: total_cost {recorded} confirmed")
    return 0


def _emit_rows(rows: list[ResultRow], output: str | None) -> None:
    if output in (None, "-"):
        write_results(rows, sys.stdout)
    else:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            write_results(rows, fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parksearch",
        description="Simulate parking-spot search strategies on grid lots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario file")
    p_run.add_argument("--scenario", required=True, help="path to a scenario YAML file")
    p_run.add_argument("--strategy", choices=STRATEGY_NAMES, default=None)
    p_run.add_argument("--seed", type=int, default=0, help="sampling seed for this episode")
    p_run.add_argument("--trace", default=None, help="write a per-cycle trace to this file")
    p_run.add_argument("--output", default=None, help="CSV output path (default stdout)")
    _add_sampling_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run a sweep of scenarios and strategies")
    p_batch.add_argument(
        "--scenario", action="append", default=None, help="scenario file (repeatable)"
    )
    p_batch.add_argument("--lanes", type=int, default=3)
    p_batch.add_argument("--nodes-per-lane", type=int, default=6)
    p_batch.add_argument("--fill-rates", default="0.5,0.7,0.9")
    p_batch.add_argument("--count", type=int, default=0, help="generated scenarios per fill rate")
    p_batch.add_argument("--master-seed", type=int, default=0)
    p_batch.add_argument("--strategies", default="secure,guarded,prudent")
    p_batch.add_argument("--seeds", default="0:1", help="episode seed range, e.g. 0:5")
    p_batch.add_argument("--edge-cost-mode", choices=EDGE_MODES, default="unit")
    p_batch.add_argument("--omega-r", type=float, default=1.0)
    p_batch.add_argument("--omega-t", type=float, default=10.0)
    p_batch.add_argument("--door-x", type=float, default=0.0)
    p_batch.add_argument("--door-y", type=float, default=3.0)
    p_batch.add_argument("--jobs", type=int, default=1)
    p_batch.add_argument("--output", default=None, help="CSV output path (default stdout)")
    p_batch.add_argument("--trace-dir", default=None)
    _add_sampling_flags(p_batch)
    p_batch.set_defaults(func=_cmd_batch)

    p_replay = sub.add_parser("replay", help="re-score a trace against its scenario")
    p_replay.add_argument("--trace", required=True)
    p_replay.add_argument("--scenario", required=True)
    p_replay.set_defaults(func=_cmd_replay)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
