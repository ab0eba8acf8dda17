"""Episode execution against hidden per-spot ground truth.

The simulator owns the clock and the reveal rule: one planning decision per
cycle, one node of motion per decision, and the two spots flanking a node are
revealed the first time the vehicle arrives there. Strategies only ever see
the ``Knowledge`` state; ground truth is read exclusively through
:func:`perceive`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .cost import CostContext, CostWeights, EDGE_MODES, UNIT, running_cost, terminal_cost
from .graph import LotLayout, ParkingLotGraph, build_lot, next_options
from .knowledge import (
    Knowledge,
    SpotObservation,
    arrive,
    init_knowledge,
    observe,
    spots_accounted,
    tick,
)
from .strategies import DECIDERS, FAIL, PARK, PROCEED, STRATEGY_NAMES, SamplingConfig

LEFT = "left"
RIGHT = "right"
SIDES = (LEFT, RIGHT)

PARKED = "parked"
NO_SPOT = "no_spot_failure"


@dataclass(frozen=True)
class GroundTruth:
    """Per-spot availability, keyed (spot-bearing node id, side)."""

    availability: dict[tuple[int, str], bool]

    def sides(self, node: int) -> tuple[bool, bool]:
        return self.availability[(node, LEFT)], self.availability[(node, RIGHT)]

    def node_open(self, node: int) -> bool:
        left, right = self.sides(node)
        return left or right

    @property
    def available_count(self) -> int:
        return sum(1 for open_ in self.availability.values() if open_)

    @property
    def occupied_count(self) -> int:
        return len(self.availability) - self.available_count


def truth_from_bitmap(graph: ParkingLotGraph, bits: str) -> GroundTruth:
    """Decode an availability string: two characters per spot node, left then
    right, in node id order; '1' marks an open spot."""
    expected = graph.layout.spot_count
    if len(bits) != expected:
        raise ValueError(f"bitmap must have {expected} characters, got {len(bits)}")
    if set(bits) - {"0", "1"}:
        raise ValueError("bitmap may contain only '0' and '1'")
    availability = {}
    for i, node in enumerate(graph.spot_nodes):
        availability[(node, LEFT)] = bits[2 * i] == "1"
        availability[(node, RIGHT)] = bits[2 * i + 1] == "1"
    return GroundTruth(availability)


def truth_to_bitmap(graph: ParkingLotGraph, truth: GroundTruth) -> str:
    chars = []
    for node in graph.spot_nodes:
        left, right = truth.sides(node)
        chars.append("1" if left else "0")
        chars.append("1" if right else "0")
    return "".join(chars)


def truth_from_fill(graph: ParkingLotGraph, fill_rate: float, rng: random.Random) -> GroundTruth:
    """Occupy each spot independently with probability ``fill_rate``, then swap
    random spots until the occupied count is exactly round(fill_rate * total)."""
    if not 0.0 <= fill_rate <= 1.0:
        raise ValueError("fill_rate must lie in [0, 1]")
    keys = [(node, side) for node in graph.spot_nodes for side in SIDES]
    availability = {k: rng.random() >= fill_rate for k in keys}
    target_occupied = round(fill_rate * len(keys))
    occupied = sum(1 for v in availability.values() if not v)
    while occupied != target_occupied:
        if occupied < target_occupied:
            pool = [k for k in keys if availability[k]]
            availability[rng.choice(pool)] = False
            occupied += 1
        else:
            pool = [k for k in keys if not availability[k]]
            availability[rng.choice(pool)] = True
            occupied -= 1
    return GroundTruth(availability)


def perceive(graph: ParkingLotGraph, truth: GroundTruth, node: int) -> SpotObservation | None:
    """What the vehicle sees on arriving at a node; nothing off the spot lanes."""
    if not graph.is_spot(node):
        return None
    left, right = truth.sides(node)
    return SpotObservation(node, left, right)


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    layout: LotLayout
    truth: GroundTruth
    weights: CostWeights
    edge_mode: str
    strategy: str
    sampling: SamplingConfig | None = None


class CycleLog(NamedTuple):
    cycle: int
    node: int
    kind: str
    value: float | None
    next_node: int | None
    park_node: int | None
    n_available: int
    n_occupied: int
    revealed_nodes: int


@dataclass(frozen=True)
class EpisodeResult:
    path: tuple[int, ...]
    parked_node: int | None
    parked_side: str | None
    total_cost: float | None
    cycles: int
    outcome: str
    log: tuple[CycleLog, ...]


def build_context(scenario: Scenario) -> CostContext:
    graph = build_lot(scenario.layout)
    return CostContext(graph, scenario.weights, scenario.edge_mode, scenario.layout.door)


def validate_scenario(scenario: Scenario) -> CostContext:
    if scenario.strategy not in STRATEGY_NAMES:
        raise ValueError(f"unknown strategy {scenario.strategy!r}")
    if scenario.edge_mode not in EDGE_MODES:
        raise ValueError(f"unknown edge mode {scenario.edge_mode!r}")
    ctx = build_context(scenario)
    expected_keys = {(n, s) for n in ctx.graph.spot_nodes for s in SIDES}
    if set(scenario.truth.availability) != expected_keys:
        raise ValueError("ground truth does not cover exactly the lot's spots")
    return ctx


def score(ctx: CostContext, path: tuple[int, ...], parked_node: int) -> float:
    """Realized cost of an episode: weighted driving along the taken path plus
    the walking distance from the chosen node."""
    if parked_node not in path:
        raise ValueError("parked node must lie on the path")
    if not ctx.graph.is_spot(parked_node):
        raise ValueError("can only park at a spot-bearing node")
    end = len(path) - 1 - path[::-1].index(parked_node)
    wr, wt = ctx.weights.omega_r, ctx.weights.omega_t
    return wr * running_cost(ctx, path[: end + 1]) + wt * terminal_cost(ctx, parked_node)


def _pick_side(ctx: CostContext, truth: GroundTruth, node: int) -> str:
    """Of the open sides, the one nearer the door; ties go left."""
    left, right = truth.sides(node)
    if left and not right:
        return LEFT
    if right and not left:
        return RIGHT
    x, y = ctx.graph.position(node)
    half = ctx.graph.layout.pitch / 2.0
    dx, dy = ctx.door
    d_left = math.hypot(x - dx, y + half - dy)
    d_right = math.hypot(x - dx, y - half - dy)
    return LEFT if d_left <= d_right else RIGHT


def run_episode(scenario: Scenario) -> EpisodeResult:
    """Drive one full decide-move-observe loop until parked or out of options."""
    ctx = validate_scenario(scenario)
    graph, truth = ctx.graph, scenario.truth
    knowledge = init_knowledge(graph, truth.available_count, truth.occupied_count)
    decide = DECIDERS[scenario.strategy]
    sampling = scenario.sampling
    rng = random.Random(sampling.seed) if sampling is not None else None

    current = graph.entrance
    came_from: int | None = None
    path = [current]
    log: list[CycleLog] = []
    max_cycles = len(graph) * graph.layout.lane_count + len(graph)

    while True:
        if not spots_accounted(graph, knowledge):
            raise RuntimeError("spot accounting broke: knowledge update bug")
        decision = decide(ctx, knowledge, current, came_from, sampling=sampling, rng=rng)
        log.append(
            CycleLog(
                knowledge.cycle,
                current,
                decision.kind,
                decision.value,
                decision.next_node,
                decision.park_node,
                knowledge.n_available,
                knowledge.n_occupied,
                len(knowledge.revealed),
            )
        )
        if decision.kind == PARK:
            node = decision.park_node
            if node != current:
                raise RuntimeError("strategy tried to park away from the current node")
            if not truth.node_open(node):
                raise RuntimeError(
                    f"integrity failure: strategy parked at occupied node {node}"
                )
            side = _pick_side(ctx, truth, node)
            total = score(ctx, tuple(path), node)
            return EpisodeResult(
                tuple(path), node, side, total, knowledge.cycle, PARKED, tuple(log)
            )
        if decision.kind == FAIL:
            return EpisodeResult(
                tuple(path), None, None, None, knowledge.cycle, NO_SPOT, tuple(log)
            )
        if decision.kind != PROCEED:
            raise RuntimeError(f"unknown decision kind {decision.kind!r}")
        nxt = decision.next_node
        if nxt not in next_options(graph, current, came_from):
            raise RuntimeError(f"illegal move {current} -> {nxt}")
        came_from, current = current, nxt
        path.append(current)
        if current not in knowledge.visited_set:
            obs = perceive(graph, truth, current)
            knowledge = observe(knowledge, obs) if obs is not None else arrive(knowledge, current)
        else:
            knowledge = tick(knowledge)
        if knowledge.cycle > max_cycles:
            raise RuntimeError("episode exceeded its cycle bound without terminating")


def random_scenario(
    lane_count: int,
    nodes_per_lane: int,
    fill_rate: float,
    seed: int,
    strategy: str = "guarded",
    door: tuple[float, float] | None = None,
    edge_mode: str = UNIT,
    weights: CostWeights | None = None,
    sampling: SamplingConfig | None = None,
    pitch: float = 1.0,
    entrance_side: str = "left",
    scenario_id: str | None = None,
) -> Scenario:
    """Deterministic random lot: same arguments, same scenario."""
    if door is None:
        door = (0.0, lane_count * pitch)
    layout = LotLayout(lane_count, nodes_per_lane, entrance_side, door, pitch)
    graph = build_lot(layout)
    truth = truth_from_fill(graph, fill_rate, random.Random(seed))
    if weights is None:
        weights = CostWeights(1.0, 10.0)
    if scenario_id is None:
        scenario_id = f"lot{lane_count}x{nodes_per_lane}-fill{fill_rate:g}-seed{seed}"
    return Scenario(scenario_id, layout, truth, weights, edge_mode, strategy, sampling)
