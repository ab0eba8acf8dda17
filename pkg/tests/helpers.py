"""Independent oracles and state generators shared across the test suite.

Everything here recomputes from first principles (exhaustive enumeration,
re-summed route costs) so it can stand as an independent check against the
library's own evaluators.
"""

from __future__ import annotations

import math
import random

from parksearch.actions import LotAction, vehicle_traversals
from parksearch.cost import CostContext, CostWeights
from parksearch.graph import ParkingLotGraph, build_lot
from parksearch.knowledge import Knowledge, arrive, init_knowledge, observe, unvisited_spot_nodes
from parksearch.sim import Scenario, perceive, random_scenario


# ---------------------------------------------------------------------------
# best-response oracle: try every (candidate node, prefix) pair


def oracle_edge_cost(ctx: CostContext, u: int, v: int) -> float:
    if ctx.edge_mode == "unit":
        return 1.0
    ux, uy = ctx.graph.position(u)
    vx, vy = ctx.graph.position(v)
    return math.sqrt((ux - vx) ** 2 + (uy - vy) ** 2)


def oracle_best_response(ctx, knowledge, traversal, arrangement):
    """Brute force: walk every prefix, price every open node, take the minimum."""
    graph = ctx.graph
    wr, wt = ctx.weights.omega_r, ctx.weights.omega_t
    dx, dy = ctx.door
    best = None
    for pos in range(len(traversal)):
        node = traversal[pos]
        if not graph.is_spot(node):
            continue
        if node in knowledge.visited_set:
            state = knowledge.revealed.get(node, 0)
        else:
            state = 1 if arrangement.is_open(node) else 0
        if state != 1:
            continue
        if node in traversal[:pos]:
            continue  # price only the first occurrence
        prefix = 0.0
        for a, b in zip(traversal[: pos + 1], traversal[1 : pos + 1]):
            prefix += oracle_edge_cost(ctx, a, b)
        x, y = graph.position(node)
        cost = wr * prefix + wt * math.sqrt((x - dx) ** 2 + (y - dy) ** 2)
        key = (cost, pos, node)
        if best is None or key < best:
            best = key
    if best is None:
        return math.inf, None
    return best[0], best[2]


# ---------------------------------------------------------------------------
# traversal oracle: filter every simple path by the admissibility properties


def lane_runs(graph: ParkingLotGraph, seq) -> list[list[int]]:
    """Maximal runs of consecutive same-lane spot nodes within a sequence."""
    runs = []
    current_lane = None
    for node in seq:
        lane = graph.lane_of(node) if graph.is_spot(node) else None
        if lane is None:
            current_lane = None
            continue
        if lane != current_lane:
            runs.append([node])
            current_lane = lane
        else:
            runs[-1].append(node)
    return runs


def admissible_check(graph: ParkingLotGraph, visited, seq) -> bool:
    """Property filter, written independently of the generator."""
    if not seq:
        return False
    # adjacency
    for u, v in zip(seq, seq[1:]):
        if (min(u, v), max(u, v)) not in graph.edges:
            return False
    # simple path that avoids previously visited nodes (start excepted)
    if len(set(seq)) != len(seq):
        return False
    if any(n in visited for n in seq[1:]):
        return False
    if graph.entrance in seq[1:]:
        return False
    # forward-only inside a lane: column coordinate must move monotonically
    for run in lane_runs(graph, seq):
        xs = [graph.position(n)[0] for n in run]
        ups = all(a < b for a, b in zip(xs, xs[1:]))
        downs = all(a > b for a, b in zip(xs, xs[1:]))
        if not (ups or downs):
            return False
    # each horizontal lane entered at most once
    lanes_seen = [graph.lane_of(run[0]) for run in lane_runs(graph, seq)]
    if len(lanes_seen) != len(set(lanes_seen)):
        return False
    # covers every unvisited spot-bearing node and stops right at coverage
    remaining = {
        s for s in graph.spot_nodes if s not in visited and s != seq[0]
    }
    if remaining:
        if not remaining.issubset(seq):
            return False
        if seq[-1] not in remaining:
            return False
        if remaining.issubset(seq[:-1]):
            return False
    elif len(seq) != 1:
        return False
    return True


def enumerate_traversals_brute(graph: ParkingLotGraph, current: int, visited) -> set:
    """Every admissible sequence, found by filtering all simple paths."""
    found = set()
    blocked = set(visited)

    def rec(path: list[int], on_path: set[int]) -> None:
        if admissible_check(graph, visited, tuple(path)):
            found.add(tuple(path))
        node = path[-1]
        for nxt in graph.adj[node]:
            if nxt in on_path or nxt in blocked or nxt == graph.entrance:
                continue
            path.append(nxt)
            on_path.add(nxt)
            rec(path, on_path)
            path.pop()
            on_path.remove(nxt)

    rec([current], {current})
    return found


# ---------------------------------------------------------------------------
# random reachable planning states


def random_reachable_state(
    rng: random.Random,
    max_lanes: int = 3,
    max_nodes_per_lane: int = 3,
    edge_mode: str = "unit",
    weights: CostWeights | None = None,
):
    """A random scenario advanced by a random number of legal moves.

    Every produced state is reachable by a real episode: each move follows an
    admissible traversal recomputed from the current state.
    """
    lanes = rng.randint(1, max_lanes)
    npl = rng.randint(1, max_nodes_per_lane)
    fill = rng.choice((0.2, 0.4, 0.6, 0.8))
    scenario = random_scenario(
        lanes,
        npl,
        fill,
        seed=rng.randrange(2**32),
        edge_mode=edge_mode,
        weights=weights or CostWeights(1.0, 10.0),
    )
    graph = build_lot(scenario.layout)
    ctx = CostContext(graph, scenario.weights, scenario.edge_mode, scenario.layout.door)
    knowledge = init_knowledge(
        graph, scenario.truth.available_count, scenario.truth.occupied_count
    )
    current, came_from = graph.entrance, None
    for _ in range(rng.randint(0, lanes * npl + 2 * lanes)):
        options = [
            t for t in vehicle_traversals(graph, current, knowledge.visited_set) if len(t) >= 2
        ]
        if not options:
            break
        step = rng.choice(options)[1]
        came_from, current = current, step
        obs = perceive(graph, scenario.truth, step)
        knowledge = observe(knowledge, obs) if obs is not None else arrive(knowledge, step)
    return scenario, ctx, knowledge, current, came_from


def random_arrangement(rng: random.Random, knowledge: Knowledge, graph) -> LotAction:
    """One uniform-ish arrangement, built without the library's sampler."""
    from parksearch.actions import feasible_open_counts

    nodes = unvisited_spot_nodes(graph, knowledge)
    counts = list(feasible_open_counts(knowledge.n_available, knowledge.n_occupied))
    m = rng.choice(counts)
    return LotAction(nodes, frozenset(rng.sample(list(nodes), m)))
