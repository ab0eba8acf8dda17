"""Route, terminal and best-response cost evaluation.

The composite cost of stopping at a node is a weighted sum of driving effort
(edge costs along the route taken) and spot quality (straight-line distance
from the node to the door). Infeasible choices are priced at +inf so min/max
reductions propagate them correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .actions import LotAction, VehicleAction
from .graph import ParkingLotGraph
from .knowledge import Knowledge

UNIT = "unit"
EUCLIDEAN = "euclidean"
EDGE_MODES = (UNIT, EUCLIDEAN)

#: absolute tolerance for cost comparisons in tests and replay checks
COST_TOL = 1e-9

INF = math.inf


@dataclass(frozen=True)
class CostWeights:
    omega_r: float
    omega_t: float

    def __post_init__(self) -> None:
        if self.omega_r <= 0 or self.omega_t <= 0:
            raise ValueError("both weights must be strictly positive")


@dataclass(frozen=True, eq=False)
class CostContext:
    """Everything needed to price a route and a stopping node."""

    graph: ParkingLotGraph
    weights: CostWeights
    edge_mode: str
    door: tuple[float, float]

    def __post_init__(self) -> None:
        if self.edge_mode not in EDGE_MODES:
            raise ValueError(f"edge_mode must be one of {EDGE_MODES}, got {self.edge_mode!r}")


def edge_cost(ctx: CostContext, u: int, v: int) -> float:
    key = (u, v) if u < v else (v, u)
    if key not in ctx.graph.edges:
        raise ValueError(f"nodes {u} and {v} are not adjacent")
    if ctx.edge_mode == UNIT:
        return 1.0
    ux, uy = ctx.graph.position(u)
    vx, vy = ctx.graph.position(v)
    return math.hypot(ux - vx, uy - vy)


def running_cost(ctx: CostContext, route: VehicleAction) -> float:
    """Total edge cost along a route; zero for a single-node route."""
    total = 0.0
    for u, v in zip(route, route[1:]):
        total += edge_cost(ctx, u, v)
    return total


def terminal_cost(ctx: CostContext, node: int) -> float:
    x, y = ctx.graph.position(node)
    return math.hypot(x - ctx.door[0], y - ctx.door[1])


def park_cost(ctx: CostContext, node: int) -> float:
    """Cost of stopping right here: no driving, terminal component only."""
    return ctx.weights.omega_t * terminal_cost(ctx, node)


def total_cost(ctx: CostContext, route: VehicleAction) -> float:
    """Weighted driving-plus-walking cost of following ``route`` and stopping at its end."""
    if not route:
        raise ValueError("route must contain at least the current node")
    return ctx.weights.omega_r * running_cost(ctx, route) + ctx.weights.omega_t * terminal_cost(
        ctx, route[-1]
    )


class BestResponse(NamedTuple):
    cost: float
    target: int | None


Candidate = tuple[float, int, int]  # (stop cost, position in traversal, node)


def traversal_candidates(
    ctx: CostContext, knowledge: Knowledge, traversal: VehicleAction
) -> tuple[list[Candidate], list[Candidate]]:
    """Price every potential stopping node along a traversal.

    Returns (fixed, floating): ``fixed`` are nodes whose availability is
    already known to be open (typically just the start node), ``floating`` are
    unvisited spot-bearing nodes whose state depends on the lot's arrangement.
    Costs use the prefix of the traversal up to each node's first occurrence.
    """
    graph = ctx.graph
    wr, wt = ctx.weights.omega_r, ctx.weights.omega_t
    fixed: list[Candidate] = []
    floating: list[Candidate] = []
    prefix = 0.0
    seen: set[int] = set()
    for pos, node in enumerate(traversal):
        if pos > 0:
            prefix += edge_cost(ctx, traversal[pos - 1], node)
        if node in seen or not graph.is_spot(node):
            continue
        seen.add(node)
        stop = wr * prefix + wt * terminal_cost(ctx, node)
        if node in knowledge.visited_set:
            if knowledge.revealed.get(node, 0) == 1:
                fixed.append((stop, pos, node))
        else:
            floating.append((stop, pos, node))
    return fixed, floating


def best_response_cost(
    ctx: CostContext, knowledge: Knowledge, traversal: VehicleAction, arrangement: LotAction
) -> BestResponse:
    """Cheapest stop along ``traversal`` under one arrangement.

    Visited nodes use their revealed states, unvisited nodes the arrangement.
    Ties break to the earliest position in the traversal, then the lowest node
    id. Returns +inf and no target when no stop is open.
    """
    fixed, floating = traversal_candidates(ctx, knowledge, traversal)
    best: Candidate | None = None
    for cand in fixed:
        if best is None or cand < best:
            best = cand
    for cand in floating:
        if arrangement.is_open(cand[2]) and (best is None or cand < best):
            best = cand
    if best is None:
        return BestResponse(INF, None)
    return BestResponse(best[0], best[2])
