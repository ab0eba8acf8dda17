"""Planning strategies for one decision cycle.

Three strategies share the same contract: a pure function of the cost context,
the current information state and the vehicle's position that returns a
``Decision`` (park here, proceed to a neighbor, or give up).

* ``secure`` commits to the full traversal whose worst-case arrangement is
  cheapest, then takes its first step.
* ``guarded`` prices each available direction by letting the arrangement move
  first and the vehicle respond within that direction's traversal group, then
  steps toward the cheapest direction unless parking here already beats it.
* ``prudent`` is a heuristic benchmark: scan rows nearest the door first, skip
  the first open node hoping for a better one, grab the next open node found,
  and loop back to the skipped node if nothing else turns up.

For the full arrangement space the worst case has a closed form (see
``_full_worst_value``); explicit enumeration is used whenever a concrete,
possibly sampled, action subset is supplied. Both paths select among the same
candidate costs, so they agree bitwise and tie-break identically.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

from .actions import (
    LotAction,
    VehicleAction,
    feasible_open_counts,
    group_by_direction,
    lot_action_count,
    lot_actions,
    vehicle_traversals,
)
from .cost import CostContext, best_response_cost, park_cost, traversal_candidates
from .graph import ParkingLotGraph
from .knowledge import Knowledge, revealed_open, unvisited_spot_nodes

INF = math.inf

PARK = "park"
PROCEED = "proceed"
FAIL = "fail"

SECURE = "secure"
GUARDED = "guarded"
PRUDENT = "prudent"
STRATEGY_NAMES = (SECURE, GUARDED, PRUDENT)


@dataclass(frozen=True)
class SamplingConfig:
    """Caps on the action subsets used to approximate large planning problems."""

    max_vehicle_actions: int
    max_lot_actions: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_vehicle_actions < 1 or self.max_lot_actions < 1:
            raise ValueError("sampling caps must be >= 1")


@dataclass(frozen=True)
class Decision:
    kind: str
    park_node: int | None = None
    next_node: int | None = None
    value: float | None = None
    target: int | None = None
    planned: VehicleAction | None = None
    direction: int | None = None


# ---------------------------------------------------------------------------
# worst-case evaluation over explicit (possibly sampled) arrangement sets


def _response_value(
    ctx: CostContext, knowledge: Knowledge, traversal: VehicleAction, arrangement: LotAction
) -> float:
    return best_response_cost(ctx, knowledge, traversal, arrangement).cost


def _worst_over(
    ctx: CostContext,
    knowledge: Knowledge,
    group: tuple[VehicleAction, ...],
    arrangements: list[LotAction],
) -> tuple[float, LotAction]:
    """Max over arrangements of the best in-group response; first maximizer wins."""
    if not arrangements:
        raise ValueError("arrangement set must be nonempty")
    worst_val = -INF
    worst_act = arrangements[0]
    for act in arrangements:
        val = min(_response_value(ctx, knowledge, t, act) for t in group)
        if val > worst_val:
            worst_val, worst_act = val, act
    return worst_val, worst_act


def secure_value(
    ctx: CostContext,
    knowledge: Knowledge,
    traversals: list[VehicleAction] | tuple[VehicleAction, ...],
    arrangements: list[LotAction],
) -> tuple[float, VehicleAction]:
    """Min over traversals of the max over arrangements of the response cost.

    Ties break by generation order on both levels. An all-infeasible grid
    yields +inf with the first traversal designated.
    """
    if not traversals:
        raise ValueError("traversal set must be nonempty")
    best_val = INF
    best_t = traversals[0]
    for t in traversals:
        worst, _ = _worst_over(ctx, knowledge, (t,), arrangements)
        if worst < best_val:
            best_val, best_t = worst, t
    return best_val, best_t


def guarded_value(
    ctx: CostContext,
    knowledge: Knowledge,
    groups: dict[int, tuple[VehicleAction, ...]],
    arrangements: list[LotAction],
) -> dict[int, float]:
    """Worst-case cost of each direction, letting the vehicle respond in-group."""
    if not groups:
        raise ValueError("direction groups must be nonempty")
    return {
        v_next: _worst_over(ctx, knowledge, group, arrangements)[0]
        for v_next, group in sorted(groups.items())
    }


# ---------------------------------------------------------------------------
# closed-form evaluation over the full arrangement space
#
# Every admissible traversal covers all unvisited spot-bearing nodes, so any
# arrangement places all of its open nodes on the traversal. The adversary
# maximizes the response cost by opening as few nodes as the counts allow
# (m = ceil(n_available / 2)) and picking the m most expensive ones; the
# response is then the m-th largest stop cost, floored by any already-revealed
# open stop (normally the current node). This is exactly the enumerated
# max-min and avoids materializing the arrangement space.


def _full_worst_value(
    ctx: CostContext, knowledge: Knowledge, group: tuple[VehicleAction, ...]
) -> float:
    m = (knowledge.n_available + 1) // 2
    fixed_best = INF
    node_cost: dict[int, float] = {}
    for t in group:
        fixed, floating = traversal_candidates(ctx, knowledge, t)
        for c, _, _ in fixed:
            if c < fixed_best:
                fixed_best = c
        for c, _, node in floating:
            prev = node_cost.get(node, INF)
            if c < prev:
                node_cost[node] = c
    if m == 0:
        return fixed_best
    ranked = sorted(node_cost.values(), reverse=True)
    return min(fixed_best, ranked[m - 1])


def _full_worst_arrangement(
    ctx: CostContext, knowledge: Knowledge, traversal: VehicleAction
) -> LotAction:
    """First maximizer, in generation order, of the worst case for one traversal.

    Maximizing arrangements open exactly m = ceil(n_available/2) nodes, all
    priced at or above the worst-case value; the generation-order first one
    opens the lowest-indexed such nodes.
    """
    nodes = unvisited_spot_nodes(ctx.graph, knowledge)
    m = (knowledge.n_available + 1) // 2
    if m == 0:
        return LotAction(nodes, frozenset())
    value = _full_worst_value(ctx, knowledge, (traversal,))
    _, floating = traversal_candidates(ctx, knowledge, traversal)
    cost_of = {node: c for c, _, node in floating}
    qualifying = [n for n in nodes if cost_of[n] >= value]
    return LotAction(nodes, frozenset(qualifying[:m]))


# ---------------------------------------------------------------------------
# sampling


def sample_lot_actions(
    n_available: int,
    n_occupied: int,
    unvisited_nodes: tuple[int, ...],
    cap: int,
    rng: random.Random,
) -> list[LotAction]:
    """Uniform sample without replacement from the arrangement space.

    Draws an open-node count with probability proportional to its arrangement
    count, then a uniform arrangement for it, so the space never needs to be
    materialized. When the cap covers the whole space the exact enumeration is
    returned in generation order and the rng is left untouched.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    total = lot_action_count(n_available, n_occupied)
    if cap >= total:
        return lot_actions(n_available, n_occupied, unvisited_nodes)
    counts = feasible_open_counts(n_available, n_occupied)
    node_count = len(unvisited_nodes)
    if total <= 4 * cap:
        # dense regime: rejection would thrash, enumerate and subsample
        full = lot_actions(n_available, n_occupied, unvisited_nodes)
        return rng.sample(full, cap)
    weights = [math.comb(node_count, m) for m in counts]
    out: list[LotAction] = []
    seen: set[frozenset[int]] = set()
    while len(out) < cap:
        m = rng.choices(counts, weights)[0]
        open_nodes = frozenset(unvisited_nodes[i] for i in rng.sample(range(node_count), m))
        if open_nodes in seen:
            continue
        seen.add(open_nodes)
        out.append(LotAction(unvisited_nodes, open_nodes))
    return out


def sample_vehicle_actions(
    traversals: tuple[VehicleAction, ...] | list[VehicleAction],
    cap: int,
    rng: random.Random,
    split_directions: bool = False,
) -> list[VehicleAction]:
    """Uniform subset of traversals; optionally guarantee per-direction coverage.

    With ``split_directions`` the cap is divided evenly across direction
    groups so every direction stays priceable; a cap smaller than the group
    count keeps one traversal from each of the first groups in key order.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    traversals = list(traversals)
    if cap >= len(traversals):
        return traversals
    if not split_directions:
        return rng.sample(traversals, cap)
    groups = group_by_direction(traversals)
    keys = sorted(groups)
    quotas = {k: 0 for k in keys}
    if cap < len(keys):
        for k in keys[:cap]:
            quotas[k] = 1
    else:
        base, extra = divmod(cap, len(keys))
        for i, k in enumerate(keys):
            quotas[k] = base + (1 if i < extra else 0)
    out: list[VehicleAction] = []
    for k in keys:
        group = list(groups[k])
        take = min(quotas[k], len(group))
        if take:
            out.extend(rng.sample(group, take))
    return out


# ---------------------------------------------------------------------------
# decisions


def _degenerate_decision(ctx: CostContext, knowledge: Knowledge, current: int) -> Decision:
    """No unvisited spot-bearing nodes remain: park here or give up."""
    if revealed_open(knowledge, current):
        return Decision(PARK, park_node=current, value=park_cost(ctx, current), target=current)
    return Decision(FAIL)


def _plan_secure(
    ctx: CostContext,
    knowledge: Knowledge,
    traversals: tuple[VehicleAction, ...] | list[VehicleAction],
    arrangements: list[LotAction] | None,
) -> tuple[float, VehicleAction, LotAction]:
    if arrangements is None:
        best_val, best_t = INF, traversals[0]
        for t in traversals:
            val = _full_worst_value(ctx, knowledge, (t,))
            if val < best_val:
                best_val, best_t = val, t
        worst = _full_worst_arrangement(ctx, knowledge, best_t)
        return best_val, best_t, worst
    best_val, best_t = INF, traversals[0]
    best_worst: LotAction | None = None
    for t in traversals:
        val, worst = _worst_over(ctx, knowledge, (t,), arrangements)
        if val < best_val or best_worst is None:
            best_val, best_t, best_worst = val, t, worst
    return best_val, best_t, best_worst


def secure_decide(
    ctx: CostContext,
    knowledge: Knowledge,
    current: int,
    came_from: int | None = None,
    sampling: SamplingConfig | None = None,
    rng: random.Random | None = None,
) -> Decision:
    """Commit to the best worst-case traversal; park when it says stop here."""
    nodes = unvisited_spot_nodes(ctx.graph, knowledge)
    if not nodes:
        return _degenerate_decision(ctx, knowledge, current)
    traversals: tuple[VehicleAction, ...] | list[VehicleAction]
    traversals = vehicle_traversals(ctx.graph, current, knowledge.visited_set)
    if not traversals:
        return Decision(FAIL)
    arrangements: list[LotAction] | None = None
    if sampling is not None:
        if rng is None:
            rng = random.Random(sampling.seed)
        traversals = sample_vehicle_actions(traversals, sampling.max_vehicle_actions, rng)
        arrangements = sample_lot_actions(
            knowledge.n_available, knowledge.n_occupied, nodes, sampling.max_lot_actions, rng
        )
    value, chosen, worst = _plan_secure(ctx, knowledge, traversals, arrangements)
    target = best_response_cost(ctx, knowledge, chosen, worst).target
    if target == current and revealed_open(knowledge, current):
        return Decision(PARK, park_node=current, value=value, target=target, planned=chosen)
    if len(chosen) < 2:
        return Decision(FAIL, value=value)
    return Decision(
        PROCEED, next_node=chosen[1], value=value, target=target, planned=chosen
    )


def guarded_decide(
    ctx: CostContext,
    knowledge: Knowledge,
    current: int,
    came_from: int | None = None,
    sampling: SamplingConfig | None = None,
    rng: random.Random | None = None,
) -> Decision:
    """Price each direction against the worst arrangement; park on a tie or better."""
    nodes = unvisited_spot_nodes(ctx.graph, knowledge)
    if not nodes:
        return _degenerate_decision(ctx, knowledge, current)
    traversals: tuple[VehicleAction, ...] | list[VehicleAction]
    traversals = vehicle_traversals(ctx.graph, current, knowledge.visited_set)
    if not traversals:
        return Decision(FAIL)
    if sampling is not None:
        if rng is None:
            rng = random.Random(sampling.seed)
        traversals = sample_vehicle_actions(
            traversals, sampling.max_vehicle_actions, rng, split_directions=True
        )
        arrangements = sample_lot_actions(
            knowledge.n_available, knowledge.n_occupied, nodes, sampling.max_lot_actions, rng
        )
        groups = group_by_direction(traversals)
        values = guarded_value(ctx, knowledge, groups, arrangements)
    else:
        groups = group_by_direction(traversals)
        values = {
            v_next: _full_worst_value(ctx, knowledge, group)
            for v_next, group in sorted(groups.items())
        }
    # cheapest direction; ties resolve to the lowest node id
    v_next = min(values, key=lambda k: (values[k], k))
    value = values[v_next]
    if revealed_open(knowledge, current):
        stay = park_cost(ctx, current)
        if value >= stay:
            return Decision(PARK, park_node=current, value=stay, direction=v_next)
    return Decision(PROCEED, next_node=v_next, value=value, direction=v_next)


def strategy_bounds(
    ctx: CostContext,
    knowledge: Knowledge,
    traversals: tuple[VehicleAction, ...] | list[VehicleAction],
    arrangements: list[LotAction] | None = None,
) -> tuple[float, float]:
    """Worst-case values of the commit-first plan and the direction-level plan.

    The committed value can never undercut the direction value: fixing the
    whole traversal before the arrangement responds concedes more. Computed by
    enumeration when an arrangement set is given, closed form otherwise.
    """
    if not traversals:
        raise ValueError("traversal set must be nonempty")
    groups = group_by_direction(traversals)
    if arrangements is None:
        commit = min(_full_worst_value(ctx, knowledge, (t,)) for t in traversals)
        direction = min(
            _full_worst_value(ctx, knowledge, group) for group in groups.values()
        )
        return commit, direction
    commit, _ = secure_value(ctx, knowledge, traversals, arrangements)
    per_direction = guarded_value(ctx, knowledge, groups, arrangements)
    return commit, min(per_direction.values())


# ---------------------------------------------------------------------------
# prudent heuristic


def _shortest_route(
    ctx: CostContext,
    start: int,
    came_from: int | None,
    goals: set[int],
    allowed: set[int],
) -> list[int] | None:
    """Cheapest walk from ``start`` to any goal that never reverses direction.

    States are (node, previous node) pairs so the no-reversal rule survives
    repeated visits. Nodes outside ``allowed`` are not entered; the entrance
    stub is never re-entered.
    """
    graph = ctx.graph
    start_state = (start, came_from)
    dist: dict[tuple[int, int | None], float] = {start_state: 0.0}
    parent: dict[tuple[int, int | None], tuple[int, int | None]] = {}
    heap: list[tuple[float, int, int, tuple[int, int | None]]] = []
    heapq.heappush(heap, (0.0, start, -1, start_state))
    settled: set[tuple[int, int | None]] = set()
    while heap:
        d, node, _, state = heapq.heappop(heap)
        if state in settled:
            continue
        settled.add(state)
        if node in goals:
            route = [node]
            while state in parent:
                state = parent[state]
                route.append(state[0])
            route.reverse()
            return route
        prev = state[1]
        for nxt in graph.adj[node]:
            if nxt == prev or nxt == graph.entrance or nxt not in allowed:
                continue
            nd = d + (1.0 if ctx.edge_mode == "unit" else _euclid(graph, node, nxt))
            nstate = (nxt, node)
            if nd < dist.get(nstate, INF):
                dist[nstate] = nd
                parent[nstate] = state
                heapq.heappush(heap, (nd, nxt, node, nstate))
    return None


def _euclid(graph: ParkingLotGraph, u: int, v: int) -> float:
    ux, uy = graph.position(u)
    vx, vy = graph.position(v)
    return math.hypot(ux - vx, uy - vy)


def _row_door_order(ctx: CostContext) -> list[int]:
    """Row indices sorted nearest-the-door first."""
    graph = ctx.graph
    dx, dy = ctx.door

    def row_distance(row: tuple[int, ...]) -> float:
        return min(
            math.hypot(graph.position(n)[0] - dx, graph.position(n)[1] - dy) for n in row
        )

    order = sorted(range(len(graph.rows)), key=lambda r: (row_distance(graph.rows[r]), r))
    return order


def prudent_decide(
    ctx: CostContext,
    knowledge: Knowledge,
    current: int,
    came_from: int | None = None,
    sampling: SamplingConfig | None = None,
    rng: random.Random | None = None,
) -> Decision:
    """Greedy row scan: skip the first open node found, take the next one.

    Rows are visited nearest the door first. The very first open node of the
    search is passed over in the hope of a better one; after that the vehicle
    parks at the next open node it reaches. If the whole lot is scanned and
    only the skipped node remains, the vehicle loops back to it along the
    cheapest non-reversing route (lanes may be re-driven for this).
    """
    graph = ctx.graph

    first_open: int | None = None
    for node in knowledge.visited:
        if knowledge.revealed.get(node, 0) == 1:
            first_open = node
            break

    row_order = _row_door_order(ctx)
    unscanned = [
        r
        for r in row_order
        if any(n not in knowledge.visited_set for n in graph.rows[r])
    ]
    all_scanned = not unscanned

    if revealed_open(knowledge, current) and (current != first_open or all_scanned):
        return Decision(PARK, park_node=current, value=park_cost(ctx, current))

    if graph.is_spot(current):
        row = graph.row_of(current)
        ahead = [
            n
            for n in graph.adj[current]
            if n in row and n not in knowledge.visited_set and n != came_from
        ]
        if ahead:
            # mid-scan: keep rolling forward through the lane
            return Decision(PROCEED, next_node=min(ahead))

    if unscanned:
        target_row = graph.rows[unscanned[0]]
        allowed = set(knowledge.visited_set)
        allowed.update(n for n, node in graph.nodes.items() if not node.spot_bearing)
        allowed.update(target_row)
        allowed.add(current)
        entries = {target_row[0], target_row[-1]}
        route = _shortest_route(ctx, current, came_from, entries, allowed)
        if route is not None and len(route) >= 2:
            return Decision(PROCEED, next_node=route[1])
        return Decision(FAIL)

    if first_open is None:
        return Decision(FAIL)

    # everything scanned, nothing better found: head back to the skipped node
    allowed = set(knowledge.visited_set)
    allowed.update(n for n, node in graph.nodes.items() if not node.spot_bearing)
    route = _shortest_route(ctx, current, came_from, {first_open}, allowed)
    if route is None or len(route) < 2:
        return Decision(FAIL)
    return Decision(PROCEED, next_node=route[1])


DECIDERS = {
    SECURE: secure_decide,
    GUARDED: guarded_decide,
    PRUDENT: prudent_decide,
}
