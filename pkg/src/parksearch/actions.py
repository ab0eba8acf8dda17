"""Action spaces: availability arrangements for the lot, scan traversals for the vehicle.

The lot's action is an assignment of a binary open/closed state to every
unvisited spot-bearing node, consistent with the known spot counts. The
vehicle's action is an admissible traversal: a simple path from its current
node that covers every unvisited spot-bearing node, never re-enters a node it
has already used (which subsumes the no-U-turn and lane-once rules), and ends
the moment coverage is complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .graph import ParkingLotGraph

VehicleAction = tuple[int, ...]


@dataclass(frozen=True)
class LotAction:
    """One availability arrangement over the unvisited spot-bearing nodes."""

    nodes: tuple[int, ...]
    open_nodes: frozenset[int]

    def is_open(self, node: int) -> bool:
        return node in self.open_nodes

    @property
    def open_count(self) -> int:
        return len(self.open_nodes)

    def assignment(self) -> dict[int, int]:
        return {n: int(n in self.open_nodes) for n in self.nodes}


def feasible_open_counts(n_available: int, n_occupied: int) -> range:
    """How many nodes can have at least one open spot, given the counts.

    With two spots per node, ``n_available`` open spots occupy at least
    ⌈n_available/2⌉ nodes (pairing them up) and at most
    min(n_available, node count) nodes (spreading them out).
    """
    if n_available < 0 or n_occupied < 0:
        raise ValueError("spot counts must be nonnegative")
    if (n_available + n_occupied) % 2 != 0:
        raise ValueError("spot total must be even: spots come in flanking pairs")
    node_count = (n_available + n_occupied) // 2
    lo = (n_available + 1) // 2
    hi = min(n_available, node_count)
    return range(lo, hi + 1)


def bit_permutations(n_ones: int, n_zeros: int) -> Iterator[tuple[int, ...]]:
    """All distinct 0/1 vectors with the given composition.

    Emitted in lexicographic order of the one-positions; the count is
    C(n_ones + n_zeros, n_ones).
    """
    if n_ones < 0 or n_zeros < 0:
        raise ValueError("counts must be nonnegative")
    n = n_ones + n_zeros
    for ones in combinations(range(n), n_ones):
        vec = [0] * n
        for i in ones:
            vec[i] = 1
        yield tuple(vec)


def iter_lot_actions(
    counts: Iterable[int],
    n_available: int,
    n_occupied: int,
    unvisited_nodes: tuple[int, ...],
) -> Iterator[LotAction]:
    """Generate every arrangement, smaller open-node counts first.

    Within one count the arrangements follow the lexicographic order of the
    chosen node positions, so generation order is deterministic and downstream
    tie-breaking is reproducible.
    """
    node_count = (n_available + n_occupied) // 2
    if len(unvisited_nodes) != node_count:
        raise ValueError(
            f"expected {node_count} unvisited spot-bearing nodes, got {len(unvisited_nodes)}"
        )
    nodes = tuple(unvisited_nodes)
    for m in counts:
        for ones in combinations(range(node_count), m):
            yield LotAction(nodes, frozenset(nodes[i] for i in ones))


def lot_actions(
    n_available: int, n_occupied: int, unvisited_nodes: tuple[int, ...]
) -> list[LotAction]:
    counts = feasible_open_counts(n_available, n_occupied)
    return list(iter_lot_actions(counts, n_available, n_occupied, unvisited_nodes))


def lot_action_count(n_available: int, n_occupied: int) -> int:
    """Closed-form size of the arrangement space."""
    node_count = (n_available + n_occupied) // 2
    return sum(math.comb(node_count, m) for m in feasible_open_counts(n_available, n_occupied))


def vehicle_traversals(
    graph: ParkingLotGraph, current: int, visited: frozenset[int] | set[int]
) -> tuple[VehicleAction, ...]:
    """All admissible traversals from ``current`` given the visited node set.

    A traversal is a simple path: consecutive nodes adjacent, no node used
    twice, no already-visited node re-entered (the start excepted). It must
    cover every unvisited spot-bearing node and stops at the node that
    completes coverage. Forbidding node reuse makes backward moves within a
    lane and second entries into a lane impossible by construction.

    Results are memoized per (current, visited) on the graph instance; the
    same subproblems recur across planning cycles.
    """
    blocked = frozenset(visited)
    key = (current, blocked)
    cache = graph._traversal_cache
    if key in cache:
        return cache[key]

    remaining = frozenset(
        s for s in graph.spot_nodes if s not in blocked and s != current
    )
    if not remaining:
        result: tuple[VehicleAction, ...] = ((current,),)
        cache[key] = result
        return result

    entrance = graph.entrance
    adj = graph.adj
    out: list[VehicleAction] = []
    path = [current]
    on_path = {current}

    def extend(node: int, left: int) -> None:
        for nxt in adj[node]:
            if nxt in blocked or nxt in on_path or nxt == entrance:
                continue
            path.append(nxt)
            on_path.add(nxt)
            still = left - 1 if nxt in remaining else left
            if still == 0:
                out.append(tuple(path))
            else:
                extend(nxt, still)
            path.pop()
            on_path.remove(nxt)

    extend(current, len(remaining))
    result = tuple(out)
    cache[key] = result
    return result


def group_by_direction(actions: Iterable[VehicleAction]) -> dict[int, tuple[VehicleAction, ...]]:
    """Partition traversals by their second node (the immediate move).

    On these lots a node offers at most two onward moves, so at most two
    groups arise; every group is nonempty by construction.
    """
    actions = list(actions)
    if not actions:
        raise ValueError("cannot group an empty action set")
    start = actions[0][0]
    groups: dict[int, list[VehicleAction]] = {}
    for a in actions:
        if a[0] != start:
            raise ValueError("all actions must share the same start node")
        if len(a) < 2:
            raise ValueError(f"traversal {a} has no second node to group by")
        groups.setdefault(a[1], []).append(a)
    return {k: tuple(v) for k, v in sorted(groups.items())}
