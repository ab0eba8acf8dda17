"""Ego information state: visited nodes, revealed states, remaining spot counts.

Updates are value-semantic: every operation returns a fresh ``Knowledge``.
``visited`` keeps arrival order (the heuristic strategy needs to know which
open node was found first); membership checks go through ``visited_set``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .graph import ParkingLotGraph


class SpotObservation(NamedTuple):
    node: int
    left_available: bool
    right_available: bool

    @property
    def node_state(self) -> int:
        return 1 if (self.left_available or self.right_available) else 0

    @property
    def available_sides(self) -> int:
        return int(self.left_available) + int(self.right_available)


@dataclass(frozen=True)
class Knowledge:
    visited: tuple[int, ...]
    visited_set: frozenset[int]
    revealed: dict[int, int]  # spot-bearing node -> binary state; never mutated
    n_available: int
    n_occupied: int
    cycle: int

    @property
    def unvisited_spot_total(self) -> int:
        return (self.n_available + self.n_occupied) // 2


def init_knowledge(graph: ParkingLotGraph, total_available: int, total_occupied: int) -> Knowledge:
    """Information state on arrival at the entrance, before anything is seen."""
    if total_available < 0 or total_occupied < 0:
        raise ValueError("spot counts must be nonnegative")
    if total_available + total_occupied != graph.layout.spot_count:
        raise ValueError(
            f"counts {total_available}+{total_occupied} do not match lot capacity "
            f"{graph.layout.spot_count}"
        )
    entrance = graph.entrance
    return Knowledge(
        visited=(entrance,),
        visited_set=frozenset((entrance,)),
        revealed={},
        n_available=total_available,
        n_occupied=total_occupied,
        cycle=0,
    )


def observe(knowledge: Knowledge, obs: SpotObservation) -> Knowledge:
    """Fold in the spots seen on first arrival at a spot-bearing node."""
    if obs.node in knowledge.visited_set:
        raise ValueError(f"node {obs.node} was already observed")
    avail = obs.available_sides
    n_available = knowledge.n_available - avail
    n_occupied = knowledge.n_occupied - (2 - avail)
    if n_available < 0 or n_occupied < 0:
        raise ValueError("observation inconsistent with remaining counts")
    revealed = dict(knowledge.revealed)
    revealed[obs.node] = obs.node_state
    return Knowledge(
        visited=knowledge.visited + (obs.node,),
        visited_set=knowledge.visited_set | {obs.node},
        revealed=revealed,
        n_available=n_available,
        n_occupied=n_occupied,
        cycle=knowledge.cycle + 1,
    )


def arrive(knowledge: Knowledge, node: int) -> Knowledge:
    """Record first arrival at a node without spots; counts are untouched."""
    if node in knowledge.visited_set:
        raise ValueError(f"node {node} was already visited")
    return Knowledge(
        visited=knowledge.visited + (node,),
        visited_set=knowledge.visited_set | {node},
        revealed=knowledge.revealed,
        n_available=knowledge.n_available,
        n_occupied=knowledge.n_occupied,
        cycle=knowledge.cycle + 1,
    )


def tick(knowledge: Knowledge) -> Knowledge:
    """Advance the cycle on a repeat visit; nothing new is learned."""
    return Knowledge(
        visited=knowledge.visited,
        visited_set=knowledge.visited_set,
        revealed=knowledge.revealed,
        n_available=knowledge.n_available,
        n_occupied=knowledge.n_occupied,
        cycle=knowledge.cycle + 1,
    )


def unvisited_spot_nodes(graph: ParkingLotGraph, knowledge: Knowledge) -> tuple[int, ...]:
    """Spot-bearing nodes not yet seen, in ascending id order."""
    return tuple(n for n in graph.spot_nodes if n not in knowledge.visited_set)


def revealed_open(knowledge: Knowledge, node: int) -> bool:
    return knowledge.revealed.get(node, 0) == 1


def spots_accounted(graph: ParkingLotGraph, knowledge: Knowledge) -> bool:
    """Conservation: unknown spots plus revealed spots equal the lot total."""
    seen = 2 * len(knowledge.revealed)
    return knowledge.n_available + knowledge.n_occupied + seen == graph.layout.spot_count
