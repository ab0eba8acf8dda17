"""Grid-lot graph: horizontal spot lanes joined by two vertical columns.

A lot is a stack of horizontal lanes, each flanked by parking spots on both
sides. The lane ends are linked by two vertical connector lanes, and a single
entrance stub attaches below the lane nearest the entrance. Every node in a
horizontal lane fronts exactly two spots; vertical and entrance nodes carry
none.
"""

from __future__ import annotations

from dataclasses import dataclass

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
ENTRANCE = "entrance"


@dataclass(frozen=True)
class LotLayout:
    """Static description of a rectangular lot."""

    lane_count: int
    nodes_per_lane: int
    entrance_side: str = "left"
    door: tuple[float, float] = (0.0, 0.0)
    pitch: float = 1.0

    def __post_init__(self) -> None:
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.nodes_per_lane < 1:
            raise ValueError("nodes_per_lane must be >= 1")
        if self.entrance_side not in ("left", "right"):
            raise ValueError(
                f"entrance_side must be 'left' or 'right', got {self.entrance_side!r}"
            )
        if self.pitch <= 0:
            raise ValueError("pitch must be positive")

    @property
    def spot_node_count(self) -> int:
        return self.lane_count * self.nodes_per_lane

    @property
    def spot_count(self) -> int:
        # two spots flank every horizontal-lane node
        return 2 * self.spot_node_count


@dataclass(frozen=True)
class LotNode:
    id: int
    pos: tuple[float, float]
    kind: str
    lane: int | None = None

    @property
    def spot_bearing(self) -> bool:
        return self.kind == HORIZONTAL


class ParkingLotGraph:
    """Immutable adjacency structure for one lot. Build via :func:`build_lot`."""

    def __init__(
        self,
        layout: LotLayout,
        nodes: list[LotNode],
        edges: list[tuple[int, int]],
        entrance: int,
        rows: tuple[tuple[int, ...], ...],
    ) -> None:
        self.layout = layout
        self.nodes = {n.id: n for n in nodes}
        if len(self.nodes) != len(nodes):
            raise ValueError("duplicate node ids")
        adj: dict[int, list[int]] = {n.id: [] for n in nodes}
        edge_set: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v or u not in self.nodes or v not in self.nodes:
                raise ValueError(f"bad edge ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            if key in edge_set:
                continue
            edge_set.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.adj = {u: tuple(sorted(vs)) for u, vs in adj.items()}
        self.edges = frozenset(edge_set)
        self.entrance = entrance
        self.rows = rows
        self.spot_nodes = tuple(sorted(i for i, n in self.nodes.items() if n.spot_bearing))
        # per-cycle traversal enumeration cache; see actions.vehicle_traversals
        self._traversal_cache: dict = {}

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adj[node]

    def position(self, node: int) -> tuple[float, float]:
        return self.nodes[node].pos

    def is_spot(self, node: int) -> bool:
        return self.nodes[node].spot_bearing

    def lane_of(self, node: int) -> int | None:
        return self.nodes[node].lane

    def row_of(self, node: int) -> tuple[int, ...] | None:
        lane = self.nodes[node].lane
        if lane is None or self.nodes[node].kind != HORIZONTAL:
            return None
        return self.rows[lane]

    def __len__(self) -> int:
        return len(self.nodes)


def build_lot(layout: LotLayout) -> ParkingLotGraph:
    """Construct the lot graph with deterministic node indexing.

    Spot-bearing nodes take ids 1..lane_count*nodes_per_lane, row-major from
    the lane nearest the entrance and counting away from the entrance side.
    Vertical connector nodes follow (near column bottom-up, then far column),
    and the entrance stub gets the last id.
    """
    lanes, width, pitch = layout.lane_count, layout.nodes_per_lane, layout.pitch

    # grid columns 0..width+1; column 0 is the entrance-side connector
    def x_of(col: int) -> float:
        if layout.entrance_side == "left":
            return col * pitch
        return (width + 1 - col) * pitch

    nodes: list[LotNode] = []
    edges: list[tuple[int, int]] = []
    rows: list[tuple[int, ...]] = []

    def spot_id(row: int, col: int) -> int:
        return row * width + col  # col is 1-based

    for r in range(lanes):
        row_ids = []
        for c in range(1, width + 1):
            nid = spot_id(r, c)
            nodes.append(LotNode(nid, (x_of(c), r * pitch), HORIZONTAL, lane=r))
            row_ids.append(nid)
        rows.append(tuple(row_ids))

    near_base = lanes * width
    far_base = near_base + lanes
    for r in range(lanes):
        nodes.append(LotNode(near_base + 1 + r, (x_of(0), r * pitch), VERTICAL, lane=None))
        nodes.append(LotNode(far_base + 1 + r, (x_of(width + 1), r * pitch), VERTICAL, lane=None))

    entrance_id = far_base + lanes + 1
    nodes.append(LotNode(entrance_id, (x_of(0), -pitch), ENTRANCE, lane=None))

    for r in range(lanes):
        near, far = near_base + 1 + r, far_base + 1 + r
        edges.append((near, spot_id(r, 1)))
        for c in range(1, width):
            edges.append((spot_id(r, c), spot_id(r, c + 1)))
        edges.append((spot_id(r, width), far))
        if r + 1 < lanes:
            edges.append((near, near + 1))
            edges.append((far, far + 1))
    edges.append((entrance_id, near_base + 1))

    return ParkingLotGraph(layout, nodes, edges, entrance_id, tuple(rows))


def next_options(graph: ParkingLotGraph, current: int, came_from: int | None = None) -> tuple[int, ...]:
    """Nodes the vehicle may move to next: neighbors minus the one behind it.

    Reversing within a lane is never offered, and the entrance stub cannot be
    re-entered. Mid-lane this is the single forward neighbor; just past a lane
    exit it is the up/down pair (fewer at lot corners).
    """
    if current not in graph.nodes:
        raise KeyError(f"unknown node {current}")
    return tuple(
        v for v in graph.adj[current] if v != came_from and v != graph.entrance
    )
