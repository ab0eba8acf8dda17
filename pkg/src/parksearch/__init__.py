"""Game-theoretic parking-spot search on grid lots with hidden occupancy."""

from .actions import (
    LotAction,
    VehicleAction,
    bit_permutations,
    feasible_open_counts,
    group_by_direction,
    lot_action_count,
    lot_actions,
    vehicle_traversals,
)
from .cost import (
    BestResponse,
    CostContext,
    CostWeights,
    best_response_cost,
    running_cost,
    terminal_cost,
    total_cost,
)
from .graph import LotLayout, ParkingLotGraph, build_lot, next_options
from .knowledge import (
    Knowledge,
    SpotObservation,
    init_knowledge,
    observe,
    unvisited_spot_nodes,
)
from .sim import (
    EpisodeResult,
    GroundTruth,
    Scenario,
    perceive,
    random_scenario,
    run_episode,
    score,
)
from .strategies import (
    Decision,
    SamplingConfig,
    guarded_decide,
    guarded_value,
    prudent_decide,
    sample_lot_actions,
    sample_vehicle_actions,
    secure_decide,
    secure_value,
    strategy_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BestResponse",
    "CostContext",
    "CostWeights",
    "Decision",
    "EpisodeResult",
    "GroundTruth",
    "Knowledge",
    "LotAction",
    "LotLayout",
    "ParkingLotGraph",
    "SamplingConfig",
    "Scenario",
    "SpotObservation",
    "VehicleAction",
    "best_response_cost",
    "bit_permutations",
    "build_lot",
    "feasible_open_counts",
    "group_by_direction",
    "guarded_decide",
    "guarded_value",
    "init_knowledge",
    "lot_action_count",
    "lot_actions",
    "next_options",
    "observe",
    "perceive",
    "prudent_decide",
    "random_scenario",
    "run_episode",
    "running_cost",
    "sample_lot_actions",
    "sample_vehicle_actions",
    "score",
    "secure_decide",
    "secure_value",
    "strategy_bounds",
    "terminal_cost",
    "total_cost",
    "unvisited_spot_nodes",
    "vehicle_traversals",
]
