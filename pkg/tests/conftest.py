from __future__ import annotations

import pytest

from parksearch.cost import CostContext, CostWeights
from parksearch.graph import LotLayout, build_lot


@pytest.fixture
def three_by_six():
    """The canonical three-lane demo lot: 18 spot nodes, door at the top-left."""
    layout = LotLayout(3, 6, "left", door=(0.0, 3.0), pitch=1.0)
    return build_lot(layout)


@pytest.fixture
def three_by_six_ctx(three_by_six):
    return CostContext(three_by_six, CostWeights(1.0, 10.0), "unit", three_by_six.layout.door)


@pytest.fixture
def two_by_three():
    layout = LotLayout(2, 3, "left", door=(0.0, 0.0), pitch=1.0)
    return build_lot(layout)
