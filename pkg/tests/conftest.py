from __future__ import annotations

import numpy as np
import pytest

from qgns import Graph, demo_graph


@pytest.fixture
def k2() -> Graph:
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def demo5() -> Graph:
    return demo_graph()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
