from __future__ import annotations

import numpy as np
import pytest

from subanom.graph import AttributedGraph


def build_graph(n, edges, attributes=None, attr_dim=4, seed=0):
    """Small-graph helper: random attributes unless given explicitly."""
    if attributes is None:
        attributes = np.random.default_rng(seed).normal(size=(n, attr_dim))
    return AttributedGraph(n, edges, attributes)


@pytest.fixture
def triangle_graph():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def triangle_with_pendant():
    # Nodes 0-2 form the triangle, node 3 hangs off node 0.
    return build_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
