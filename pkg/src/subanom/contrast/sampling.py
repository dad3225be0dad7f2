"""Random-walk-with-restart subgraph sampling."""

from __future__ import annotations

import math

import numpy as np

from ..graph import AttributedGraph, average_degree


def rwr_sample(
    graph: AttributedGraph,
    anchor: int,
    size: int,
    restart_prob: float,
    rng: np.random.Generator,
) -> list[int]:
    """Collect up to ``size`` distinct nodes around ``anchor`` by RWR.

    The walk restarts at the anchor with probability ``restart_prob``
    per step and otherwise moves to a uniform random neighbor. Nodes are
    returned in first-visit order with the anchor first. A step budget
    of 10 * size * (mean degree + 1) bounds the walk, so small or
    disconnected neighborhoods yield fewer than ``size`` nodes; an
    isolated anchor yields just itself.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    if size == 1 or len(graph.neighbors[anchor]) == 0:
        return [anchor]

    budget = math.ceil(10.0 * size * (average_degree(graph) + 1.0))
    visited = [anchor]
    seen = {anchor}
    current = anchor
    for _ in range(budget):
        if rng.random() < restart_prob:
            current = anchor
            continue
        nbrs = graph.neighbors[current]
        current = int(nbrs[rng.integers(len(nbrs))])
        if current not in seen:
            seen.add(current)
            visited.append(current)
            if len(visited) == size:
                break
    return visited
