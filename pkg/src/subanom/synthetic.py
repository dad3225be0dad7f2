"""Deterministic synthetic graph generators for demos and benchmarks."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .graph import AttributedGraph


def _sample_edges(
    rng: np.random.Generator,
    n: int,
    target_m: int,
    communities: np.ndarray | None = None,
    intra_prob: float = 0.0,
) -> set[tuple[int, int]]:
    """Rejection-sample ``target_m`` distinct undirected edges.

    With a community assignment, each edge keeps its second endpoint
    inside the first endpoint's community with probability intra_prob.
    """
    if target_m > n * (n - 1) // 2:
        raise ConfigError(f"cannot place {target_m} distinct edges on {n} nodes")
    groups: list[np.ndarray] = []
    if communities is not None:
        groups = [np.flatnonzero(communities == c) for c in range(communities.max() + 1)]
    edges: set[tuple[int, int]] = set()
    budget = 200 * target_m + 1000
    while len(edges) < target_m and budget > 0:
        budget -= 1
        u = int(rng.integers(n))
        if communities is not None and rng.random() < intra_prob:
            own = groups[communities[u]]
            v = int(own[rng.integers(len(own))])
        else:
            v = int(rng.integers(n))
        if u == v:
            continue
        edges.add((u, v) if u < v else (v, u))
    if len(edges) < target_m:
        raise ConfigError("edge sampling budget exhausted; lower the edge count")
    return edges


def make_er_graph(
    n: int, edge_count: int, attr_dim: int = 8, seed: int = 0
) -> AttributedGraph:
    """Uniform random graph with exactly ``edge_count`` edges and
    standard-normal attributes."""
    rng = np.random.default_rng(seed)
    edges = _sample_edges(rng, n, edge_count)
    attributes = rng.normal(size=(n, attr_dim))
    return AttributedGraph(n, edges, attributes)


def make_gnp_graph(n: int, p: float, attr_dim: int = 4, seed: int = 0) -> AttributedGraph:
    """Bernoulli random graph: each of the C(n,2) edges present with
    probability p."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if mask[u, v]]
    attributes = rng.normal(size=(n, attr_dim))
    return AttributedGraph(n, edges, attributes)


def make_community_graph(
    n: int = 500,
    communities: int = 10,
    avg_degree: float = 4.0,
    intra_prob: float = 0.9,
    attr_dim: int = 16,
    noise: float = 0.5,
    seed: int = 0,
) -> AttributedGraph:
    """Planted-community benchmark graph.

    Nodes are split into equal contiguous communities; most edges stay
    inside a community. Attributes are the community's Gaussian center
    plus iid noise, so neighbors look alike. That gives both anomaly
    injectors something to break: a planted clique spans communities
    (members mutually dissimilar) and a swapped attribute row clashes
    with its neighborhood.
    """
    if communities < 1 or n < communities:
        raise ConfigError("need at least one node per community")
    rng = np.random.default_rng(seed)
    assignment = (np.arange(n) * communities) // n
    target_m = int(round(avg_degree * n / 2.0))
    edges = _sample_edges(rng, n, target_m, assignment, intra_prob)
    centers = rng.normal(size=(communities, attr_dim))
    attributes = centers[assignment] + noise * rng.normal(size=(n, attr_dim))
    return AttributedGraph(n, edges, attributes)
