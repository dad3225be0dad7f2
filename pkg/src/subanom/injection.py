"""Ground-truth anomaly injection for benchmark construction.

Topology anomalies: repeatedly pick a group of nodes (disjoint across
groups) and wire it into a clique, optionally dropping a fixed share of
the newly added edges again. Attribute anomalies: overwrite a node's
attribute row with the row of the most distant node among a random
candidate set. Both injectors are deterministic given the config seed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import CapacityError, ConfigError
from .graph import KIND_ATTRIBUTE, KIND_NONE, KIND_TOPOLOGY, AttributedGraph, GroundTruth


@dataclass(frozen=True)
class InjectionConfig:
    clique_size: int = 15
    clique_count: int = 5
    edge_drop_ratio: float = 0.0
    attr_anomaly_count: int = 75
    candidate_set_size: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.clique_size < 0 or self.clique_count < 0 or self.attr_anomaly_count < 0:
            raise ConfigError("injection counts must be non-negative")
        if self.clique_count > 0 and self.clique_size < 2:
            raise ConfigError("clique_size must be at least 2 when cliques are injected")
        if not (0.0 <= self.edge_drop_ratio < 1.0):
            raise ConfigError("edge_drop_ratio must lie in [0, 1)")
        if self.attr_anomaly_count > 0 and self.candidate_set_size < 1:
            raise ConfigError("candidate_set_size must be at least 1")

    @property
    def topology_anomaly_count(self) -> int:
        return self.clique_size * self.clique_count


def inject_topology_anomalies(
    graph: AttributedGraph,
    config: InjectionConfig,
    rng: np.random.Generator,
    truth: GroundTruth | None = None,
) -> tuple[AttributedGraph, GroundTruth]:
    """Plant ``clique_count`` cliques of ``clique_size`` random nodes each.

    Group members are sampled without replacement and disjoint across
    groups. All missing in-group edges are added; with a positive drop
    ratio r, floor(r * C(size, 2)) of the newly added edges are removed
    again, never touching pre-existing ones. The attribute matrix is
    untouched.
    """
    truth = truth.copy() if truth is not None else GroundTruth.clean(graph.n)
    total = config.topology_anomaly_count
    if total > graph.n:
        raise CapacityError(
            f"cannot place {total} topology anomalies in a graph with {graph.n} nodes"
        )
    if total == 0:
        return graph, truth

    chosen = rng.choice(graph.n, size=total, replace=False)
    edges = set(graph.edges)
    pair_budget = config.clique_size * (config.clique_size - 1) // 2
    drop_per_clique = int(config.edge_drop_ratio * pair_budget)

    for g in range(config.clique_count):
        members = sorted(int(v) for v in chosen[g * config.clique_size : (g + 1) * config.clique_size])
        new_edges = []
        for u, v in combinations(members, 2):
            if (u, v) not in edges:
                edges.add((u, v))
                new_edges.append((u, v))
        if drop_per_clique > 0 and new_edges:
            take = min(drop_per_clique, len(new_edges))
            for idx in rng.choice(len(new_edges), size=take, replace=False):
                edges.discard(new_edges[int(idx)])
        truth.mark(members, KIND_TOPOLOGY)

    return graph.with_edges(edges), truth


def inject_attribute_anomalies(
    graph: AttributedGraph,
    config: InjectionConfig,
    rng: np.random.Generator,
    truth: GroundTruth | None = None,
) -> tuple[AttributedGraph, GroundTruth]:
    """Swap the attribute rows of random unlabeled nodes for distant ones.

    For each target, ``candidate_set_size`` other nodes are drawn and
    the target's row is replaced by the candidate row with the largest
    Euclidean distance (ties broken by lowest candidate id). Targets
    avoid every node already labeled in ``truth``. The edge set is
    untouched.
    """
    truth = truth.copy() if truth is not None else GroundTruth.clean(graph.n)
    count = config.attr_anomaly_count
    if count == 0:
        return graph, truth
    if config.candidate_set_size > graph.n - 1:
        raise CapacityError(
            f"candidate_set_size {config.candidate_set_size} exceeds n-1 = {graph.n - 1}"
        )

    unlabeled = np.nonzero(truth.kinds == 0)[0]
    if count > unlabeled.size:
        raise CapacityError(
            f"cannot place {count} attribute anomalies: only {unlabeled.size} unlabeled nodes left"
        )
    targets = rng.choice(unlabeled, size=count, replace=False)

    attributes = graph.attributes.copy()
    others = np.empty(graph.n - 1, dtype=np.int64)
    for target in (int(t) for t in targets):
        others[:target] = np.arange(target)
        others[target:] = np.arange(target + 1, graph.n)
        candidates = np.sort(others[rng.choice(graph.n - 1, size=config.candidate_set_size, replace=False)])
        dists = np.linalg.norm(attributes[candidates] - attributes[target], axis=1)
        best = candidates[int(np.argmax(dists))]  # argmax takes the first max: lowest id
        attributes[target] = attributes[best]
        truth.mark([target], KIND_ATTRIBUTE)

    return graph.with_attributes(attributes), truth


def inject_anomalies(
    graph: AttributedGraph, config: InjectionConfig
) -> tuple[AttributedGraph, GroundTruth]:
    """Topology injection followed by attribute injection, one seeded rng."""
    rng = np.random.default_rng(config.seed)
    graph, truth = inject_topology_anomalies(graph, config, rng)
    graph, truth = inject_attribute_anomalies(graph, config, rng, truth)
    return graph, truth


def write_injection_manifest(
    path: str | Path, config: InjectionConfig, graph: AttributedGraph, truth: GroundTruth
) -> None:
    """Record the injection config and outcome for reproduction."""
    payload = {
        "config": asdict(config),
        "nodes": graph.n,
        "edges": graph.m,
        "anomalies": {
            KIND_TOPOLOGY: truth.count(KIND_TOPOLOGY),
            KIND_ATTRIBUTE: truth.count(KIND_ATTRIBUTE),
            "total": int(truth.labels.sum()),
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def unlabeled_count(truth: GroundTruth) -> int:
    return truth.count(KIND_NONE)
