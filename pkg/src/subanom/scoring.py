"""Per-node anomaly scores: topology, attribute, and their fusion.

Topology scores come from the region schedule: members of a tight
substructure whose embeddings disagree with each other get large values.
Attribute scores replay the contrastive discriminator over many fresh
subgraph samples. Both are min-max normalized before fusion.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .contrast.network import ContrastPair, ModelParams, _sigmoid, sample_pair
from .errors import ConfigError, DataError
from .graph import AttributedGraph, GroundTruth, normalized_adjacency
from .regions import RoundSchedule

SIMILARITY_FLOOR = 1e-3


def pair_similarity(z_k: np.ndarray, z_q: np.ndarray) -> float:
    """Cosine similarity; either vector having zero norm gives 0."""
    nk = float(np.linalg.norm(z_k))
    nq = float(np.linalg.norm(z_q))
    if nk == 0.0 or nq == 0.0:
        return 0.0
    return float(np.dot(z_k, z_q) / (nk * nq))


def substructure_similarity(embeddings: np.ndarray, members: Sequence[int]) -> float:
    """Mean pairwise cosine similarity over all unordered member pairs."""
    if len(members) < 2:
        raise ValueError("substructure must have at least 2 members")
    rows = embeddings[list(members)]
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = rows / safe[:, None]  # zero-norm rows stay zero, pairs involving them score 0
    gram = unit @ unit.T
    t = len(members)
    pair_sum = (gram.sum() - np.trace(gram)) / 2.0
    return float(pair_sum / (t * (t - 1) // 2))


def topology_scores(
    schedule: RoundSchedule,
    embeddings: np.ndarray,
    n: int,
    floor: float = SIMILARITY_FLOOR,
) -> np.ndarray:
    """Substructure-based per-node scores, averaged over every round.

    A member of substructure C_j in a round contributes |C_j| / d_j for
    that round, with the mean similarity d_j clamped to ``floor`` from
    below so anti-correlated substructures cap out instead of exploding.
    Nodes outside every substructure of a round contribute 0. With no
    rounds at all the result is all zeros. As a side effect each
    substructure's ``avg_similarity`` field is filled in.
    """
    scores = np.zeros(n, dtype=np.float64)
    if schedule.round_count == 0:
        return scores
    for _, substructures in schedule.rounds:
        for sub in substructures:
            d_j = substructure_similarity(embeddings, sub.members)
            sub.avg_similarity = d_j
            value = sub.size / max(d_j, floor)
            scores[list(sub.members)] += value
    return scores / schedule.round_count


def _round_rng(seed: int, round_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, round_index)))


def _pair_scores_fast(
    projected: np.ndarray,
    graph: AttributedGraph,
    pair: ContrastPair,
    wt: np.ndarray,
) -> tuple[float, float]:
    # projected holds X @ W pre-activation; the anchor mask commutes with
    # the product, so zeroing the projected row is exact.
    z = np.maximum(projected[pair.target], 0.0)
    z_wt = z @ wt
    out = []
    for nodes in (pair.positive_nodes, pair.negative_nodes):
        rows = projected[list(nodes)]
        rows[0] = 0.0
        s_norm = normalized_adjacency(graph, nodes)
        e = np.maximum(s_norm @ rows, 0.0).mean(axis=0)
        out.append(_sigmoid(float(z_wt @ e)))
    return out[0], out[1]


def attribute_score_round(
    params: ModelParams,
    graph: AttributedGraph,
    subgraph_size: int,
    restart_prob: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One inference round: a_i = s_negative - s_positive for every node.

    Normal nodes sit near -1 (high positive agreement), anomalies drift
    toward 0 because they disagree with both subgraphs.
    """
    projected = graph.attributes @ params.gcn_weight
    scores = np.zeros(graph.n, dtype=np.float64)
    for node in range(graph.n):
        pair = sample_pair(graph, node, subgraph_size, restart_prob, rng)
        s_pos, s_neg = _pair_scores_fast(projected, graph, pair, params.bilinear_weight)
        scores[node] = s_neg - s_pos
    return scores


def attribute_scores(
    params: ModelParams,
    graph: AttributedGraph,
    rounds: int = 256,
    subgraph_size: int = 4,
    restart_prob: float = 0.15,
    seed: int = 0,
) -> np.ndarray:
    """Mean of ``rounds`` independent inference rounds.

    Each round draws its generator from (seed, round_index), so the
    result is the fixed-order arithmetic mean of the per-round outputs
    and any round can be reproduced in isolation.
    """
    if rounds < 1:
        raise ConfigError("rounds must be at least 1")
    accum = np.zeros(graph.n, dtype=np.float64)
    for r in range(rounds):
        accum += attribute_score_round(
            params, graph, subgraph_size, restart_prob, _round_rng(seed, r)
        )
    return accum / rounds


def normalize(scores: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant vector maps to all zeros."""
    scores = np.asarray(scores, dtype=np.float64)
    low = scores.min()
    span = scores.max() - low
    if span == 0.0:
        return np.zeros_like(scores)
    return (scores - low) / span


@dataclass(frozen=True)
class FusionConfig:
    """How normalized topology and attribute scores combine."""

    alpha: float | None = 0.8
    strategy: str = "weight"
    normalization: str = "min_max"

    def __post_init__(self):
        if self.strategy not in ("weight", "max", "sum"):
            raise ConfigError(f"unknown fusion strategy {self.strategy!r}")
        if self.normalization != "min_max":
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        if self.strategy == "weight":
            if self.alpha is None:
                raise ConfigError("strategy 'weight' requires alpha")
            if not (0.0 <= self.alpha <= 1.0):
                raise ConfigError("alpha must lie in [0, 1]")


def fuse(topo_norm: np.ndarray, attr_norm: np.ndarray, config: FusionConfig) -> np.ndarray:
    """Combine normalized score vectors into the final per-node score."""
    if config.strategy == "weight":
        if config.alpha is None:
            raise ConfigError("strategy 'weight' requires alpha")
        return (1.0 - config.alpha) * topo_norm + config.alpha * attr_norm
    if config.strategy == "max":
        return np.maximum(topo_norm, attr_norm)
    return topo_norm + attr_norm


@dataclass
class ScoreTable:
    """Raw topology and attribute scores plus the fused final score."""

    topo: np.ndarray
    attr: np.ndarray
    final: np.ndarray

    @property
    def n(self) -> int:
        return len(self.final)

    def to_csv(self, path: str | Path, truth: GroundTruth | None = None) -> None:
        """Write one row per node; label/kind are blank without truth."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["node_id", "score_topo", "score_attr", "score_final", "label", "kind"]
            )
            for i in range(self.n):
                label = "" if truth is None else int(truth.labels[i])
                kind = "" if truth is None else truth.kind_of(i)
                writer.writerow(
                    [i, repr(float(self.topo[i])), repr(float(self.attr[i])),
                     repr(float(self.final[i])), label, kind]
                )

    @classmethod
    def from_csv(cls, path: str | Path) -> "ScoreTable":
        topo: list[float] = []
        attr: list[float] = []
        final: list[float] = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[:4] != [
                "node_id", "score_topo", "score_attr", "score_final",
            ]:
                raise DataError(f"{path}: unexpected score table header {header!r}")
            for lineno, row in enumerate(reader, start=2):
                try:
                    if int(row[0]) != lineno - 2:
                        raise ValueError("node ids must be dense and ordered")
                    topo.append(float(row[1]))
                    attr.append(float(row[2]))
                    final.append(float(row[3]))
                except (ValueError, IndexError) as exc:
                    raise DataError(f"{path}, line {lineno}: {exc}") from exc
        if not final:
            raise DataError(f"{path}: empty score table")
        return cls(
            topo=np.array(topo), attr=np.array(attr), final=np.array(final)
        )


def score_graph(
    schedule: RoundSchedule,
    embeddings: np.ndarray,
    params: ModelParams,
    graph: AttributedGraph,
    fusion: FusionConfig | None = None,
    rounds: int = 256,
    subgraph_size: int = 4,
    restart_prob: float = 0.15,
    seed: int = 0,
) -> ScoreTable:
    """Full scoring stage: topology, attribute, normalize, fuse."""
    fusion = fusion or FusionConfig()
    topo = topology_scores(schedule, embeddings, graph.n)
    attr = attribute_scores(params, graph, rounds, subgraph_size, restart_prob, seed)
    final = fuse(normalize(topo), normalize(attr), fusion)
    return ScoreTable(topo=topo, attr=attr, final=final)
