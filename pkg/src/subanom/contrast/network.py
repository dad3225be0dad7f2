"""One-layer graph-convolution encoder with a bilinear discriminator.

A target node is encoded by the shared weight matrix alone while its
sampled subgraph (anchor attributes masked to zero) passes through one
symmetric-normalized convolution layer and an average readout. The
bilinear head scores node/subgraph agreement and the whole stack trains
under binary cross-entropy with analytically derived gradients.

Gradient conventions: ReLU subgradient at exactly zero is 0, losses are
summed (not averaged) over both members of every pair in a batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..graph import AttributedGraph, normalized_adjacency
from .sampling import rwr_sample


@dataclass
class ModelParams:
    """Trainable weights: the convolution matrix and the bilinear form."""

    gcn_weight: np.ndarray  # (attr_dim, hidden_dim)
    bilinear_weight: np.ndarray  # (hidden_dim, hidden_dim)

    @property
    def attr_dim(self) -> int:
        return self.gcn_weight.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.gcn_weight.shape[1]

    def copy(self) -> "ModelParams":
        return ModelParams(self.gcn_weight.copy(), self.bilinear_weight.copy())


@dataclass(frozen=True)
class ContrastPair:
    """A target node with its positive and negative sampled subgraphs.

    Both node lists carry their walk anchor at position 0; the positive
    anchor is the target itself, the negative anchor is some other node.
    """

    target: int
    positive_nodes: tuple[int, ...]
    negative_nodes: tuple[int, ...]


@dataclass(frozen=True)
class PairScore:
    """Discriminator outputs for one pair; y=1 positive, y=0 negative."""

    s_pos: float
    s_neg: float


def init_params(attr_dim: int, hidden_dim: int, rng: np.random.Generator) -> ModelParams:
    """Uniform Glorot initialization for both weight matrices."""
    lim_w = np.sqrt(6.0 / (attr_dim + hidden_dim))
    lim_b = np.sqrt(6.0 / (2 * hidden_dim))
    return ModelParams(
        gcn_weight=rng.uniform(-lim_w, lim_w, size=(attr_dim, hidden_dim)),
        bilinear_weight=rng.uniform(-lim_b, lim_b, size=(hidden_dim, hidden_dim)),
    )


def _sigmoid(u: float) -> float:
    if u >= 0:
        return 1.0 / (1.0 + np.exp(-u))
    eu = np.exp(u)
    return eu / (1.0 + eu)


def _softplus(u: float) -> float:
    # log(1 + e^u) without overflow; equals -log(1 - sigmoid(u)).
    return max(u, 0.0) + np.log1p(np.exp(-abs(u)))


def sample_pair(
    graph: AttributedGraph,
    target: int,
    size: int,
    restart_prob: float,
    rng: np.random.Generator,
) -> ContrastPair:
    """Draw the positive and negative subgraphs for one target node."""
    positive = rwr_sample(graph, target, size, restart_prob, rng)
    negative_anchor = target
    while negative_anchor == target:
        negative_anchor = int(rng.integers(graph.n))
    negative = rwr_sample(graph, negative_anchor, size, restart_prob, rng)
    return ContrastPair(target=target, positive_nodes=tuple(positive), negative_nodes=tuple(negative))


def encode_subgraph(
    params: ModelParams,
    graph: AttributedGraph,
    node_list: Sequence[int],
    mask_anchor: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """One convolution layer plus average readout over a node list.

    Returns (E, e): the per-node embedding matrix after ReLU and its
    column mean. With ``mask_anchor`` the first node's attributes are
    zeroed before encoding.
    """
    if len(node_list) == 0:
        raise ValueError("node_list must be non-empty")
    x = graph.attributes[list(node_list)].copy()
    if mask_anchor:
        x[0] = 0.0
    s = normalized_adjacency(graph, node_list)
    embeddings = np.maximum(s @ (x @ params.gcn_weight), 0.0)
    return embeddings, embeddings.mean(axis=0)


def encode_node(params: ModelParams, attribute_row: np.ndarray) -> np.ndarray:
    """Project one attribute row through the shared convolution weights."""
    return np.maximum(np.asarray(attribute_row, dtype=np.float64) @ params.gcn_weight, 0.0)


def discriminate(params: ModelParams, z: np.ndarray, e: np.ndarray) -> float:
    """Bilinear agreement score sigmoid(z W~ e), strictly inside (0, 1)."""
    return _sigmoid(float(z @ params.bilinear_weight @ e))


def bce_loss(pair_scores: Sequence[PairScore]) -> float:
    """Binary cross-entropy summed over both members of every pair."""
    total = 0.0
    for ps in pair_scores:
        total += -np.log(ps.s_pos) - np.log(1.0 - ps.s_neg)
    return float(total)


@dataclass
class BatchResult:
    loss: float
    grad_w: np.ndarray
    grad_wt: np.ndarray
    scores: list[PairScore]


def batch_step(
    params: ModelParams, graph: AttributedGraph, pairs: Sequence[ContrastPair]
) -> BatchResult:
    """Loss, analytic gradients and scores for a batch of pairs.

    The attribute-times-weight product is computed once for the union of
    nodes the batch touches; masking the anchor afterwards is exact
    because a zeroed attribute row maps to a zeroed product row. The
    weight gradient is assembled as a single stacked matrix product at
    the end, which keeps the summation order fixed and the result
    deterministic.
    """
    if len(pairs) == 0:
        raise ValueError("batch must be non-empty")
    w, wt = params.gcn_weight, params.bilinear_weight

    needed = sorted(
        {p.target for p in pairs}
        | {v for p in pairs for v in p.positive_nodes}
        | {v for p in pairs for v in p.negative_nodes}
    )
    index = {node: i for i, node in enumerate(needed)}
    xw = graph.attributes[needed] @ w  # (unique nodes, hidden)

    loss = 0.0
    scores: list[PairScore] = []
    w_row_ids: list[int] = []  # node whose attribute row multiplies the grad row
    w_row_grads: list[np.ndarray] = []
    z_rows: list[np.ndarray] = []
    ge_rows: list[np.ndarray] = []

    for pair in pairs:
        z_pre = xw[index[pair.target]]
        z = np.maximum(z_pre, 0.0)
        z_wt = z @ wt
        dz = np.zeros_like(z)
        pair_s: dict[int, float] = {}

        for y, nodes in ((1, pair.positive_nodes), (0, pair.negative_nodes)):
            t = len(nodes)
            rows = xw[[index[v] for v in nodes]]
            rows[0] = 0.0  # anchor mask
            s_norm = normalized_adjacency(graph, nodes)
            m = s_norm @ rows
            e = np.maximum(m, 0.0).sum(axis=0) / t

            u = float(z_wt @ e)
            s_val = _sigmoid(u)
            pair_s[y] = s_val
            loss += _softplus(-u) if y == 1 else _softplus(u)

            g = s_val - y
            # Bilinear weight: sum of g * outer(z, e).
            z_rows.append(z)
            ge_rows.append(g * e)
            # Node-projection path.
            dz += g * (wt @ e)
            # Subgraph path: readout mean, ReLU gate, then back through
            # the normalized adjacency to the per-node product rows.
            dm = (m > 0.0) * (g / t * z_wt)
            g_rows = s_norm.T @ dm
            for l in range(1, t):  # row 0 is masked, no attribute flows through it
                w_row_ids.append(nodes[l])
                w_row_grads.append(g_rows[l])

        dz_pre = dz * (z_pre > 0.0)
        w_row_ids.append(pair.target)
        w_row_grads.append(dz_pre)
        scores.append(PairScore(s_pos=pair_s[1], s_neg=pair_s[0]))

    if w_row_grads:
        grad_w = graph.attributes[w_row_ids].T @ np.vstack(w_row_grads)
    else:
        grad_w = np.zeros_like(w)
    grad_wt = np.vstack(z_rows).T @ np.vstack(ge_rows)
    return BatchResult(loss=float(loss), grad_w=grad_w, grad_wt=grad_wt, scores=scores)


def gradients(
    params: ModelParams, graph: AttributedGraph, pairs: Sequence[ContrastPair]
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic loss gradients with respect to both weight matrices."""
    result = batch_step(params, graph, pairs)
    return result.grad_w, result.grad_wt


def batch_loss(params: ModelParams, graph: AttributedGraph, pairs: Sequence[ContrastPair]) -> float:
    """Loss alone; used by finite-difference checks."""
    return batch_step(params, graph, pairs).loss
