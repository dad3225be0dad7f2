"""Independent reference implementations used to check the real ones.

Everything here is written from the mathematical definition, favoring
obviousness over speed, and deliberately avoids sharing code with the
package under test.
"""

from __future__ import annotations

import numpy as np


def adjacency_matrix(graph) -> np.ndarray:
    a = np.zeros((graph.n, graph.n), dtype=bool)
    for u, v in graph.edges:
        a[u, v] = True
        a[v, u] = True
    return a


def peel_core(adjacency: np.ndarray, k: int) -> set[int]:
    """k-core by literal fixpoint peeling on an adjacency matrix."""
    n = adjacency.shape[0]
    keep = np.ones(n, dtype=bool)
    while True:
        degrees = (adjacency & keep[None, :]).sum(axis=1)
        bad = keep & (degrees < k)
        if not bad.any():
            break
        keep &= ~bad
    return {int(v) for v in np.flatnonzero(keep)}


def components(adjacency: np.ndarray, nodes: set[int]) -> list[set[int]]:
    """Connected components of an induced subgraph, by repeated flooding."""
    remaining = set(nodes)
    out = []
    while remaining:
        start = min(remaining)
        comp = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for u in np.flatnonzero(adjacency[v]):
                u = int(u)
                if u in remaining and u not in comp:
                    comp.add(u)
                    frontier.append(u)
        remaining -= comp
        out.append(comp)
    return out


def auc_by_pair_counting(scores, labels) -> float:
    """AUC as the win rate of positive-negative score pairs, ties at 1/2."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return float(wins / (len(pos) * len(neg)))


def ranking_by_score_then_id(scores) -> list[int]:
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def ap_by_rank_enumeration(scores, labels) -> float:
    """Average precision straight from its definition."""
    order = ranking_by_score_then_id(list(scores))
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    total = 0.0
    hits = 0
    for rank, idx in enumerate(order, start=1):
        if labels[idx] == 1:
            hits += 1
            total += hits / rank
    return total / n_pos


def precision_at_k_by_enumeration(scores, labels, k: int) -> float:
    order = ranking_by_score_then_id(list(scores))
    labels = np.asarray(labels)
    return float(sum(int(labels[i] == 1) for i in order[:k]) / k)


def finite_difference_gradients(loss_fn, params, step: float = 1e-5):
    """Central finite differences of ``loss_fn`` over both weight matrices.

    ``loss_fn`` takes a params object; matrices are perturbed in place
    and restored, entry by entry.
    """
    grads = []
    for matrix in (params.gcn_weight, params.bilinear_weight):
        grad = np.zeros_like(matrix)
        it = np.nditer(matrix, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = matrix[idx]
            matrix[idx] = original + step
            up = loss_fn(params)
            matrix[idx] = original - step
            down = loss_fn(params)
            matrix[idx] = original
            grad[idx] = (up - down) / (2.0 * step)
        grads.append(grad)
    return grads[0], grads[1]
