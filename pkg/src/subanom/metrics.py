"""Ranking metrics: ROC AUC, average precision, Precision@K.

All rankings sort by descending score. Where individual ranks matter
(average precision, Precision@K) ties are broken by lowest node id so
results are deterministic; ROC AUC follows the midrank convention and
is tie-break free.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UndefinedMetricError
from .graph import KIND_ATTRIBUTE, KIND_TOPOLOGY, GroundTruth

DEFAULT_K_LIST = (50, 100, 150, 200, 250, 300)


def _validated(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D arrays of equal length")
    return scores, labels


def _midranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks in ascending order, ties sharing their average rank."""
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """P(random positive outscores random negative), ties counted half."""
    scores, labels = _validated(scores, labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("roc_auc needs at least one positive and one negative label")
    ranks = _midranks(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _descending_order(scores: np.ndarray) -> np.ndarray:
    # Sort by score descending, node id ascending within ties.
    return np.lexsort((np.arange(len(scores)), -scores))


def average_precision(scores, labels) -> float:
    """Mean of precision-at-rank over the ranks holding positives."""
    scores, labels = _validated(scores, labels)
    n_pos = int((labels == 1).sum())
    if n_pos == 0:
        raise UndefinedMetricError("average_precision needs at least one positive label")
    ordered = labels[_descending_order(scores)]
    hits = np.cumsum(ordered == 1)
    ranks = np.arange(1, len(ordered) + 1)
    return float(np.sum((hits / ranks)[ordered == 1]) / n_pos)


def precision_at_k(scores, labels, k: int) -> float:
    """Share of positives among the k highest-scored nodes."""
    scores, labels = _validated(scores, labels)
    if k < 1 or k > len(scores):
        raise ValueError(f"k must lie in [1, {len(scores)}], got {k}")
    top = _descending_order(scores)[:k]
    return float(np.sum(labels[top] == 1) / k)


def roc_points(scores, labels) -> list[tuple[float, float]]:
    """ROC curve points from (0,0) to (1,1), tied scores grouped."""
    scores, labels = _validated(scores, labels)
    n_pos = int((labels == 1).sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("roc curve needs both classes")
    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        group = order[i : j + 1]
        tp += int(np.sum(labels[group] == 1))
        fp += len(group) - int(np.sum(labels[group] == 1))
        points.append((fp / n_neg, tp / n_pos))
        i = j + 1
    return points


@dataclass
class MetricBlock:
    auc: float
    auprc: float
    precision_at_k: dict[int, float] = field(default_factory=dict)
    roc: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class EvalReport:
    overall: MetricBlock
    topology: MetricBlock | None
    attribute: MetricBlock | None
    positives: int
    positives_topology: int
    positives_attribute: int
    node_count: int

    def to_dict(self) -> dict:
        def block(b: MetricBlock | None):
            if b is None:
                return None
            return {
                "auc": b.auc,
                "auprc": b.auprc,
                "precision_at_k": {str(k): v for k, v in b.precision_at_k.items()},
            }

        return {
            "overall": block(self.overall),
            "topology": block(self.topology),
            "attribute": block(self.attribute),
            "positives": self.positives,
            "positives_topology": self.positives_topology,
            "positives_attribute": self.positives_attribute,
            "node_count": self.node_count,
        }

    def to_json(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _clip_k_list(k_list, n: int, positives: int) -> list[int]:
    if k_list is None:
        ks = [k for k in DEFAULT_K_LIST if k <= positives]
        if not ks and positives >= 1:
            ks = [positives]
        return ks
    for k in k_list:
        if k < 1 or k > n:
            raise ValueError(f"k={k} outside [1, {n}]")
    return list(k_list)


def evaluate(scores, truth: GroundTruth, k_list=None) -> EvalReport:
    """Full and per-kind metrics for one score vector.

    Per-kind AUC/AUPRC restrict the population to that kind's anomalies
    plus all clean nodes; per-kind Precision@K keeps the full ranking
    and counts only that kind among the top k. A kind with no injected
    anomalies yields a None block.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = truth.labels
    if scores.shape != labels.shape:
        raise ValueError("scores and ground truth lengths differ")
    n = len(scores)
    positives = int(labels.sum())
    ks = _clip_k_list(k_list, n, positives)

    overall = MetricBlock(
        auc=roc_auc(scores, labels),
        auprc=average_precision(scores, labels),
        precision_at_k={k: precision_at_k(scores, labels, k) for k in ks},
        roc=roc_points(scores, labels),
    )

    def kind_block(kind: str) -> MetricBlock | None:
        kind_mask = np.array([truth.kind_of(i) == kind for i in range(n)])
        if not kind_mask.any():
            return None
        keep = kind_mask | (labels == 0)
        sub_scores = scores[keep]
        sub_labels = kind_mask[keep].astype(np.int8)
        kind_labels = kind_mask.astype(np.int8)
        return MetricBlock(
            auc=roc_auc(sub_scores, sub_labels),
            auprc=average_precision(sub_scores, sub_labels),
            precision_at_k={k: precision_at_k(scores, kind_labels, k) for k in ks},
            roc=roc_points(sub_scores, sub_labels),
        )

    topo_block = kind_block(KIND_TOPOLOGY)
    attr_block = kind_block(KIND_ATTRIBUTE)
    return EvalReport(
        overall=overall,
        topology=topo_block,
        attribute=attr_block,
        positives=positives,
        positives_topology=truth.count(KIND_TOPOLOGY),
        positives_attribute=truth.count(KIND_ATTRIBUTE),
        node_count=n,
    )


def write_roc_csv(points: list[tuple[float, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in points:
            writer.writerow([repr(float(fpr)), repr(float(tpr))])
