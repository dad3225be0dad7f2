"""Training loop, checkpointing and whole-graph embedding."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError, DivergenceError
from ..graph import AttributedGraph
from .network import ModelParams, batch_step, init_params, sample_pair


@dataclass(frozen=True)
class TrainConfig:
    hidden_dim: int = 64
    subgraph_size: int = 4
    layers: int = 1
    learning_rate: float = 0.003
    epochs: int = 100
    batch_size: int = 300
    rounds_attr: int = 256
    rwr_restart_prob: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.hidden_dim < 1:
            raise ConfigError("hidden_dim must be at least 1")
        if self.subgraph_size < 2:
            raise ConfigError("subgraph_size must be at least 2")
        if self.layers != 1:
            raise ConfigError("the encoder is fixed to a single layer")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 0 or self.batch_size < 1 or self.rounds_attr < 1:
            raise ConfigError("epochs, batch_size and rounds_attr must be positive")
        if not (0.0 < self.rwr_restart_prob < 1.0):
            raise ConfigError("rwr_restart_prob must lie in (0, 1)")


@dataclass
class TrainResult:
    params: ModelParams
    loss_curve: list[float] = field(default_factory=list)


@dataclass
class _AdamState:
    """First/second moment buffers for both weight matrices."""

    m_w: np.ndarray
    v_w: np.ndarray
    m_b: np.ndarray
    v_b: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, params: ModelParams) -> "_AdamState":
        return cls(
            m_w=np.zeros_like(params.gcn_weight),
            v_w=np.zeros_like(params.gcn_weight),
            m_b=np.zeros_like(params.bilinear_weight),
            v_b=np.zeros_like(params.bilinear_weight),
        )


def _adam_update(
    params: ModelParams,
    grad_w: np.ndarray,
    grad_b: np.ndarray,
    state: _AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    state.step += 1
    bias1 = 1.0 - beta1**state.step
    bias2 = 1.0 - beta2**state.step
    for weight, grad, m, v in (
        (params.gcn_weight, grad_w, state.m_w, state.v_w),
        (params.bilinear_weight, grad_b, state.m_b, state.v_b),
    ):
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        weight -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)


def train(graph: AttributedGraph, config: TrainConfig) -> TrainResult:
    """Contrastive training over shuffled node batches.

    Every epoch reshuffles the nodes, resamples a fresh positive and
    negative subgraph per node, and applies one Adam update per batch.
    The recorded curve is the per-instance mean loss of each epoch.
    Deterministic for a fixed seed; epochs=0 returns the untouched
    initialization.
    """
    rng = np.random.default_rng(config.seed)
    params = init_params(graph.attr_dim, config.hidden_dim, rng)
    state = _AdamState.zeros(params)
    curve: list[float] = []

    for epoch in range(config.epochs):
        order = rng.permutation(graph.n)
        epoch_loss = 0.0
        for start in range(0, graph.n, config.batch_size):
            batch = order[start : start + config.batch_size]
            pairs = [
                sample_pair(graph, int(node), config.subgraph_size, config.rwr_restart_prob, rng)
                for node in batch
            ]
            result = batch_step(params, graph, pairs)
            if not np.isfinite(result.loss):
                raise DivergenceError(
                    f"non-finite loss in epoch {epoch}, batch starting at {start}"
                )
            _adam_update(params, result.grad_w, result.grad_wt, state, config.learning_rate)
            epoch_loss += result.loss
        curve.append(epoch_loss / (2 * graph.n))
    return TrainResult(params=params, loss_curve=curve)


def embed_all(params: ModelParams, graph: AttributedGraph) -> np.ndarray:
    """Node-projection embeddings for every node, one row per node."""
    return np.maximum(graph.attributes @ params.gcn_weight, 0.0)


def save_checkpoint(path: str | Path, params: ModelParams, config: TrainConfig) -> None:
    payload = {
        "attr_dim": params.attr_dim,
        "hidden_dim": params.hidden_dim,
        "gcn_weight": params.gcn_weight.ravel().tolist(),  # row-major
        "bilinear_weight": params.bilinear_weight.ravel().tolist(),
        "config": asdict(config),
        "seed": config.seed,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> tuple[ModelParams, TrainConfig]:
    with open(path) as fh:
        text = fh.read()
    try:
        payload = json.loads(text)
        d, h = payload["attr_dim"], payload["hidden_dim"]
        params = ModelParams(
            gcn_weight=np.array(payload["gcn_weight"], dtype=np.float64).reshape(d, h),
            bilinear_weight=np.array(payload["bilinear_weight"], dtype=np.float64).reshape(h, h),
        )
        config = TrainConfig(**payload["config"])
    except (KeyError, ValueError, TypeError) as exc:
        raise DataError(f"{path}: malformed checkpoint ({exc})") from exc
    return params, config


def write_loss_curve(path: str | Path, curve: list[float]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_batch_loss"])
        for epoch, value in enumerate(curve):
            writer.writerow([epoch, repr(float(value))])
