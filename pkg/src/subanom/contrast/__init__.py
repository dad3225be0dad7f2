"""Node-versus-subgraph contrastive network for attribute anomalies."""

from .network import (
    ContrastPair,
    ModelParams,
    PairScore,
    batch_loss,
    batch_step,
    bce_loss,
    discriminate,
    encode_node,
    encode_subgraph,
    gradients,
    init_params,
    sample_pair,
)
from .sampling import rwr_sample
from .training import (
    TrainConfig,
    TrainResult,
    embed_all,
    load_checkpoint,
    save_checkpoint,
    train,
    write_loss_curve,
)

__all__ = [
    "ContrastPair",
    "ModelParams",
    "PairScore",
    "TrainConfig",
    "TrainResult",
    "batch_loss",
    "batch_step",
    "bce_loss",
    "discriminate",
    "embed_all",
    "encode_node",
    "encode_subgraph",
    "gradients",
    "init_params",
    "load_checkpoint",
    "rwr_sample",
    "sample_pair",
    "save_checkpoint",
    "train",
    "write_loss_curve",
]
