"""Substructure-aware anomaly detection for attributed networks.

Detects two anomaly flavors in one fused score: densely interconnected
node groups that survive deep k-core peeling while disagreeing in
embedding space, and nodes whose attributes clash with their local
neighborhood under a contrastive node-versus-subgraph discriminator.
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DataError,
    DivergenceError,
    SubanomError,
    UndefinedMetricError,
)
from .graph import AttributedGraph, GroundTruth, average_degree, load_graph, save_graph
from .injection import InjectionConfig, inject_anomalies
from .regions import RoundSchedule, Substructure, k_core, propose_regions
from .contrast import ModelParams, TrainConfig, embed_all, train
from .scoring import (
    FusionConfig,
    ScoreTable,
    attribute_scores,
    fuse,
    normalize,
    score_graph,
    topology_scores,
)
from .metrics import EvalReport, average_precision, evaluate, precision_at_k, roc_auc
from .pipeline import ExperimentConfig, run_experiment, stage_seeds

__all__ = [
    "AttributedGraph",
    "CapacityError",
    "ConfigError",
    "DataError",
    "DivergenceError",
    "EvalReport",
    "ExperimentConfig",
    "FusionConfig",
    "GroundTruth",
    "InjectionConfig",
    "ModelParams",
    "RoundSchedule",
    "ScoreTable",
    "SubanomError",
    "Substructure",
    "TrainConfig",
    "UndefinedMetricError",
    "average_degree",
    "average_precision",
    "attribute_scores",
    "embed_all",
    "evaluate",
    "fuse",
    "inject_anomalies",
    "k_core",
    "load_graph",
    "normalize",
    "precision_at_k",
    "propose_regions",
    "roc_auc",
    "run_experiment",
    "save_graph",
    "score_graph",
    "stage_seeds",
    "topology_scores",
    "train",
    "__version__",
]
