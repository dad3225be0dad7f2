"""Request and response models for the HTTP service and the CLI.

Settings models mirror the core config dataclasses so both frontends
share one validation path; stage seeds are explicit request fields
because the service has no master-seed context of its own.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..contrast import TrainConfig
from ..injection import InjectionConfig
from ..scoring import FusionConfig


class DatasetRef(BaseModel):
    """Server-local paths of an edge list and attribute matrix."""

    edges: str
    attributes: str
    id_map: str | None = None


class InjectionSettings(BaseModel):
    clique_size: int = 15
    clique_count: int = 5
    edge_drop_ratio: float = 0.0
    attr_anomaly_count: int = 75
    candidate_set_size: int = 50

    def to_config(self, seed: int) -> InjectionConfig:
        return InjectionConfig(seed=seed, **self.model_dump())


class TrainSettings(BaseModel):
    hidden_dim: int = 64
    subgraph_size: int = 4
    layers: int = 1
    learning_rate: float = 0.003
    epochs: int = 100
    batch_size: int = 300
    rounds_attr: int = 256
    rwr_restart_prob: float = 0.15

    def to_config(self, seed: int) -> TrainConfig:
        return TrainConfig(seed=seed, **self.model_dump())


class FusionSettings(BaseModel):
    alpha: float | None = 0.8
    strategy: Literal["weight", "max", "sum"] = "weight"
    normalization: Literal["min_max"] = "min_max"

    def to_config(self) -> FusionConfig:
        return FusionConfig(**self.model_dump())


class InjectRequest(BaseModel):
    dataset: DatasetRef
    settings: InjectionSettings = Field(default_factory=InjectionSettings)
    seed: int = 0
    output_dir: str


class InjectResponse(BaseModel):
    output_dir: str
    nodes: int
    edges: int
    anomalies_topology: int
    anomalies_attribute: int
    anomalies_total: int
    files: list[str]


class TrainRequest(BaseModel):
    dataset: DatasetRef
    settings: TrainSettings = Field(default_factory=TrainSettings)
    seed: int = 0
    checkpoint_path: str
    loss_curve_path: str | None = None


class TrainResponse(BaseModel):
    checkpoint_path: str
    epochs: int
    final_loss: float | None
    loss_curve: list[float]


class RegionsRequest(BaseModel):
    dataset: DatasetRef
    output_path: str | None = None


class RoundSummary(BaseModel):
    k: int
    substructures: int
    largest: int


class RegionsResponse(BaseModel):
    k_start: int
    round_count: int
    substructures_total: int
    rounds: list[RoundSummary]
    output_path: str | None


class ScoreRequest(BaseModel):
    dataset: DatasetRef
    checkpoint_path: str
    scores_path: str
    truth_path: str | None = None
    fusion: FusionSettings = Field(default_factory=FusionSettings)
    similarity_source: Literal["embeddings", "raw"] = "embeddings"
    rounds_attr: int | None = None
    seed: int = 0


class TopNode(BaseModel):
    node_id: int
    score: float


class ScoreResponse(BaseModel):
    scores_path: str
    nodes: int
    top: list[TopNode]


class MetricBlockModel(BaseModel):
    auc: float
    auprc: float
    precision_at_k: dict[str, float]


class EvalRequest(BaseModel):
    scores_path: str
    truth_path: str
    k_list: list[int] | None = None
    report_path: str | None = None


class EvalResponse(BaseModel):
    overall: MetricBlockModel
    topology: MetricBlockModel | None
    attribute: MetricBlockModel | None
    positives: int
    positives_topology: int
    positives_attribute: int
    node_count: int
    report_path: str | None


class RunRequest(BaseModel):
    config: dict
    output_dir: str | None = None
    alphas: list[float] | None = None


class RunResponse(BaseModel):
    output_dir: str
    report: EvalResponse


class HealthResponse(BaseModel):
    status: str
    version: str
