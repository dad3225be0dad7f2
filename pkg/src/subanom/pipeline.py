"""End-to-end experiment orchestration.

A single JSON config describes the dataset, injection, training,
scoring and fusion settings plus one master seed. Running an experiment
executes inject, train, region proposal, scoring and evaluation in
order, persisting every intermediate artifact into the output directory
together with a content-hash manifest. Re-running the same config
reproduces every artifact byte for byte.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import synthetic
from .contrast import (
    TrainConfig,
    embed_all,
    save_checkpoint,
    train,
    write_loss_curve,
)
from .errors import ConfigError, DataError, SubanomError
from .graph import AttributedGraph, GroundTruth, load_graph, save_graph
from .injection import InjectionConfig, inject_anomalies, write_injection_manifest
from .metrics import EvalReport, evaluate, write_roc_csv
from .regions import dump_regions, propose_regions
from .scoring import (
    FusionConfig,
    ScoreTable,
    attribute_scores,
    fuse,
    normalize,
    topology_scores,
)

SIMILARITY_SOURCES = ("embeddings", "raw")

_SYNTH_KINDS = {
    "community": synthetic.make_community_graph,
    "er": synthetic.make_er_graph,
    "gnp": synthetic.make_gnp_graph,
}


@dataclass(frozen=True)
class DataConfig:
    """Where the base graph comes from: files on disk or a generator."""

    edges: str | None = None
    attributes: str | None = None
    id_map: str | None = None
    synthetic: dict | None = None

    def __post_init__(self):
        if self.synthetic is not None:
            if self.edges is not None or self.attributes is not None:
                raise ConfigError("give either file paths or a synthetic block, not both")
            if "kind" not in self.synthetic:
                raise ConfigError("synthetic data block needs a 'kind' key")
        elif self.edges is None or self.attributes is None:
            raise ConfigError("data config needs 'edges' and 'attributes' paths")


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataConfig
    injection: InjectionConfig = InjectionConfig()
    train: TrainConfig = TrainConfig()
    fusion: FusionConfig = FusionConfig()
    similarity_source: str = "embeddings"
    k_list: tuple[int, ...] | None = None
    seed: int = 0
    output_dir: str = "runs/experiment"

    def __post_init__(self):
        if self.similarity_source not in SIMILARITY_SOURCES:
            raise ConfigError(
                f"similarity_source must be one of {SIMILARITY_SOURCES}, "
                f"got {self.similarity_source!r}"
            )
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        if not isinstance(payload, dict):
            raise ConfigError("experiment config must be a JSON object")
        known = {"data", "injection", "train", "fusion", "similarity_source",
                 "k_list", "seed", "output_dir"}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        def build(factory, block: dict, name: str):
            if not isinstance(block, dict):
                raise ConfigError(f"config section {name!r} must be an object")
            if "seed" in block and name in ("injection", "train"):
                raise ConfigError(
                    f"{name}.seed is derived from the top-level seed; remove it"
                )
            try:
                return factory(**block)
            except TypeError as exc:
                raise ConfigError(f"config section {name!r}: {exc}") from exc

        k_list = payload.get("k_list")
        return cls(
            data=build(DataConfig, payload.get("data", {}), "data"),
            injection=build(InjectionConfig, payload.get("injection", {}), "injection"),
            train=build(TrainConfig, payload.get("train", {}), "train"),
            fusion=build(FusionConfig, payload.get("fusion", {}), "fusion"),
            similarity_source=payload.get("similarity_source", "embeddings"),
            k_list=None if k_list is None else tuple(int(k) for k in k_list),
            seed=int(payload.get("seed", 0)),
            output_dir=str(payload.get("output_dir", "runs/experiment")),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(payload)

    def to_dict(self) -> dict:
        payload = dataclasses.asdict(self)
        payload["injection"].pop("seed", None)
        payload["train"].pop("seed", None)
        if payload["k_list"] is not None:
            payload["k_list"] = list(payload["k_list"])
        return payload


@dataclass(frozen=True)
class StageSeeds:
    """Per-stage seeds derived deterministically from the master seed."""

    injection: int
    training: int
    scoring: int


def stage_seeds(master_seed: int) -> StageSeeds:
    state = np.random.SeedSequence(master_seed).generate_state(3)
    return StageSeeds(
        injection=int(state[0]), training=int(state[1]), scoring=int(state[2])
    )


def load_dataset(data: DataConfig) -> AttributedGraph:
    """Materialize the base graph from files or a synthetic generator."""
    if data.synthetic is not None:
        kwargs = dict(data.synthetic)
        kind = kwargs.pop("kind")
        factory = _SYNTH_KINDS.get(kind)
        if factory is None:
            raise ConfigError(
                f"unknown synthetic kind {kind!r}; expected one of {sorted(_SYNTH_KINDS)}"
            )
        try:
            return factory(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"synthetic block for {kind!r}: {exc}") from exc
    try:
        return load_graph(data.edges, data.attributes, data.id_map)
    except OSError as exc:
        raise DataError(f"cannot read dataset: {exc}") from exc


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(out: Path, complete: bool, failed_stage: str | None) -> None:
    files = {
        p.name: _sha256(p)
        for p in sorted(out.iterdir())
        if p.is_file() and p.name != "manifest.json"
    }
    payload = {"complete": complete, "failed_stage": failed_stage, "files": files}
    with open(out / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _alpha_tag(alpha: float) -> str:
    return format(alpha, "g")


def run_experiment(
    config: ExperimentConfig,
    output_dir: str | Path | None = None,
    alphas: list[float] | None = None,
) -> EvalReport:
    """Execute the full pipeline and persist all artifacts.

    Stage order: load, inject, train, regions, score (topology plus
    attribute plus fusion), evaluate. Any stage failure still writes the
    manifest, marked incomplete with the failing stage, then re-raises
    with the stage name attached. With ``alphas`` given, one extra
    report per trade-off value is emitted from the same score vectors.
    """
    out = Path(output_dir) if output_dir is not None else Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = stage_seeds(config.seed)
    stage = "load"
    try:
        with open(out / "config.json", "w") as fh:
            json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        base = load_dataset(config.data)

        stage = "inject"
        inj_config = dataclasses.replace(config.injection, seed=seeds.injection)
        graph, truth = inject_anomalies(base, inj_config)
        save_graph(graph, out / "injected_edges.txt", out / "injected_attributes.csv")
        truth.to_csv(out / "ground_truth.csv")
        write_injection_manifest(out / "injection_manifest.json", inj_config, graph, truth)

        stage = "train"
        train_config = dataclasses.replace(config.train, seed=seeds.training)
        result = train(graph, train_config)
        save_checkpoint(out / "checkpoint.json", result.params, train_config)
        write_loss_curve(out / "loss_curve.csv", result.loss_curve)

        stage = "regions"
        schedule = propose_regions(graph)
        dump_regions(schedule, out / "regions.json")

        stage = "score"
        if config.similarity_source == "raw":
            similarity_input = graph.attributes
        else:
            similarity_input = embed_all(result.params, graph)
        topo = topology_scores(schedule, similarity_input, graph.n)
        attr = attribute_scores(
            result.params,
            graph,
            rounds=train_config.rounds_attr,
            subgraph_size=train_config.subgraph_size,
            restart_prob=train_config.rwr_restart_prob,
            seed=seeds.scoring,
        )
        topo_norm, attr_norm = normalize(topo), normalize(attr)
        final = fuse(topo_norm, attr_norm, config.fusion)
        table = ScoreTable(topo=topo, attr=attr, final=final)
        table.to_csv(out / "scores.csv", truth)

        stage = "evaluate"
        report = evaluate(final, truth, config.k_list)
        report.to_json(out / "report.json")
        write_roc_csv(report.overall.roc, out / "roc.csv")

        if alphas:
            sweep: dict[str, dict] = {}
            for alpha in alphas:
                fusion = FusionConfig(alpha=alpha, strategy="weight")
                alpha_report = evaluate(fuse(topo_norm, attr_norm, fusion), truth, config.k_list)
                tag = _alpha_tag(alpha)
                alpha_report.to_json(out / f"report_alpha_{tag}.json")
                sweep[tag] = {
                    "auc": alpha_report.overall.auc,
                    "auprc": alpha_report.overall.auprc,
                }
            with open(out / "sweep.json", "w") as fh:
                json.dump({"alphas": sweep}, fh, indent=2, sort_keys=True)
                fh.write("\n")
    except SubanomError as exc:
        _write_manifest(out, complete=False, failed_stage=stage)
        raise type(exc)(f"stage {stage!r}: {exc}") from exc
    except Exception:
        _write_manifest(out, complete=False, failed_stage=stage)
        raise

    _write_manifest(out, complete=True, failed_stage=None)
    return report


def read_truth(path: str | Path) -> GroundTruth:
    try:
        return GroundTruth.from_csv(path)
    except OSError as exc:
        raise DataError(f"cannot read ground truth: {exc}") from exc
