"""Stage handlers behind the HTTP endpoints.

The CLI's local mode calls these functions directly, so every stage has
exactly one implementation regardless of frontend. Handlers raise the
package's error types; the app and the CLI translate those into HTTP
statuses and exit codes respectively.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..contrast import embed_all, load_checkpoint, save_checkpoint, train, write_loss_curve
from ..errors import DataError
from ..graph import AttributedGraph, load_graph, save_graph
from ..injection import inject_anomalies, write_injection_manifest
from ..metrics import EvalReport, evaluate
from ..pipeline import ExperimentConfig, read_truth, run_experiment
from ..regions import propose_regions
from ..scoring import ScoreTable, attribute_scores, fuse, normalize, topology_scores
from . import schemas


def _load(dataset: schemas.DatasetRef) -> AttributedGraph:
    try:
        return load_graph(dataset.edges, dataset.attributes, dataset.id_map)
    except OSError as exc:
        raise DataError(f"cannot read dataset: {exc}") from exc


def handle_inject(req: schemas.InjectRequest) -> schemas.InjectResponse:
    graph = _load(req.dataset)
    config = req.settings.to_config(seed=req.seed)
    injected, truth = inject_anomalies(graph, config)

    out = Path(req.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = ["injected_edges.txt", "injected_attributes.csv",
             "ground_truth.csv", "injection_manifest.json"]
    save_graph(injected, out / files[0], out / files[1])
    truth.to_csv(out / files[2])
    write_injection_manifest(out / files[3], config, injected, truth)
    return schemas.InjectResponse(
        output_dir=str(out),
        nodes=injected.n,
        edges=injected.m,
        anomalies_topology=truth.count("topology"),
        anomalies_attribute=truth.count("attribute"),
        anomalies_total=int(truth.labels.sum()),
        files=files,
    )


def handle_train(req: schemas.TrainRequest) -> schemas.TrainResponse:
    graph = _load(req.dataset)
    config = req.settings.to_config(seed=req.seed)
    result = train(graph, config)
    Path(req.checkpoint_path).parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(req.checkpoint_path, result.params, config)
    if req.loss_curve_path is not None:
        write_loss_curve(req.loss_curve_path, result.loss_curve)
    return schemas.TrainResponse(
        checkpoint_path=req.checkpoint_path,
        epochs=config.epochs,
        final_loss=result.loss_curve[-1] if result.loss_curve else None,
        loss_curve=result.loss_curve,
    )


def handle_regions(req: schemas.RegionsRequest) -> schemas.RegionsResponse:
    from ..regions import dump_regions

    graph = _load(req.dataset)
    schedule = propose_regions(graph)
    if req.output_path is not None:
        Path(req.output_path).parent.mkdir(parents=True, exist_ok=True)
        dump_regions(schedule, req.output_path)
    return schemas.RegionsResponse(
        k_start=schedule.k_start,
        round_count=schedule.round_count,
        substructures_total=sum(len(subs) for _, subs in schedule.rounds),
        rounds=[
            schemas.RoundSummary(
                k=k,
                substructures=len(subs),
                largest=max((s.size for s in subs), default=0),
            )
            for k, subs in schedule.rounds
        ],
        output_path=req.output_path,
    )


def handle_score(req: schemas.ScoreRequest) -> schemas.ScoreResponse:
    graph = _load(req.dataset)
    try:
        params, train_config = load_checkpoint(req.checkpoint_path)
    except OSError as exc:
        raise DataError(f"cannot read checkpoint: {exc}") from exc
    if params.attr_dim != graph.attr_dim:
        raise DataError(
            f"checkpoint expects {params.attr_dim} attributes, dataset has {graph.attr_dim}"
        )
    truth = read_truth(req.truth_path) if req.truth_path is not None else None

    schedule = propose_regions(graph)
    if req.similarity_source == "raw":
        similarity_input = graph.attributes
    else:
        similarity_input = embed_all(params, graph)
    topo = topology_scores(schedule, similarity_input, graph.n)
    attr = attribute_scores(
        params,
        graph,
        rounds=req.rounds_attr if req.rounds_attr is not None else train_config.rounds_attr,
        subgraph_size=train_config.subgraph_size,
        restart_prob=train_config.rwr_restart_prob,
        seed=req.seed,
    )
    final = fuse(normalize(topo), normalize(attr), req.fusion.to_config())
    table = ScoreTable(topo=topo, attr=attr, final=final)
    Path(req.scores_path).parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(req.scores_path, truth)

    top_ids = np.lexsort((np.arange(graph.n), -final))[:10]
    return schemas.ScoreResponse(
        scores_path=req.scores_path,
        nodes=graph.n,
        top=[schemas.TopNode(node_id=int(i), score=float(final[i])) for i in top_ids],
    )


def eval_response(report: EvalReport, report_path: str | None) -> schemas.EvalResponse:
    def block(b):
        if b is None:
            return None
        return schemas.MetricBlockModel(
            auc=b.auc,
            auprc=b.auprc,
            precision_at_k={str(k): v for k, v in b.precision_at_k.items()},
        )

    return schemas.EvalResponse(
        overall=block(report.overall),
        topology=block(report.topology),
        attribute=block(report.attribute),
        positives=report.positives,
        positives_topology=report.positives_topology,
        positives_attribute=report.positives_attribute,
        node_count=report.node_count,
        report_path=report_path,
    )


def handle_eval(req: schemas.EvalRequest) -> schemas.EvalResponse:
    try:
        table = ScoreTable.from_csv(req.scores_path)
    except OSError as exc:
        raise DataError(f"cannot read scores: {exc}") from exc
    truth = read_truth(req.truth_path)
    report = evaluate(table.final, truth, req.k_list)
    if req.report_path is not None:
        Path(req.report_path).parent.mkdir(parents=True, exist_ok=True)
        report.to_json(req.report_path)
    return eval_response(report, req.report_path)


def handle_run(req: schemas.RunRequest) -> schemas.RunResponse:
    config = ExperimentConfig.from_dict(req.config)
    out = req.output_dir if req.output_dir is not None else config.output_dir
    report = run_experiment(config, output_dir=out, alphas=req.alphas)
    return schemas.RunResponse(
        output_dir=str(out),
        report=eval_response(report, str(Path(out) / "report.json")),
    )
