"""Command-line frontend.

Each pipeline stage is a subcommand that either executes in-process
(default) or forwards to a running service instance via ``--server``.
Both paths go through the same request models and handlers, so flags,
validation and outputs are identical.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
divergence, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx
from pydantic import BaseModel, ValidationError

from . import __version__, synthetic
from .errors import ConfigError, DataError, DivergenceError, SubanomError
from .graph import save_graph
from .service import handlers, schemas

_ERROR_KINDS = {
    "config": ConfigError,
    "data": DataError,
    "divergence": DivergenceError,
}


def _emit(response: BaseModel) -> None:
    print(json.dumps(response.model_dump(), indent=2))


def _call(args, endpoint: str, request: BaseModel, handler, response_model):
    """Dispatch locally or to ``--server``, print the JSON response."""
    if args.server is None:
        _emit(handler(request))
        return 0
    url = args.server.rstrip("/") + endpoint
    try:
        reply = httpx.post(url, json=request.model_dump(), timeout=None)
    except httpx.HTTPError as exc:
        raise SubanomError(f"cannot reach {url}: {exc}") from exc
    if reply.status_code != 200:
        try:
            error = reply.json()["error"]
            raise _ERROR_KINDS.get(error["kind"], SubanomError)(error["message"])
        except (KeyError, ValueError):
            raise SubanomError(f"{url} returned {reply.status_code}: {reply.text[:500]}")
    _emit(response_model.model_validate(reply.json()))
    return 0


def _dataset(args) -> schemas.DatasetRef:
    return schemas.DatasetRef(
        edges=args.edges, attributes=args.attrs, id_map=getattr(args, "id_map", None)
    )


def _cmd_inject(args) -> int:
    request = schemas.InjectRequest(
        dataset=_dataset(args),
        settings=schemas.InjectionSettings(
            clique_size=args.clique_size,
            clique_count=args.clique_count,
            edge_drop_ratio=args.edge_drop_ratio,
            attr_anomaly_count=args.attr_anomalies,
            candidate_set_size=args.candidates,
        ),
        seed=args.seed,
        output_dir=args.out,
    )
    return _call(args, "/inject", request, handlers.handle_inject, schemas.InjectResponse)


def _cmd_train(args) -> int:
    request = schemas.TrainRequest(
        dataset=_dataset(args),
        settings=schemas.TrainSettings(
            hidden_dim=args.hidden_dim,
            subgraph_size=args.subgraph_size,
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            batch_size=args.batch_size,
            rounds_attr=args.rounds_attr,
            rwr_restart_prob=args.restart_prob,
        ),
        seed=args.seed,
        checkpoint_path=args.checkpoint,
        loss_curve_path=args.loss_curve,
    )
    return _call(args, "/train", request, handlers.handle_train, schemas.TrainResponse)


def _cmd_regions(args) -> int:
    request = schemas.RegionsRequest(dataset=_dataset(args), output_path=args.out)
    return _call(args, "/regions", request, handlers.handle_regions, schemas.RegionsResponse)


def _cmd_score(args) -> int:
    request = schemas.ScoreRequest(
        dataset=_dataset(args),
        checkpoint_path=args.checkpoint,
        scores_path=args.out,
        truth_path=args.truth,
        fusion=schemas.FusionSettings(alpha=args.alpha, strategy=args.fusion),
        similarity_source=args.similarity_source,
        rounds_attr=args.rounds_attr,
        seed=args.seed,
    )
    return _call(args, "/score", request, handlers.handle_score, schemas.ScoreResponse)


def _cmd_eval(args) -> int:
    request = schemas.EvalRequest(
        scores_path=args.scores,
        truth_path=args.truth,
        k_list=args.k_list,
        report_path=args.report,
    )
    return _call(args, "/eval", request, handlers.handle_eval, schemas.EvalResponse)


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ConfigError("experiment config must be a JSON object")

    # Flag overrides edit the raw payload so validation stays in one place.
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.similarity_source is not None:
        payload["similarity_source"] = args.similarity_source
    if args.alpha is not None:
        payload.setdefault("fusion", {})["alpha"] = args.alpha
    if args.fusion is not None:
        payload.setdefault("fusion", {})["strategy"] = args.fusion
    if args.edge_drop_ratio is not None:
        payload.setdefault("injection", {})["edge_drop_ratio"] = args.edge_drop_ratio

    request = schemas.RunRequest(
        config=payload,
        output_dir=args.output_dir,
        alphas=args.alpha_sweep,
    )
    return _call(args, "/run", request, handlers.handle_run, schemas.RunResponse)


def _cmd_synth(args) -> int:
    if args.kind == "community":
        graph = synthetic.make_community_graph(
            n=args.n,
            communities=args.communities,
            avg_degree=args.avg_degree,
            intra_prob=args.intra_prob,
            attr_dim=args.attr_dim,
            noise=args.noise,
            seed=args.seed,
        )
    elif args.kind == "er":
        edge_count = args.edge_count
        if edge_count is None:
            edge_count = int(round(args.avg_degree * args.n / 2.0))
        graph = synthetic.make_er_graph(args.n, edge_count, args.attr_dim, args.seed)
    else:
        graph = synthetic.make_gnp_graph(args.n, args.p, args.attr_dim, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_graph(graph, out / "edges.txt", out / "attributes.csv")
    print(json.dumps({
        "output_dir": str(out),
        "edges": str(out / "edges.txt"),
        "attributes": str(out / "attributes.csv"),
        "nodes": graph.n,
        "edge_count": graph.m,
        "attr_dim": graph.attr_dim,
    }, indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--edges", required=True, help="edge list file, one 'u v' per line")
    parser.add_argument("--attrs", required=True, help="attribute CSV, row i = node i")
    parser.add_argument("--id-map", default=None, help="optional external-to-internal id map CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subanom",
        description="Anomaly detection on attributed networks via k-core "
        "substructures and contrastive attribute scoring.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; stages execute there instead of in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inject", help="plant labeled anomalies into a clean graph")
    _add_dataset_args(p)
    p.add_argument("--out", required=True, help="output directory for the injected dataset")
    p.add_argument("--clique-size", type=int, default=15)
    p.add_argument("--clique-count", type=int, default=5)
    p.add_argument("--edge-drop-ratio", type=float, default=0.0)
    p.add_argument("--attr-anomalies", type=int, default=75)
    p.add_argument("--candidates", type=int, default=50,
                   help="candidate set size for attribute swaps")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_inject)

    p = sub.add_parser("train", help="train the contrastive encoder")
    _add_dataset_args(p)
    p.add_argument("--checkpoint", required=True, help="checkpoint JSON to write")
    p.add_argument("--loss-curve", default=None, help="optional loss curve CSV")
    p.add_argument("--hidden-dim", type=int, default=64)
    p.add_argument("--subgraph-size", type=int, default=4)
    p.add_argument("--learning-rate", type=float, default=0.003)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=300)
    p.add_argument("--rounds-attr", type=int, default=256)
    p.add_argument("--restart-prob", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("regions", help="propose suspicious substructures by k-core rounds")
    _add_dataset_args(p)
    p.add_argument("--out", default=None, help="optional regions JSON to write")
    p.set_defaults(func=_cmd_regions)

    p = sub.add_parser("score", help="compute per-node anomaly scores")
    _add_dataset_args(p)
    p.add_argument("--checkpoint", required=True, help="trained checkpoint JSON")
    p.add_argument("--out", required=True, help="scores CSV to write")
    p.add_argument("--truth", default=None, help="ground truth CSV for label columns")
    p.add_argument("--alpha", type=float, default=0.8)
    p.add_argument("--fusion", choices=["weight", "max", "sum"], default="weight")
    p.add_argument("--similarity-source", choices=["embeddings", "raw"], default="embeddings")
    p.add_argument("--rounds-attr", type=int, default=None,
                   help="override the checkpoint's inference round count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("eval", help="evaluate a scores CSV against ground truth")
    p.add_argument("--scores", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--report", default=None, help="optional report JSON to write")
    p.add_argument("--k-list", type=_parse_int_list, default=None,
                   help="comma-separated cutoffs for precision@k")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="run the full experiment pipeline from a JSON config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--output-dir", default=None, help="override the config's output_dir")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--fusion", choices=["weight", "max", "sum"], default=None)
    p.add_argument("--similarity-source", choices=["embeddings", "raw"], default=None)
    p.add_argument("--edge-drop-ratio", type=float, default=None)
    p.add_argument("--alpha-sweep", type=_parse_float_list, default=None,
                   help="comma-separated trade-off values, one extra report each")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("synth", help="generate a synthetic dataset on disk")
    p.add_argument("--kind", choices=["community", "er", "gnp"], default="community")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--attr-dim", type=int, default=16)
    p.add_argument("--communities", type=int, default=10)
    p.add_argument("--avg-degree", type=float, default=4.0)
    p.add_argument("--intra-prob", type=float, default=0.9)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--edge-count", type=int, default=None, help="er: exact edge count")
    p.add_argument("--p", type=float, default=0.05, help="gnp: edge probability")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SubanomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
