"""FastAPI application exposing every pipeline stage."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import ConfigError, DataError, DivergenceError, SubanomError
from . import handlers, schemas

_STATUS = {
    "config": 400,
    "data": 422,
    "divergence": 500,
    "internal": 500,
}


def error_kind(exc: SubanomError) -> str:
    if isinstance(exc, ConfigError):
        return "config"
    if isinstance(exc, DataError):
        return "data"
    if isinstance(exc, DivergenceError):
        return "divergence"
    return "internal"


def create_app() -> FastAPI:
    app = FastAPI(
        title="subanom",
        version=__version__,
        description="Substructure-aware anomaly detection for attributed networks.",
    )

    @app.exception_handler(SubanomError)
    async def _subanom_error(request: Request, exc: SubanomError) -> JSONResponse:
        kind = error_kind(exc)
        return JSONResponse(
            status_code=_STATUS[kind],
            content={"error": {"kind": kind, "message": str(exc)}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    async def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/inject", response_model=schemas.InjectResponse)
    async def inject(req: schemas.InjectRequest) -> schemas.InjectResponse:
        return handlers.handle_inject(req)

    @app.post("/train", response_model=schemas.TrainResponse)
    async def train(req: schemas.TrainRequest) -> schemas.TrainResponse:
        return handlers.handle_train(req)

    @app.post("/regions", response_model=schemas.RegionsResponse)
    async def regions(req: schemas.RegionsRequest) -> schemas.RegionsResponse:
        return handlers.handle_regions(req)

    @app.post("/score", response_model=schemas.ScoreResponse)
    async def score(req: schemas.ScoreRequest) -> schemas.ScoreResponse:
        return handlers.handle_score(req)

    @app.post("/eval", response_model=schemas.EvalResponse)
    async def eval_scores(req: schemas.EvalRequest) -> schemas.EvalResponse:
        return handlers.handle_eval(req)

    @app.post("/run", response_model=schemas.RunResponse)
    async def run(req: schemas.RunRequest) -> schemas.RunResponse:
        return handlers.handle_run(req)

    return app
