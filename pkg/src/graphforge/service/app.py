"""FastAPI control plane: graph CRUD, training sessions, battles.

Single-player desk deployment: JSON over HTTP/1.1, no authentication,
in-memory stores. The motherboard UI and the CLI both drive exactly
this surface.
"""

from __future__ import annotations

import pathlib

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from ..arena import BattleConfig, run_battle
from ..complexity import build_report
from ..data import DataError, IdxFormatError
from ..dsl import ParseFailure, parse
from ..engine import GraphDataError, NumericOverflowError
from ..graph import ValidationFailure, node_count, validate
from . import schemas
from .store import (
    GraphStore,
    SessionStateError,
    SessionStore,
    build_dataset,
    dataset_id,
)

_FRONTEND_DIST = pathlib.Path(__file__).resolve().parents[3] / "frontend" / "dist"


def _parse_errors_payload(errors) -> dict:
    return {
        "errors": [
            {"line": e.line, "col": e.column, "message": e.message, "category": e.category}
            for e in errors
        ]
    }


def _graph_errors_payload(errors, positions) -> dict:
    items = []
    for e in errors:
        line, col = positions.get(e.name, positions.get("}", (1, 1)))
        items.append({"line": line, "col": col, "message": e.message, "category": e.category})
    return {"errors": items}


def _wire_shape(shape) -> list:
    return [None if d is None else d for d in shape.dims]


def create_app() -> FastAPI:
    app = FastAPI(title="graphforge", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    graphs = GraphStore()
    sessions = SessionStore()

    @app.exception_handler(NumericOverflowError)
    async def _overflow(request, exc):
        return JSONResponse(status_code=500, content={"detail": f"numeric overflow: {exc}"})

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/graphs", status_code=201, response_model=schemas.GraphCreateResponse,
              responses={422: {"model": schemas.ErrorList}})
    def create_graph(body: schemas.GraphCreateRequest):
        try:
            spec = parse(body.dsl)
        except ParseFailure as exc:
            return JSONResponse(status_code=422, content=_parse_errors_payload(exc.errors))
        try:
            graph = validate(spec)
        except ValidationFailure as exc:
            return JSONResponse(
                status_code=422, content=_graph_errors_payload(exc.errors, spec.positions)
            )
        stored = graphs.add(body.dsl, graph)
        return schemas.GraphCreateResponse(
            id=stored.id,
            node_count=node_count(spec),
            shapes={name: _wire_shape(s) for name, s in graph.shapes.items()},
        )

    @app.get("/graphs/{gid}", response_model=schemas.GraphGetResponse)
    def get_graph(gid: str):
        stored = graphs.get(gid)
        if stored is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown graph '{gid}'"})
        report = build_report(stored.graph)
        return schemas.GraphGetResponse(
            dsl=stored.dsl,
            node_count=report.node_count,
            complexity=schemas.ComplexityModel(**report.to_dict()),
        )

    @app.post("/sessions", status_code=201, response_model=schemas.SessionCreateResponse)
    def create_session(body: schemas.SessionCreateRequest):
        stored = graphs.get(body.graph_id)
        if stored is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown graph '{body.graph_id}'"})
        try:
            dataset = build_dataset(body.dataset)
            session = sessions.add(
                stored.id, stored.graph, body.train_config.to_config(), dataset
            )
        except (DataError, IdxFormatError, GraphDataError, ValueError, OSError) as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        return schemas.SessionCreateResponse(session_id=session.id)

    @app.post("/sessions/{sid}/step", response_model=schemas.StepResponse)
    def step_session(sid: str, body: schemas.StepRequest):
        session = sessions.get(sid)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown session '{sid}'"})
        try:
            step, latest = session.run_steps(body.n)
        except SessionStateError as exc:
            return JSONResponse(status_code=409, content={"detail": str(exc)})
        return schemas.StepResponse(
            step=step,
            latest=schemas.MetricPointModel.from_point(latest) if latest else None,
        )

    @app.get("/sessions/{sid}/metrics", response_model=schemas.MetricsResponse)
    def session_metrics(sid: str, since_step: int = 0):
        session = sessions.get(sid)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown session '{sid}'"})
        points = session.metrics_since(since_step)
        return schemas.MetricsResponse(
            points=[schemas.MetricPointModel.from_point(p) for p in points]
        )

    @app.post("/battles", status_code=201, response_model=schemas.BattleResultModel)
    def create_battle(body: schemas.BattleRequest):
        stored = []
        for gid in (body.graph_a, body.graph_b):
            item = graphs.get(gid)
            if item is None:
                return JSONResponse(status_code=404, content={"detail": f"unknown graph '{gid}'"})
            stored.append(item)
        try:
            dataset = build_dataset(body.config.dataset)
            config = BattleConfig(
                train_config=body.config.train_config.to_config(),
                dataset_id=dataset_id(body.config.dataset),
                priority=tuple(body.config.priority),
            )
            result = run_battle(stored[0].graph, stored[1].graph, dataset, config)
        except (DataError, IdxFormatError, GraphDataError, ValueError, OSError) as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        mp = schemas.MetricPointModel.from_point
        return schemas.BattleResultModel(
            contender_a=result.contender_a,
            contender_b=result.contender_b,
            final_a=mp(result.final_a),
            final_b=mp(result.final_b),
            curve_a=[mp(p) for p in result.curve_a],
            curve_b=[mp(p) for p in result.curve_b],
            winner=result.winner,
            config=body.config,
            seed=result.seed,
        )

    if _FRONTEND_DIST.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=_FRONTEND_DIST, html=True), name="ui")

    return app
