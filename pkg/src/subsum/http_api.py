"""HTTP facade over the engine (FastAPI).

Endpoints:
  GET  /dbs                      registered databases
  GET  /dbs/{id}/stats           label/entity statistics
  POST /dbs/{id}/summarize       run a summary request (JSON body)
  GET  /dbs/{id}/frames/{idx}    frame thumbnail, when a frames/ folder
                                 sits next to the database file
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, Response
from pydantic import BaseModel

from .errors import (
    EmptyQueryResultError,
    IncompatibleRequestError,
    SubsumError,
    UnknownDatabaseError,
)
from .service import Engine, SummaryRequest, report_to_json


class SummarizeBody(BaseModel):
    mode: str = "keyframes"
    function: str = "fl"
    k: int | None = None
    budget_s: float | None = None
    cover: float | None = None
    query: str | None = None
    snippets: str = "fixed:2"
    entity_kind: str | None = None
    kernel: str | None = None
    knn: int | None = None
    time_window: tuple[float, float] | None = None
    lazy: bool = True
    include_timings: bool = True


def create_app(engine: Engine, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="subsum", version="0.1.0")

    @app.get("/dbs")
    def list_dbs():
        out = []
        for db_id in engine.ids():
            reg = engine.get(db_id)
            out.append({
                "id": db_id,
                "path": str(reg.path) if reg.path else None,
                "duration_s": reg.db.duration_s,
                "fps": reg.db.video.fps,
                "n_frames": reg.db.n_frames,
                "n_entities": len(reg.db.entities),
            })
        return out

    @app.get("/dbs/{db_id}/stats")
    def db_stats(db_id: str):
        try:
            return engine.stats(db_id)
        except UnknownDatabaseError:
            raise HTTPException(status_code=404, detail=f"unknown database {db_id!r}")

    @app.post("/dbs/{db_id}/summarize")
    def summarize(db_id: str, body: SummarizeBody):
        try:
            request = SummaryRequest.from_dict(body.model_dump())
            report = engine.summarize(db_id, request)
        except UnknownDatabaseError:
            raise HTTPException(status_code=404, detail=f"unknown database {db_id!r}")
        except EmptyQueryResultError as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "no_relevant_content", "message": str(exc)},
            )
        except (IncompatibleRequestError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except SubsumError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return Response(content=report_to_json(report), media_type="application/json")

    @app.get("/dbs/{db_id}/frames/{idx}")
    def frame_thumbnail(db_id: str, idx: int):
        try:
            reg = engine.get(db_id)
        except UnknownDatabaseError:
            raise HTTPException(status_code=404, detail=f"unknown database {db_id!r}")
        if reg.path is None:
            raise HTTPException(status_code=404, detail="database has no file directory")
        frames_dir = reg.path.parent / "frames"
        for suffix in (".jpg", ".jpeg", ".png"):
            candidate = frames_dir / f"{idx}{suffix}"
            if candidate.exists():
                return FileResponse(candidate)
        raise HTTPException(status_code=404, detail=f"no thumbnail for frame {idx}")

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
