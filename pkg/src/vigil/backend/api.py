"""REST API over the backend service (JSON, UTF-8).

POST /v1/inferences                submit an InferenceRecord
GET  /v1/alerts                    ?state=&stream_id=&since_ts=&page=&page_size=
POST /v1/alerts/{id}/review        {"decision", "reviewer", "corrected_label"?}
GET  /v1/chunks/{id}               chunk metadata + its inference records
GET  /v1/chunks/{id}/thumbs        frame-thumbnail PNGs (base64), temporal order
GET  /v1/retraining-queue
GET  /v1/metrics/summary           per-class inference counts

Errors use {"error": {"code": ..., "message": ...}} with a matching HTTP
status. Auth is a static bearer token when one is configured.
"""

from __future__ import annotations

import base64
import io
from typing import Optional

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from PIL import Image
from pydantic import BaseModel, Field

from .. import svf
from ..classify import InferenceRecord
from ..errors import (
    AlertConflictError,
    ChunkNotFoundError,
    UnknownAlertError,
    UnknownChunkError,
    ValidationError,
    VigilError,
)
from ..labels import ClassLabel
from ..storage import ChunkStore
from .notify import NotificationDispatcher
from .service import BackendService

DEFAULT_THUMB_COUNT = 8
THUMB_HEIGHT = 96


class InferenceBody(BaseModel):
    chunk_id: str
    label: int = Field(ge=0, le=3)
    scores: list[float] = Field(min_length=4, max_length=4)
    model_id: str
    latency_ms: float = 0.0
    created_ts: Optional[int] = None


class ReviewBody(BaseModel):
    decision: str
    reviewer: str
    corrected_label: Optional[int] = Field(default=None, ge=0, le=3)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


_ERROR_MAP: list[tuple[type, int, str]] = [
    (UnknownAlertError, 404, "unknown_alert"),
    (UnknownChunkError, 404, "unknown_chunk"),
    (ChunkNotFoundError, 404, "not_found"),
    (AlertConflictError, 409, "conflict"),
    (ValidationError, 400, "validation"),
]


def create_app(
    service: BackendService,
    store: ChunkStore,
    dispatcher: Optional[NotificationDispatcher] = None,
    token: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="vigil backend", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(VigilError)
    async def vigil_error_handler(_req: Request, exc: VigilError):
        for etype, status, code in _ERROR_MAP:
            if isinstance(exc, etype):
                return _error(status, code, str(exc))
        return _error(500, "internal", str(exc))

    @app.exception_handler(RequestValidationError)
    async def body_validation_handler(_req: Request, exc: RequestValidationError):
        return _error(400, "validation", str(exc.errors()))

    @app.middleware("http")
    async def auth_middleware(request: Request, call_next):
        if token and request.url.path.startswith("/v1/"):
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {token}":
                return _error(401, "unauthorized", "missing or invalid API token")
        return await call_next(request)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/v1/inferences", status_code=201)
    async def post_inference(body: InferenceBody):
        rec = InferenceRecord(
            chunk_id=body.chunk_id,
            label=ClassLabel(body.label),
            scores=tuple(body.scores),  # type: ignore[arg-type]
            model_id=body.model_id,
            latency_ms=body.latency_ms,
            created_ts=body.created_ts if body.created_ts is not None else service.clock(),
        )
        outcome = service.record_inference(rec)
        return {
            "inference_id": outcome.inference_id,
            "duplicate": outcome.duplicate,
            "alert": outcome.alert.to_dict() if outcome.alert else None,
        }

    @app.get("/v1/alerts")
    async def get_alerts(
        state: Optional[str] = None,
        stream_id: Optional[str] = None,
        since_ts: Optional[str] = None,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
    ):
        since = None
        if since_ts:
            try:
                since = int(since_ts)
            except ValueError:
                raise ValidationError(f"since_ts must be an integer, got {since_ts!r}")
        result = service.list_alerts(
            state=state or None, stream_id=stream_id or None,
            since_ts=since, page=page, page_size=page_size,
        )
        return {
            "alerts": [a.to_dict() for a in result.alerts],
            "page": result.page,
            "page_size": result.page_size,
            "total": result.total,
        }

    @app.post("/v1/alerts/{alert_id}/review")
    async def review_alert(alert_id: str, body: ReviewBody):
        alert = service.review_alert(
            alert_id,
            decision=body.decision,
            reviewer=body.reviewer,
            corrected_label=body.corrected_label,
        )
        return alert.to_dict()

    @app.get("/v1/chunks/{chunk_id}")
    async def get_chunk(chunk_id: str):
        chunk = service.get_chunk(chunk_id)
        payload = chunk.to_dict()
        payload["inferences"] = service.chunk_inferences(chunk_id)
        return payload

    @app.get("/v1/chunks/{chunk_id}/thumbs")
    async def get_chunk_thumbs(
        chunk_id: str, count: int = Query(default=DEFAULT_THUMB_COUNT, ge=1, le=64)
    ):
        chunk = service.get_chunk(chunk_id)
        data = store.get(chunk.storage_key)
        header = svf.read_header(data)
        n = min(count, header.frame_count)
        indices = np.unique(np.linspace(0, header.frame_count - 1, n).round().astype(int))
        thumbs = []
        for idx in indices:
            frame = svf.read_frame(data, header, int(idx))
            image = Image.fromarray(frame.pixels)
            width = max(1, round(header.width * THUMB_HEIGHT / header.height))
            image = image.resize((width, THUMB_HEIGHT), Image.BILINEAR)
            buf = io.BytesIO()
            image.save(buf, format="PNG")
            thumbs.append(
                {
                    "index": int(idx),
                    "ts_ms": chunk.start_ts + int(idx * 1000 / header.fps),
                    "png_base64": base64.b64encode(buf.getvalue()).decode("ascii"),
                }
            )
        return {"chunk_id": chunk_id, "thumbs": thumbs}

    @app.get("/v1/retraining-queue")
    async def retraining_queue():
        items = service.list_retraining()
        return {"items": [item.to_dict() for item in items], "count": len(items)}

    @app.get("/v1/metrics/summary")
    async def metrics_summary():
        return service.metrics_summary()

    app.state.service = service
    app.state.store = store
    app.state.dispatcher = dispatcher
    return app
