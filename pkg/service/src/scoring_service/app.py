"""HTTP app factory for the scoring protocol.

POST /score takes {"pairs": [{"topic_id", "doc_id", "query", "text"}, ...]}
and returns {"scores": [...]} with one finite number per pair, in request
order. GET /health returns {"status": "ok", "model": "<identifier>"} once
the scorer is ready. Malformed bodies get 400, batches over the
configured limit get 413, and scorer failures get 500. Request handling
keeps no state between calls.
"""

from __future__ import annotations

import logging
import math

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ServiceConfig
from .scoring import Scorer, build_scorer

log = logging.getLogger(__name__)


class Pair(BaseModel):
    topic_id: str
    doc_id: str
    query: str
    text: str


class ScoreRequest(BaseModel):
    pairs: list[Pair]


def _validation_summary(exc: RequestValidationError) -> str:
    parts = []
    for error in exc.errors()[:3]:
        location = ".".join(str(piece) for piece in error.get("loc", ()))
        parts.append(f"{location}: {error.get('msg', 'invalid')}")
    return "; ".join(parts) if parts else "invalid request body"


def create_app(config: ServiceConfig, scorer: Scorer | None = None) -> FastAPI:
    """Build the service app; loads the model up front in model mode."""
    if scorer is None:
        scorer = build_scorer(config.mode, config.model, config.device)
    app = FastAPI(title="scoring-service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": _validation_summary(exc)})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "model": scorer.model_name}

    @app.post("/score")
    async def score(request: ScoreRequest) -> JSONResponse:
        pairs = request.pairs
        if len(pairs) > config.max_batch:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(pairs)} exceeds max_batch {config.max_batch}"},
            )
        try:
            scores = scorer.score([(pair.query, pair.text) for pair in pairs])
            if len(scores) != len(pairs):
                raise RuntimeError(f"scorer returned {len(scores)} scores for {len(pairs)} pairs")
            for value in scores:
                if not math.isfinite(value):
                    raise RuntimeError(f"scorer returned a non-finite score: {value!r}")
        except Exception as exc:
            log.exception("scoring a batch of %d pairs failed", len(pairs))
            return JSONResponse(status_code=500, content={"error": f"scoring failed: {exc}"})
        return JSONResponse(status_code=200, content={"scores": scores})

    return app
