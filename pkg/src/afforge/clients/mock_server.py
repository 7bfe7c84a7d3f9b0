"""Wire-protocol server wrapping the deterministic mocks.

Serves the same three endpoints the real model services expose, so the HTTP
clients can be exercised end to end without GPUs. Also handy as a stand-in
backend when demoing the pipeline:  afforge mock-serve --port 8788
"""

from __future__ import annotations

from fastapi import FastAPI
from pydantic import BaseModel, Field

from .base import DEFAULT_MAX_POINTS
from .codec import b64_of_f32, bytes_of_b64, decode_png_rgba
from .mock import (DEFAULT_LOGIT_OFFSET, DEFAULT_LOGIT_SLOPE,
                   mock_point_raw, mock_query_pairs, mock_segment_raw)


class QueriesBody(BaseModel):
    images: list[str] = Field(min_length=1)
    prompt_cfg: dict = Field(default_factory=dict)


class PointBody(BaseModel):
    image: str
    text: str
    max_points: int = DEFAULT_MAX_POINTS


class PromptPoint(BaseModel):
    u: float
    v: float


class SegmentBody(BaseModel):
    image: str
    points: list[PromptPoint] = Field(min_length=1)


def build_mock_service_app(seed: int = 0,
                           slope: float = DEFAULT_LOGIT_SLOPE,
                           offset: float = DEFAULT_LOGIT_OFFSET) -> FastAPI:
    app = FastAPI(title="afforge mock model services")

    @app.post("/v1/queries")
    def queries(body: QueriesBody):
        # images are decoded for validation parity with a real service
        for img in body.images:
            decode_png_rgba(bytes_of_b64(img))
        hint = str(body.prompt_cfg.get("object_hint", "object"))
        cls, pairs = mock_query_pairs(seed, hint)
        return {"object_class": cls,
                "queries": [{"text": t, "affordance": p} for t, p in pairs]}

    @app.post("/v1/point")
    def point(body: PointBody):
        rgba = decode_png_rgba(bytes_of_b64(body.image))
        raw = mock_point_raw(rgba)
        raw.sort(key=lambda p: -p[2])
        pts = [{"u": u, "v": v, "confidence": c}
               for u, v, c in raw[:body.max_points]]
        return {"points": pts}

    @app.post("/v1/segment")
    def segment(body: SegmentBody):
        rgba = decode_png_rgba(bytes_of_b64(body.image))
        logits = mock_segment_raw(rgba, [(p.u, p.v) for p in body.points],
                                  slope, offset)
        h, w = logits.shape
        return {"logits": {"h": h, "w": w, "data": b64_of_f32(logits)}}

    return app
