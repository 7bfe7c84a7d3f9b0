"""Human review service over a dataset store.

Serves record listings, per-record detail (view images, per-view heatmap
contributions, fused 3D values), and accepts ratings and brush refinements.
A refinement replaces one view contribution and re-fuses the record through
the exact pipeline fusion path, so an untouched submission reproduces the
original fused values bit for bit. All review actions append to an audit
log; record state itself is last-write-wins under a per-record lock.
"""

from __future__ import annotations

import base64
import binascii
import os
import threading
import time
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..clients.codec import b64_of_f32, b64_of_u32, f32_of_b64
from ..config import EngineConfig
from ..errors import (CorruptBlobError, DimensionMismatchError,
                      UnknownIdError, UnknownViewError)
from ..geometry import VisibilityParams
from ..lift import Heatmap2D, fuse_views
from ..store import (RATING_CRITERIA, RATING_TIERS, DatasetStore, ReviewState,
                     build_test_split, split_record_key)

DEFAULT_PORT = 8787

CRITERION_VALUES = ("pass", "fail")


class RatingBody(BaseModel):
    rater_id: str = Field(min_length=1)
    tier: str
    criteria: dict[str, str]


class RefineBody(BaseModel):
    view_id: int
    width: int
    height: int
    values_b64: str
    rater_id: Optional[str] = None


def validate_rating(tier: str, criteria: dict) -> None:
    """Tier/criteria consistency rules; violations surface as 422s.

    good requires every criterion to pass; not_good requires at least one
    failure; ok is the mixed middle and carries no constraint.
    """
    if tier not in RATING_TIERS:
        raise ValueError(f"tier must be one of {RATING_TIERS}, got {tier!r}")
    if sorted(criteria) != sorted(RATING_CRITERIA):
        raise ValueError(f"criteria must be exactly {RATING_CRITERIA}")
    for key, val in criteria.items():
        if val not in CRITERION_VALUES:
            raise ValueError(f"criterion {key!r} must be pass or fail")
    fails = [k for k, v in criteria.items() if v == "fail"]
    if tier == "good" and fails:
        raise ValueError(f"a good rating cannot have failing criteria: {fails}")
    if tier == "not_good" and not fails:
        raise ValueError("a not_good rating needs at least one failing criterion")


def build_review_app(store: DatasetStore, cfg: EngineConfig | None = None,
                     frontend_dir: str | None = None) -> FastAPI:
    """App factory; cfg must match the run that produced the store so that
    refinement re-fusion uses the same visibility tolerances."""
    cfg = cfg if cfg is not None else EngineConfig()
    app = FastAPI(title="afforge review")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    record_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(record_id: str) -> threading.Lock:
        with locks_guard:
            return record_locks.setdefault(record_id, threading.Lock())

    def load_record(record_id: str):
        try:
            object_id, query_id = split_record_key(record_id)
            return store.read_record(object_id, query_id)
        except (UnknownIdError, FileNotFoundError):
            raise HTTPException(status_code=404,
                                detail=f"unknown record {record_id!r}")

    def summary(record) -> dict:
        return {
            "record_id": record.key,
            "object_id": record.object_id,
            "query_id": record.query_id,
            "text": record.query.text,
            "affordance_phrase": record.query.affordance_phrase,
            "object_class": record.query.object_class,
            "status": record.review.status,
            "tier": record.review.tier,
            "low_support": bool(record.heatmap.low_support),
            "all_zero": bool(record.selection.all_zero)
            if record.selection else False,
            "refined_views": list(record.review.refined_views),
        }

    @app.get("/api/pairs")
    def list_pairs(status: Optional[str] = None):
        out = []
        for key in store.record_ids():
            object_id, query_id = split_record_key(key)
            record = store.read_record(object_id, query_id)
            row = summary(record)
            if status is None or row["status"] == status:
                out.append(row)
        return {"pairs": out, "total": len(out)}

    @app.get("/api/pairs/{record_id}")
    def pair_detail(record_id: str):
        record = load_record(record_id)
        object_id = record.object_id
        views = []
        for entry in store.object_entry(object_id)["views"]:
            view_id = entry["view_id"]
            refined = store.read_view_contribution(object_id, record.query_id,
                                                   view_id, refined=True)
            original = store.read_view_contribution(object_id, record.query_id,
                                                    view_id)
            effective = refined if refined is not None else original
            views.append({
                "view_id": view_id,
                "width": entry["width"], "height": entry["height"],
                "image_url": f"/api/images/{object_id}/{view_id}.png",
                "has_contribution": effective is not None,
                "refined": refined is not None,
                "heatmap_b64": b64_of_f32(effective.values.ravel())
                if effective is not None else None,
                "interaction_points":
                    record.provenance.interaction_points.get(view_id, []),
            })
        refined_fused = store.read_refined_fusion(object_id, record.query_id)
        detail = summary(record)
        detail.update({
            "criteria": record.review.criteria,
            "rater_id": record.review.rater_id,
            "point_count": int(record.heatmap.point_count),
            "selection": None if record.selection is None else {
                "best": record.selection.best,
                "challenge": record.selection.challenge,
                "all_zero": record.selection.all_zero,
            },
            "contributing_views": list(record.contributing_views),
            "missing_views": list(record.provenance.missing_views),
            "fused": {"values_b64": b64_of_f32(record.heatmap.values),
                      "support_b64": b64_of_u32(record.heatmap.support)},
            "refined_fused": None if refined_fused is None else {
                "values_b64": b64_of_f32(refined_fused.values),
                "support_b64": b64_of_u32(refined_fused.support)},
            "views": views,
        })
        return detail

    @app.get("/api/images/{object_id}/{filename}")
    def view_image(object_id: str, filename: str):
        if not filename.endswith(".png"):
            raise HTTPException(status_code=404, detail="not found")
        try:
            view_id = int(filename[:-4])
            entry = store.view_entry(object_id, view_id)
        except (ValueError, UnknownIdError, UnknownViewError):
            raise HTTPException(status_code=404, detail="not found")
        return FileResponse(store.path(entry["image"]), media_type="image/png")

    @app.post("/api/pairs/{record_id}/rating")
    def submit_rating(record_id: str, body: RatingBody):
        record = load_record(record_id)
        try:
            validate_rating(body.tier, body.criteria)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with lock_for(record_id):
            record = load_record(record_id)
            previous = record.review
            review = ReviewState(status=body.tier, tier=body.tier,
                                 rater_id=body.rater_id,
                                 criteria=dict(body.criteria),
                                 refined_views=list(previous.refined_views))
            store.update_review(record.object_id, record.query_id, review)
            store.append_audit({
                "ts": time.time(), "action": "rating",
                "record_id": record_id, "rater_id": body.rater_id,
                "tier": body.tier, "criteria": dict(body.criteria),
                "previous_status": previous.status,
                "previous_tier": previous.tier,
                "overwrite": previous.rater_id == body.rater_id
                and previous.tier is not None,
            })
        record = load_record(record_id)
        return summary(record)

    @app.post("/api/pairs/{record_id}/refine")
    def submit_refinement(record_id: str, body: RefineBody):
        record = load_record(record_id)
        object_id, query_id = record.object_id, record.query_id
        try:
            entry = store.view_entry(object_id, body.view_id)
        except UnknownViewError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        if (body.height, body.width) != (entry["height"], entry["width"]):
            raise HTTPException(
                status_code=422,
                detail=f"view {body.view_id} is {entry['height']}x"
                       f"{entry['width']}, got {body.height}x{body.width}")
        try:
            flat = f32_of_b64(body.values_b64, body.height * body.width)
        except (ValueError, CorruptBlobError, binascii.Error) as exc:
            raise HTTPException(status_code=422, detail=f"bad payload: {exc}")
        values = flat.reshape(body.height, body.width)
        try:
            hm = Heatmap2D(view_id=body.view_id, values=values)
        except (ValueError, DimensionMismatchError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

        with lock_for(record_id):
            record = load_record(record_id)
            store.write_view_contribution(object_id, query_id, hm, refined=True)
            pairs = store.effective_contributions(object_id, query_id)
            pc = store.load_point_cloud(object_id)
            vp = VisibilityParams(rel_tol=cfg.rel_tol,
                                  abs_tol=cfg.abs_tol_scale * pc.bbox_diagonal)
            refused = fuse_views(pc, pairs, vp, combiner=cfg.combiner,
                                 query_id=query_id)
            store.write_refined_fusion(object_id, query_id, refused)
            refined_views = sorted(set(record.review.refined_views)
                                   | {body.view_id})
            review = ReviewState(status="refined", tier=record.review.tier,
                                 rater_id=record.review.rater_id,
                                 criteria=record.review.criteria,
                                 refined_views=refined_views)
            store.update_review(object_id, query_id, review)
            store.append_audit({
                "ts": time.time(), "action": "refine",
                "record_id": record_id, "rater_id": body.rater_id,
                "view_id": body.view_id,
            })
        record = load_record(record_id)
        out = summary(record)
        out["refined_fused"] = {"values_b64": b64_of_f32(refused.values),
                                "support_b64": b64_of_u32(refused.support)}
        return out

    @app.get("/api/stats")
    def stats():
        status_map = store.review_status_map()
        tiers = {tier: 0 for tier in RATING_TIERS}
        refined = 0
        unreviewed = 0
        for key in store.record_ids():
            object_id, query_id = split_record_key(key)
            record = store.read_record(object_id, query_id)
            if record.review.tier is not None:
                tiers[record.review.tier] += 1
            else:
                unreviewed += 1
            if record.review.status == "refined" or record.review.refined_views:
                refined += 1
        rated = sum(tiers.values())
        splits = build_test_split(store.record_ids(), status_map)
        return {
            "total": len(store.record_ids()),
            "rated": rated,
            "unreviewed": unreviewed,
            "tiers": tiers,
            "tier_fractions": {k: (v / rated if rated else None)
                               for k, v in tiers.items()},
            "refined": refined,
            "splits": {"train": len(splits.train), "test": len(splits.test),
                       "excluded": len(splits.excluded)},
        }

    if frontend_dir and os.path.isdir(frontend_dir):
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")
    return app
