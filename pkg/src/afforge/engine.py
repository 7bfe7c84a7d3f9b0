"""Annotation engine: drives the model services over every object view,
lifts the resulting 2D evidence into fused 3D records, and persists them.

Per object the pipeline is: (1) query generation from five context views,
(2) pointing on each ring view, (3) segmentation prompted by the kept
points, (4) visibility-gated fusion to per-point heatmaps, (5) viewpoint
selection, (6) record persistence and 2D pair export. Service failures
degrade gracefully: a failed pointing or segmentation cell marks that view
missing for that query and fusion proceeds over the views that answered.
Query generation failing fails the whole object since nothing downstream
has inputs without it.

Runs are resumable: records already on disk are skipped, and the record
JSON is written last per record so a crash can never leave a record that
looks complete but is not.
"""

from __future__ import annotations

import hashlib
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .clients.base import ClientBundle
from .config import EngineConfig
from .errors import (MalformedResponseError, ServiceTimeoutError,
                     ServiceUnreachableError)
from .geometry import VisibilityParams
from .lift import fuse_views, logits_to_heatmap
from .reproject import REFERENCE_WIDTH, select_viewpoints, view_scores
from .store import AnnotationRecord, DatasetStore, Provenance, record_key

STAGE1_VIEWS = (0, 5, 10, 15, 20)
STAGES = ("queries", "pointing", "segmentation", "fusion", "selection",
          "persist")

# failures that cost one pipeline cell, not the object
CELL_ERRORS = (ServiceUnreachableError, ServiceTimeoutError,
               MalformedResponseError)


def object_seed(run_seed: int, name: str) -> int:
    """Stable per-name sub-seed so batch order never changes outputs."""
    digest = hashlib.sha256(f"{run_seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def summarize_latencies(samples) -> dict | None:
    if not samples:
        return None
    arr = np.asarray(samples, dtype=np.float64)
    return {"count": int(arr.size),
            "p50_ms": float(np.percentile(arr, 50) * 1e3),
            "p95_ms": float(np.percentile(arr, 95) * 1e3),
            "max_ms": float(arr.max() * 1e3)}


@dataclass
class ObjectOutcome:
    object_id: str
    status: str = "ok"  # ok | failed | skipped
    record_keys: list = field(default_factory=list)
    resumed_queries: int = 0
    all_zero_flags: int = 0
    low_support_flags: int = 0
    missing_view_cells: int = 0
    error: str | None = None


@dataclass
class RunReport:
    outcomes: list = field(default_factory=list)
    stage_latencies: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def count(self, status: str) -> int:
        return sum(1 for o in self.outcomes if o.status == status)

    def to_dict(self) -> dict:
        return {
            "objects": {"ok": self.count("ok"), "failed": self.count("failed"),
                        "skipped": self.count("skipped")},
            "records_written": sum(len(o.record_keys) for o in self.outcomes),
            "resumed_queries": sum(o.resumed_queries for o in self.outcomes),
            "flags": {"all_zero_scores": sum(o.all_zero_flags
                                             for o in self.outcomes),
                      "low_support": sum(o.low_support_flags
                                         for o in self.outcomes)},
            "missing_view_cells": sum(o.missing_view_cells
                                      for o in self.outcomes),
            "errors": {o.object_id: o.error for o in self.outcomes
                       if o.error is not None},
            "stage_latency": {stage: summarize_latencies(samples)
                              for stage, samples in
                              sorted(self.stage_latencies.items())},
            "wall_time_s": self.wall_time_s,
        }


class Engine:
    def __init__(self, store: DatasetStore, clients: ClientBundle,
                 cfg: EngineConfig | None = None):
        self.store = store
        self.clients = clients
        self.cfg = cfg if cfg is not None else EngineConfig()
        self._lat_lock = threading.Lock()

    def _timed(self, timings: dict, stage: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        finally:
            timings.setdefault(stage, []).append(time.perf_counter() - t0)

    def run_object(self, object_id: str, timings: dict | None = None) -> ObjectOutcome:
        cfg = self.cfg
        store = self.store
        if timings is None:
            timings = {}
        outcome = ObjectOutcome(object_id=object_id)
        seed = object_seed(cfg.seed, object_id)
        tag = store.object_tag(object_id)
        pc = store.load_point_cloud(object_id)
        cams = store.load_views(object_id)
        cam_by_id = {c.view_id: c for c in cams}
        vp = VisibilityParams(rel_tol=cfg.rel_tol,
                              abs_tol=cfg.abs_tol_scale * pc.bbox_diagonal)
        images = {c.view_id: store.load_image_bytes(object_id, c.view_id)
                  for c in cams}

        context = [images[k] for k in STAGE1_VIEWS if k in images]
        queries = self._timed(
            timings, "queries", self.clients.query.generate_queries,
            context, {"object_hint": tag, "object_id": object_id,
                      "seed": seed})

        for qi, query in enumerate(queries):
            if store.has_record(object_id, query.query_id):
                store.register_record(record_key(object_id, query.query_id))
                outcome.resumed_queries += 1
                outcome.record_keys.append(record_key(object_id, query.query_id))
                continue

            interaction_points: dict[int, list] = {}
            missing: list[int] = []
            contributions = []
            for cam in cams:
                try:
                    pts = self._timed(
                        timings, "pointing", self.clients.point.point_at,
                        images[cam.view_id], query, cam.view_id,
                        cam.width, cam.height)
                except CELL_ERRORS:
                    missing.append(cam.view_id)
                    continue
                if not pts:
                    continue  # region not visible here; silent skip, not a failure
                try:
                    mask = self._timed(
                        timings, "segmentation", self.clients.segment.segment_at,
                        images[cam.view_id], pts, cam.view_id)
                except CELL_ERRORS:
                    missing.append(cam.view_id)
                    continue
                interaction_points[cam.view_id] = [(p.u, p.v, p.confidence)
                                                   for p in pts]
                hm = logits_to_heatmap(mask)
                store.write_view_contribution(object_id, query.query_id, hm)
                contributions.append((cam_by_id[cam.view_id], hm))

            heat = self._timed(
                timings, "fusion", fuse_views, pc, contributions, vp,
                combiner=cfg.combiner, query_id=query.query_id)

            scores = self._timed(timings, "selection", view_scores,
                                 heat, pc, cams, vp)
            selection = select_viewpoints(
                scores, rng_seed=object_seed(seed, query.query_id))

            def persist():
                record = AnnotationRecord(
                    object_id=object_id, query=query, heatmap=heat,
                    provenance=Provenance(
                        engine_version=__version__, seed=seed,
                        interaction_points=interaction_points,
                        missing_views=missing),
                    selection=selection,
                    contributing_views=[c.view_id for c, _ in contributions])
                store.write_record(record)
                radius = max(0.5, cfg.radius_px * cams[0].width
                             / REFERENCE_WIDTH) if cams else cfg.radius_px
                store.export_2d_pairs(
                    record, vp,
                    export_seed=object_seed(seed, f"export:{query.query_id}"),
                    radius_px=radius)
                return record

            record = self._timed(timings, "persist", persist)
            outcome.record_keys.append(record.key)
            outcome.missing_view_cells += len(missing)
            if selection.all_zero:
                outcome.all_zero_flags += 1
            if heat.low_support:
                outcome.low_support_flags += 1
        if outcome.resumed_queries and outcome.resumed_queries == len(queries):
            outcome.status = "skipped"
        return outcome

    def run_batch(self, object_ids=None) -> RunReport:
        store = self.store
        ids = list(object_ids) if object_ids is not None else store.object_ids()
        report = RunReport()
        t0 = time.perf_counter()

        def one(object_id: str) -> ObjectOutcome:
            timings: dict = {}
            try:
                outcome = self.run_object(object_id, timings=timings)
            except Exception as exc:  # object-level failure, batch continues
                outcome = ObjectOutcome(object_id=object_id, status="failed",
                                        error=f"{type(exc).__name__}: {exc}")
            with self._lat_lock:
                for stage, samples in timings.items():
                    report.stage_latencies.setdefault(stage, []).extend(samples)
            return outcome

        if self.cfg.workers > 1 and len(ids) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                outcomes = list(pool.map(one, ids))
        else:
            outcomes = [one(object_id) for object_id in ids]
        report.outcomes = outcomes
        report.wall_time_s = time.perf_counter() - t0
        return report
