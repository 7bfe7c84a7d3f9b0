"""Dataset store: on-disk layout, record serialization, splits, exports.

Layout under one dataset root:
  manifest.json
  objects/<id>/points.bin               float64 N x 3 positions
  objects/<id>/views/<k>.png            RGBA render
  objects/<id>/views/<k>.depth          float32 depth blob
  backgrounds/<i>.png                   composite backgrounds
  records/<object>/<query>.json         record metadata (written last)
  records/<object>/<query>.heat         fused per-point values
  records/<object>/<query>.support      per-point view counts
  records/<object>/<query>.views/<k>.heat            per-view contribution
  records/<object>/<query>.views/<k>.refined.heat    human refinement
  records/<object>/<query>.refined.heat|.support     re-fused after refinement
  exports/<object>/<query>/...          2D training pairs
  partials/<object>/<view>.idx|.json + restricted heat blobs
  review_audit.jsonl                    append-only review event log

All binary payloads are little-endian with fixed field order, so datasets
move between platforms byte for byte.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import blobio
from .clients.types import AffordanceQuery
from .errors import UnknownIdError, UnknownViewError
from .geometry import CameraView, PointCloud, VisibilityParams
from .lift import Heatmap2D, Heatmap3D
from .partial import PartialRecord
from .reproject import (ViewSelection, composite_background,
                        default_radius_px, render_heatmap_2d,
                        transform_paired_heatmap)

SCHEMA_VERSION = 1

REVIEW_STATUSES = ("unreviewed", "good", "ok", "not_good", "refined")
RATING_TIERS = ("good", "ok", "not_good")
RATING_CRITERIA = ("semantic_relevance", "spatial_accuracy", "coverage")

_ID_RE = re.compile(r"^[A-Za-z0-9_\-.]+$")


def record_key(object_id: str, query_id: str) -> str:
    return f"{object_id}:{query_id}"


def split_record_key(key: str) -> tuple[str, str]:
    object_id, sep, query_id = key.partition(":")
    if not sep or not object_id or not query_id:
        raise UnknownIdError(f"malformed record id {key!r}")
    return object_id, query_id


def _check_id(value: str, kind: str):
    if not _ID_RE.match(value):
        raise ValueError(f"{kind} {value!r} is not filesystem-safe")


def _write_json(path, obj):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@dataclass
class Provenance:
    engine_version: str = ""
    seed: int = 0
    interaction_points: dict = field(default_factory=dict)  # view_id -> [[u,v,conf]]
    missing_views: list = field(default_factory=list)


@dataclass
class ReviewState:
    status: str = "unreviewed"
    tier: str | None = None
    rater_id: str | None = None
    criteria: dict | None = None
    refined_views: list = field(default_factory=list)

    def __post_init__(self):
        if self.status not in REVIEW_STATUSES:
            raise ValueError(f"unknown review status {self.status!r}")


@dataclass
class AnnotationRecord:
    object_id: str
    query: AffordanceQuery
    heatmap: Heatmap3D
    provenance: Provenance = field(default_factory=Provenance)
    review: ReviewState = field(default_factory=ReviewState)
    selection: ViewSelection | None = None
    contributing_views: list = field(default_factory=list)

    @property
    def query_id(self) -> str:
        return self.query.query_id

    @property
    def key(self) -> str:
        return record_key(self.object_id, self.query.query_id)


@dataclass(frozen=True)
class Splits:
    train: list
    test: list
    excluded: list


def build_test_split(record_keys, review_status) -> Splits:
    """Partition records into train/test/excluded.

    test: records rated good or ok, or refined after a not_good rating.
    train: all records of objects with no reviewed record at all.
    excluded: the rest (unrefined not_good records, plus every record that
    shares an object with any reviewed record). Object-level separation is
    deliberate: one reviewed record removes its whole object from train.
    """
    keys = sorted(record_keys)
    known = set(keys)
    for key in review_status:
        if key not in known:
            raise UnknownIdError(f"review references unknown record {key!r}")
    reviewed_objects = set()
    for key, status in review_status.items():
        if status != "unreviewed":
            reviewed_objects.add(split_record_key(key)[0])
    train, test, excluded = [], [], []
    for key in keys:
        status = review_status.get(key, "unreviewed")
        if status in ("good", "ok", "refined"):
            test.append(key)
        elif split_record_key(key)[0] in reviewed_objects:
            excluded.append(key)
        else:
            train.append(key)
    return Splits(train=train, test=test, excluded=excluded)


@dataclass(frozen=True)
class ViewAsset:
    """Input bundle for persisting one rendered view."""

    view_id: int
    intrinsics: np.ndarray
    world_to_camera: np.ndarray
    rgba: np.ndarray
    depth: np.ndarray


class DatasetStore:
    """Single-writer-per-record, many-reader dataset directory."""

    def __init__(self, root):
        self.root = os.path.abspath(os.fspath(root))
        self._manifest_path = os.path.join(self.root, "manifest.json")
        if not os.path.exists(self._manifest_path):
            raise FileNotFoundError(f"no manifest at {self._manifest_path}")
        self.manifest = _read_json(self._manifest_path)
        if self.manifest.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("manifest schema version mismatch")
        # serializes manifest read-modify-write across engine worker threads
        self._lock = threading.RLock()
        self._defer_manifest = False

    @classmethod
    def create(cls, root) -> "DatasetStore":
        root = os.path.abspath(os.fspath(root))
        os.makedirs(root, exist_ok=True)
        manifest = {"schema_version": SCHEMA_VERSION, "objects": {},
                    "records": [], "partials": {}, "splits": None,
                    "backgrounds": []}
        _write_json(os.path.join(root, "manifest.json"), manifest)
        return cls(root)

    @classmethod
    def open(cls, root) -> "DatasetStore":
        return cls(root)

    def _save_manifest(self):
        if self._defer_manifest:
            return
        _write_json(self._manifest_path, self.manifest)

    @contextmanager
    def bulk(self):
        """Defer manifest writes across many mutations; one save at exit.
        Rewriting a large manifest per record makes bulk imports quadratic."""
        with self._lock:
            self._defer_manifest = True
        try:
            yield self
        finally:
            with self._lock:
                self._defer_manifest = False
                self._save_manifest()

    def path(self, rel: str) -> str:
        return os.path.join(self.root, rel)

    # ---- objects -------------------------------------------------------

    def add_object(self, object_id: str, tag: str, positions: np.ndarray,
                   views=(), save_images: bool = True):
        from .clients.codec import encode_png

        _check_id(object_id, "object_id")
        if object_id in self.manifest["objects"]:
            raise ValueError(f"object {object_id!r} already exists")
        positions = np.asarray(positions, dtype=np.float64)
        points_rel = f"objects/{object_id}/points.bin"
        blobio.write_points(self.path(points_rel), positions)
        view_entries = []
        for va in views:
            h, w = va.depth.shape
            image_rel = f"objects/{object_id}/views/{va.view_id}.png"
            depth_rel = f"objects/{object_id}/views/{va.view_id}.depth"
            if save_images:
                img_path = self.path(image_rel)
                os.makedirs(os.path.dirname(img_path), exist_ok=True)
                with open(img_path, "wb") as f:
                    f.write(encode_png(va.rgba))
            blobio.write_depth(self.path(depth_rel), va.depth)
            view_entries.append({
                "view_id": int(va.view_id),
                "width": int(w), "height": int(h),
                "intrinsics": np.asarray(va.intrinsics, dtype=float).tolist(),
                "world_to_camera": np.asarray(va.world_to_camera, dtype=float).tolist(),
                "image": image_rel, "depth": depth_rel,
            })
        view_entries.sort(key=lambda e: e["view_id"])
        with self._lock:
            self.manifest["objects"][object_id] = {
                "tag": tag, "point_count": int(positions.shape[0]),
                "points": points_rel, "views": view_entries,
            }
            self._save_manifest()

    def object_ids(self) -> list:
        return sorted(self.manifest["objects"])

    def object_entry(self, object_id: str) -> dict:
        try:
            return self.manifest["objects"][object_id]
        except KeyError:
            raise UnknownIdError(f"unknown object {object_id!r}") from None

    def object_tag(self, object_id: str) -> str:
        return self.object_entry(object_id)["tag"]

    def load_point_cloud(self, object_id: str) -> PointCloud:
        entry = self.object_entry(object_id)
        positions = blobio.read_points(self.path(entry["points"]),
                                       entry["point_count"])
        return PointCloud(object_id=object_id, positions=positions)

    def view_entry(self, object_id: str, view_id: int) -> dict:
        for entry in self.object_entry(object_id)["views"]:
            if entry["view_id"] == view_id:
                return entry
        raise UnknownViewError(f"object {object_id!r} has no view {view_id}")

    def load_view(self, object_id: str, view_id: int) -> CameraView:
        entry = self.view_entry(object_id, view_id)
        depth = blobio.read_depth(self.path(entry["depth"]),
                                  entry["height"], entry["width"])
        return CameraView(view_id=entry["view_id"],
                          intrinsics=np.array(entry["intrinsics"]),
                          world_to_camera=np.array(entry["world_to_camera"]),
                          width=entry["width"], height=entry["height"],
                          depth=depth, image_ref=self.path(entry["image"]))

    def load_views(self, object_id: str) -> list:
        return [self.load_view(object_id, e["view_id"])
                for e in self.object_entry(object_id)["views"]]

    def load_image_bytes(self, object_id: str, view_id: int) -> bytes:
        entry = self.view_entry(object_id, view_id)
        with open(self.path(entry["image"]), "rb") as f:
            return f.read()

    # ---- backgrounds ---------------------------------------------------

    def add_background(self, rgb: np.ndarray):
        from .clients.codec import encode_png

        with self._lock:
            idx = len(self.manifest["backgrounds"])
            rel = f"backgrounds/{idx}.png"
            path = self.path(rel)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "wb") as f:
                f.write(encode_png(rgb))
            self.manifest["backgrounds"].append(rel)
            self._save_manifest()

    def load_backgrounds(self) -> list:
        from PIL import Image

        out = []
        for rel in self.manifest["backgrounds"]:
            with Image.open(self.path(rel)) as img:
                out.append(np.asarray(img.convert("RGB")))
        return out

    # ---- records -------------------------------------------------------

    def _record_base(self, object_id: str, query_id: str) -> str:
        return os.path.join(self.root, "records", object_id, query_id)

    def record_ids(self) -> list:
        return sorted(self.manifest["records"])

    def has_record(self, object_id: str, query_id: str) -> bool:
        return os.path.exists(self._record_base(object_id, query_id) + ".json")

    def write_record(self, record: AnnotationRecord):
        """Persist one record; the JSON goes last as the completion marker."""
        _check_id(record.object_id, "object_id")
        _check_id(record.query_id, "query_id")
        base = self._record_base(record.object_id, record.query_id)
        blobio.write_heat(base + ".heat", record.heatmap.values)
        blobio.write_support(base + ".support", record.heatmap.support)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "object_id": record.object_id,
            "query_id": record.query_id,
            "query": {
                "text": record.query.text,
                "affordance_phrase": record.query.affordance_phrase,
                "object_class": record.query.object_class,
            },
            "point_count": int(record.heatmap.point_count),
            "low_support": bool(record.heatmap.low_support),
            "contributing_views": sorted(int(v) for v in record.contributing_views),
            "provenance": {
                "engine_version": record.provenance.engine_version,
                "seed": int(record.provenance.seed),
                "interaction_points": {
                    str(k): [[float(u), float(v), float(c)] for u, v, c in pts]
                    for k, pts in sorted(record.provenance.interaction_points.items())
                },
                "missing_views": sorted(int(v) for v in record.provenance.missing_views),
            },
            "selection": None if record.selection is None else {
                "best": int(record.selection.best),
                "challenge": int(record.selection.challenge),
                "all_zero": bool(record.selection.all_zero),
            },
            "review": {
                "status": record.review.status,
                "tier": record.review.tier,
                "rater_id": record.review.rater_id,
                "criteria": record.review.criteria,
                "refined_views": sorted(int(v) for v in record.review.refined_views),
            },
        }
        _write_json(base + ".json", payload)
        self.register_record(record.key)

    def register_record(self, key: str):
        """Idempotent manifest entry for a record whose files exist (also the
        crash-resume repair path when the manifest write was interrupted)."""
        with self._lock:
            if key not in self.manifest["records"]:
                self.manifest["records"].append(key)
                self.manifest["records"].sort()
                self._save_manifest()

    def read_record(self, object_id: str, query_id: str) -> AnnotationRecord:
        base = self._record_base(object_id, query_id)
        if not os.path.exists(base + ".json"):
            raise UnknownIdError(f"no record {object_id}:{query_id}")
        payload = _read_json(base + ".json")
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("record schema version mismatch")
        n = payload["point_count"]
        values = blobio.read_heat_1d(base + ".heat", n)
        support = blobio.read_support(base + ".support", n)
        query = AffordanceQuery(query_id=query_id, object_id=object_id,
                                text=payload["query"]["text"],
                                affordance_phrase=payload["query"]["affordance_phrase"],
                                object_class=payload["query"]["object_class"])
        heat = Heatmap3D(object_id=object_id, query_id=query_id,
                         values=values, support=support)
        prov = payload["provenance"]
        provenance = Provenance(
            engine_version=prov["engine_version"], seed=prov["seed"],
            interaction_points={int(k): [tuple(p) for p in v]
                                for k, v in prov["interaction_points"].items()},
            missing_views=list(prov["missing_views"]))
        sel = payload["selection"]
        selection = None if sel is None else ViewSelection(
            best=sel["best"], challenge=sel["challenge"], all_zero=sel["all_zero"])
        rev = payload["review"]
        review = ReviewState(status=rev["status"], tier=rev["tier"],
                             rater_id=rev["rater_id"], criteria=rev["criteria"],
                             refined_views=list(rev["refined_views"]))
        return AnnotationRecord(object_id=object_id, query=query, heatmap=heat,
                                provenance=provenance, review=review,
                                selection=selection,
                                contributing_views=list(payload["contributing_views"]))

    def update_review(self, object_id: str, query_id: str, review: ReviewState):
        record = self.read_record(object_id, query_id)
        record.review = review
        self.write_record(record)

    # ---- per-view contributions and refinements ------------------------

    def _view_heat_path(self, object_id, query_id, view_id, refined: bool) -> str:
        base = self._record_base(object_id, query_id)
        name = f"{view_id}.refined.heat" if refined else f"{view_id}.heat"
        return os.path.join(base + ".views", name)

    def write_view_contribution(self, object_id: str, query_id: str,
                                hm: Heatmap2D, refined: bool = False):
        path = self._view_heat_path(object_id, query_id, hm.view_id, refined)
        blobio.write_heat(path, hm.values)

    def read_view_contribution(self, object_id: str, query_id: str,
                               view_id: int, refined: bool = False):
        path = self._view_heat_path(object_id, query_id, view_id, refined)
        if not os.path.exists(path):
            return None
        entry = self.view_entry(object_id, view_id)
        values = blobio.read_heat_2d(path, entry["height"], entry["width"])
        return Heatmap2D(view_id=view_id, values=values)

    def effective_contributions(self, object_id: str, query_id: str):
        """(CameraView, Heatmap2D) pairs for fusion, refined blobs taking
        precedence over the originals, ascending view_id."""
        pairs = []
        for entry in self.object_entry(object_id)["views"]:
            view_id = entry["view_id"]
            hm = self.read_view_contribution(object_id, query_id, view_id,
                                             refined=True)
            if hm is None:
                hm = self.read_view_contribution(object_id, query_id, view_id)
            if hm is not None:
                pairs.append((self.load_view(object_id, view_id), hm))
        return pairs

    def write_refined_fusion(self, object_id: str, query_id: str, h: Heatmap3D):
        base = self._record_base(object_id, query_id)
        blobio.write_heat(base + ".refined.heat", h.values)
        blobio.write_support(base + ".refined.support", h.support)

    def read_refined_fusion(self, object_id: str, query_id: str):
        base = self._record_base(object_id, query_id)
        if not os.path.exists(base + ".refined.heat"):
            return None
        n = self.object_entry(object_id)["point_count"]
        values = blobio.read_heat_1d(base + ".refined.heat", n)
        support = blobio.read_support(base + ".refined.support", n)
        return Heatmap3D(object_id=object_id, query_id=query_id,
                         values=values, support=support)

    # ---- review audit log ----------------------------------------------

    def append_audit(self, event: dict):
        path = self.path("review_audit.jsonl")
        with open(path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")

    def read_audit(self) -> list:
        path = self.path("review_audit.jsonl")
        if not os.path.exists(path):
            return []
        with open(path, "r", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]

    # ---- splits ---------------------------------------------------------

    def review_status_map(self) -> dict:
        out = {}
        for key in self.record_ids():
            object_id, query_id = split_record_key(key)
            payload = _read_json(self._record_base(object_id, query_id) + ".json")
            out[key] = payload["review"]["status"]
        return out

    def build_splits(self) -> Splits:
        splits = build_test_split(self.record_ids(), self.review_status_map())
        with self._lock:
            self.manifest["splits"] = {"train": splits.train,
                                       "test": splits.test,
                                       "excluded": splits.excluded}
            self._save_manifest()
        return splits

    # ---- partials -------------------------------------------------------

    def write_partial(self, rec: PartialRecord, restricted: dict):
        """Persist a partial record plus its restricted per-query heatmaps
        ({query_id: Heatmap3D})."""
        base = os.path.join(self.root, "partials", rec.object_id)
        blobio.write_index(os.path.join(base, f"{rec.source_view}.idx"),
                           rec.indices)
        for query_id, h in sorted(restricted.items()):
            blobio.write_heat(os.path.join(base, f"{rec.source_view}",
                                           f"{query_id}.heat"), h.values)
        with self._lock:
            self.manifest["partials"].setdefault(rec.object_id, {})
            self.manifest["partials"][rec.object_id][str(rec.source_view)] = {
                "source_view": int(rec.source_view),
                "under_sampled": bool(rec.under_sampled),
                "k": int(rec.indices.shape[0]),
            }
            self._save_manifest()

    def read_partial_indices(self, object_id: str, view_id: int) -> np.ndarray:
        entry = self.manifest["partials"].get(object_id, {}).get(str(view_id))
        if entry is None:
            raise UnknownIdError(f"no partial for {object_id} view {view_id}")
        path = os.path.join(self.root, "partials", object_id, f"{view_id}.idx")
        return blobio.read_index(path, entry["k"])

    # ---- 2D export ------------------------------------------------------

    def export_2d_pairs(self, record: AnnotationRecord, vp: VisibilityParams,
                        export_seed: int, radius_px: float | None = None) -> dict:
        """Write the (best, challenge) training pairs for one record:
        composite RGB, grayscale heatmap PNG, and a sidecar JSON."""
        from .clients.codec import decode_png_rgba, encode_png

        if record.selection is None:
            raise ValueError("record has no viewpoint selection")
        pc = self.load_point_cloud(record.object_id)
        backgrounds = self.load_backgrounds()
        out_dir = os.path.join(self.root, "exports", record.object_id,
                               record.query_id)
        os.makedirs(out_dir, exist_ok=True)
        files = {}
        zero_heat = float(record.heatmap.values.max()) == 0.0
        for role, view_id in (("best", record.selection.best),
                              ("challenge", record.selection.challenge)):
            cam = self.load_view(record.object_id, view_id)
            hm = render_heatmap_2d(record.heatmap, pc, cam, vp,
                                   radius_px if radius_px is not None
                                   else default_radius_px(cam.width))
            with open(cam.image_ref, "rb") as f:
                rgba = decode_png_rgba(f.read())
            seed_v = export_seed + view_id
            if backgrounds:
                bg = backgrounds[seed_v % len(backgrounds)]
            else:
                bg = np.full((cam.height, cam.width, 3), 128, dtype=np.uint8)
            rgb = composite_background(rgba, bg, seed_v)
            heat = transform_paired_heatmap(hm.values, seed_v)
            rgb_rel = f"exports/{record.object_id}/{record.query_id}/{view_id}.rgb.png"
            heat_rel = f"exports/{record.object_id}/{record.query_id}/{view_id}.heat.png"
            with open(self.path(rgb_rel), "wb") as f:
                f.write(encode_png(rgb))
            heat_u8 = np.rint(np.clip(heat, 0.0, 1.0) * 255.0).astype(np.uint8)
            with open(self.path(heat_rel), "wb") as f:
                f.write(encode_png(heat_u8))
            files[role] = {"view_id": int(view_id), "rgb": rgb_rel, "heat": heat_rel}
        sidecar = {
            "object_id": record.object_id, "query_id": record.query_id,
            "best": int(record.selection.best),
            "challenge": int(record.selection.challenge),
            "all_zero_scores": bool(record.selection.all_zero),
            "zero_heat": zero_heat,
            "files": files,
        }
        _write_json(os.path.join(out_dir, "pair.json"), sidecar)
        return sidecar

    # ---- validation ------------------------------------------------------

    def validate(self) -> list:
        """Dangling paths, duplicate record ids, split partition errors."""
        problems = []
        for object_id, entry in sorted(self.manifest["objects"].items()):
            for rel in [entry["points"]] + [v[key] for v in entry["views"]
                                            for key in ("image", "depth")]:
                if not os.path.exists(self.path(rel)):
                    problems.append(f"missing file {rel}")
        records = self.manifest["records"]
        if len(set(records)) != len(records):
            problems.append("duplicate record ids in manifest")
        for key in records:
            object_id, query_id = split_record_key(key)
            if not self.has_record(object_id, query_id):
                problems.append(f"missing record files for {key}")
        splits = self.manifest.get("splits")
        if splits:
            listed = splits["train"] + splits["test"] + splits["excluded"]
            if sorted(listed) != sorted(records):
                problems.append("splits do not partition the record set")
            train_objects = {split_record_key(k)[0] for k in splits["train"]}
            test_objects = {split_record_key(k)[0] for k in splits["test"]}
            overlap = train_objects & test_objects
            if overlap:
                problems.append(f"objects in both train and test: {sorted(overlap)}")
        return problems


def import_external(src_dir, dest_root) -> DatasetStore:
    """Best-effort importer for the released dataset layout.

    Expects per object: points.npy (N x 3), queries.json (list of
    {text, affordance}), heatmaps.npy (Q x N, values in [0, 1]). Imported
    records carry no view table, support defaults to 1 where heat is
    positive, and review state starts unreviewed.
    """
    src_dir = os.fspath(src_dir)
    store = DatasetStore.create(dest_root)
    object_ids = sorted(d for d in os.listdir(src_dir)
                        if os.path.isdir(os.path.join(src_dir, d)))
    if not object_ids:
        raise ValueError(f"no object directories under {src_dir}")
    with store.bulk():
        _import_objects(store, src_dir, object_ids)
    return store


def _import_objects(store, src_dir, object_ids):
    for object_id in object_ids:
        obj_dir = os.path.join(src_dir, object_id)
        positions = np.load(os.path.join(obj_dir, "points.npy"))
        queries = _read_json(os.path.join(obj_dir, "queries.json"))
        heatmaps = np.load(os.path.join(obj_dir, "heatmaps.npy"))
        if heatmaps.shape[0] != len(queries):
            raise ValueError(f"{object_id}: {len(queries)} queries but "
                             f"{heatmaps.shape[0]} heatmaps")
        if heatmaps.shape[1] != positions.shape[0]:
            raise ValueError(f"{object_id}: heatmap width does not match points")
        store.add_object(object_id, tag="imported", positions=positions)
        for qi, q in enumerate(queries):
            query_id = f"q{qi}"
            values = np.clip(np.asarray(heatmaps[qi], dtype=np.float32), 0.0, 1.0)
            support = (values > 0).astype(np.uint32)
            query = AffordanceQuery(query_id=query_id, object_id=object_id,
                                    text=q["text"],
                                    affordance_phrase=q["affordance"],
                                    object_class=q.get("object_class", "imported"))
            heat = Heatmap3D(object_id=object_id, query_id=query_id,
                             values=values, support=support)
            record = AnnotationRecord(
                object_id=object_id, query=query, heatmap=heat,
                provenance=Provenance(engine_version="imported", seed=0))
            store.write_record(record)
