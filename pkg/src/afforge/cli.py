"""Command line entry points for the annotation pipeline.

Typical flow:
  afforge synth --root data/demo
  afforge generate --root data/demo
  afforge stats --root data/demo
  afforge serve --root data/demo --port 8787
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from .clients.base import ClientBundle
from .clients.mock import MockPointClient, MockQueryClient, MockSegmentClient
from .config import load_config
from .engine import Engine
from .geometry import VisibilityParams
from .metrics import aggregate_reports, coverage, diversity, score_record
from .store import DatasetStore, ViewAsset, import_external, split_record_key
from .synthetic import SHAPE_KINDS, make_backgrounds, make_point_cloud, render_views


def _echo_json(obj):
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _csv_ints(text):
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _load_cfg(config_path, **overrides):
    clean = {k: v for k, v in overrides.items() if v is not None}
    return load_config(config_path, clean)


@click.group()
def main():
    """Affordance annotation pipeline tools."""


@main.command()
@click.option("--root", required=True, type=click.Path())
@click.option("--objects", default=",".join(SHAPE_KINDS), show_default=True,
              help="comma-separated shape kinds")
@click.option("--copies", default=1, show_default=True,
              help="objects per kind (ids get _<i> suffixes beyond 1)")
@click.option("--points", default=16384, show_default=True)
@click.option("--size", default=192, show_default=True, help="render size px")
@click.option("--seed", default=0, show_default=True)
def synth(root, objects, copies, points, size, seed):
    """Create a synthetic dataset: ray-traced views plus surface points."""
    if os.path.exists(os.path.join(root, "manifest.json")):
        store = DatasetStore.open(root)
    else:
        store = DatasetStore.create(root)
        for bg in make_backgrounds(size=max(256, size)):
            store.add_background(bg)
    kinds = [k.strip() for k in objects.split(",") if k.strip()]
    made = []
    for kind in kinds:
        if kind not in SHAPE_KINDS:
            raise click.UsageError(f"unknown shape {kind!r}; "
                                   f"choose from {SHAPE_KINDS}")
        views = render_views(kind, image_size=size)
        assets = [ViewAsset(view_id=v.view_id, intrinsics=v.intrinsics,
                            world_to_camera=v.world_to_camera,
                            rgba=v.rgba, depth=v.depth) for v in views]
        for i in range(copies):
            object_id = kind if copies == 1 else f"{kind}_{i}"
            pc = make_point_cloud(kind, n_points=points, seed=seed + i)
            store.add_object(object_id, tag=kind, positions=pc.positions,
                             views=assets)
            made.append(object_id)
    _echo_json({"root": store.root, "objects": made})


def _build_clients(cfg, use_http: bool) -> ClientBundle:
    if use_http:
        from .clients.http import (HttpPointClient, HttpQueryClient,
                                   HttpSegmentClient, service_urls_from_env)

        urls = service_urls_from_env(cfg.query_url, cfg.point_url,
                                     cfg.segment_url)
        common = dict(timeout_s=cfg.timeout_s, backoff_s=cfg.backoff_s,
                      bearer_token=cfg.bearer_token)
        return ClientBundle(
            query=HttpQueryClient(urls[0], **common),
            point=HttpPointClient(urls[1], max_points=cfg.max_points, **common),
            segment=HttpSegmentClient(urls[2], **common))
    return ClientBundle(
        query=MockQueryClient(seed=cfg.seed),
        point=MockPointClient(seed=cfg.seed, max_points=cfg.max_points),
        segment=MockSegmentClient(seed=cfg.seed, slope=cfg.mock_logit_slope,
                                  offset=cfg.mock_logit_offset))


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--objects", default=None, help="comma-separated object ids")
@click.option("--http", "use_http", is_flag=True,
              help="use HTTP services instead of in-process mocks")
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=None)
@click.option("--combiner", default=None)
def generate(root, config_path, objects, use_http, seed, workers, combiner):
    """Run the annotation pipeline over the stored objects."""
    cfg = _load_cfg(config_path, seed=seed, workers=workers, combiner=combiner)
    store = DatasetStore.open(root)
    engine = Engine(store, _build_clients(cfg, use_http), cfg)
    ids = [s.strip() for s in objects.split(",")] if objects else None
    report = engine.run_batch(ids)
    _echo_json(report.to_dict())
    if report.count("failed"):
        sys.exit(1)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--object", "object_id", required=True)
@click.option("--query", "query_id", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--combiner", default=None)
def fuse(root, object_id, query_id, config_path, combiner):
    """Re-fuse one record from its stored per-view contributions."""
    from .lift import fuse_views

    cfg = _load_cfg(config_path, combiner=combiner)
    store = DatasetStore.open(root)
    record = store.read_record(object_id, query_id)
    pc = store.load_point_cloud(object_id)
    vp = VisibilityParams(rel_tol=cfg.rel_tol,
                          abs_tol=cfg.abs_tol_scale * pc.bbox_diagonal)
    pairs = store.effective_contributions(object_id, query_id)
    heat = fuse_views(pc, pairs, vp, combiner=cfg.combiner, query_id=query_id)
    identical = bool(np.array_equal(heat.values, record.heatmap.values)
                     and np.array_equal(heat.support, record.heatmap.support))
    record.heatmap = heat
    store.write_record(record)
    _echo_json({"record": record.key, "views_fused": len(pairs),
                "max_value": float(heat.values.max()) if heat.point_count else 0.0,
                "low_support": bool(heat.low_support),
                "matched_stored": identical})


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--object", "object_id", required=True)
@click.option("--query", "query_id", required=True)
@click.option("--view", "view_id", required=True, type=int)
@click.option("--out", required=True, type=click.Path())
@click.option("--radius", type=float, default=None, help="splat radius px")
def render2d(root, object_id, query_id, view_id, out, radius):
    """Re-render a record's fused heatmap into one view as a PNG."""
    from .clients.codec import encode_png
    from .reproject import default_radius_px, render_heatmap_2d

    store = DatasetStore.open(root)
    record = store.read_record(object_id, query_id)
    pc = store.load_point_cloud(object_id)
    cam = store.load_view(object_id, view_id)
    vp = VisibilityParams.for_cloud(pc)
    hm = render_heatmap_2d(record.heatmap, pc, cam, vp,
                           radius if radius is not None
                           else default_radius_px(cam.width))
    img = np.rint(np.clip(hm.values, 0.0, 1.0) * 255.0).astype(np.uint8)
    with open(out, "wb") as f:
        f.write(encode_png(img))
    _echo_json({"out": out, "view": view_id,
                "nonzero_px": int(np.count_nonzero(img))})


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--objects", default=None, help="comma-separated ids, default all")
@click.option("--views", default="0,6,12,18", show_default=True)
@click.option("--k", default=None, type=int, help="points per partial")
@click.option("--config", "config_path", type=click.Path(exists=True))
def partial(root, objects, views, k, config_path):
    """Carve per-view partial clouds and restrict record heatmaps to them."""
    from .partial import make_partial, restrict_heatmap

    cfg = _load_cfg(config_path, partial_k=k)
    store = DatasetStore.open(root)
    ids = ([s.strip() for s in objects.split(",")] if objects
           else store.object_ids())
    view_ids = _csv_ints(views)
    made = []
    for object_id in ids:
        pc = store.load_point_cloud(object_id)
        vp = VisibilityParams(rel_tol=cfg.rel_tol,
                              abs_tol=cfg.abs_tol_scale * pc.bbox_diagonal)
        record_keys = [key for key in store.record_ids()
                       if split_record_key(key)[0] == object_id]
        for view_id in view_ids:
            cam = store.load_view(object_id, view_id)
            rec = make_partial(pc, cam, vp, k=cfg.partial_k)
            restricted = {}
            for key in record_keys:
                _, query_id = split_record_key(key)
                record = store.read_record(object_id, query_id)
                restricted[query_id] = restrict_heatmap(record.heatmap, rec)
            store.write_partial(rec, restricted)
            made.append({"object_id": object_id, "view_id": view_id,
                         "k": int(rec.indices.shape[0]),
                         "under_sampled": bool(rec.under_sampled)})
    _echo_json({"partials": made})


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--pred", "pred_dir", type=click.Path(exists=True),
              help="directory of <object>__<query>.npy predictions")
@click.option("--self", "self_eval", is_flag=True,
              help="score stored records against themselves (sanity run)")
@click.option("--out", type=click.Path(), default=None)
def evaluate(root, pred_dir, self_eval, out):
    """Score 3D predictions against stored records."""
    if not pred_dir and not self_eval:
        raise click.UsageError("need --pred DIR or --self")
    store = DatasetStore.open(root)
    reports = {}
    for key in store.record_ids():
        object_id, query_id = split_record_key(key)
        record = store.read_record(object_id, query_id)
        gt = record.heatmap.values
        if self_eval:
            pred = gt
        else:
            path = os.path.join(pred_dir, f"{object_id}__{query_id}.npy")
            if not os.path.exists(path):
                continue
            pred = np.asarray(np.load(path), dtype=np.float32)
        reports[key] = score_record(pred, gt)
    result = {"records": {key: rep.to_dict() for key, rep in
                          sorted(reports.items())},
              "aggregate": aggregate_reports(list(reports.values())),
              "scored": len(reports)}
    if out:
        with open(out, "w", encoding="utf-8") as f:
            json.dump(result, f, indent=2, sort_keys=True)
        click.echo(f"wrote {out} ({len(reports)} records)")
    else:
        _echo_json(result)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None)
def stats(root, out):
    """Dataset statistics: per-object coverage/diversity plus review state."""
    store = DatasetStore.open(root)
    per_object = {}
    by_object: dict[str, list] = {}
    reviews = {"good": 0, "ok": 0, "not_good": 0}
    unreviewed = 0
    refined = 0
    for key in store.record_ids():
        object_id, query_id = split_record_key(key)
        record = store.read_record(object_id, query_id)
        by_object.setdefault(object_id, []).append(record.heatmap.values)
        if record.review.tier is not None:
            reviews[record.review.tier] += 1
        else:
            unreviewed += 1
        if record.review.status == "refined" or record.review.refined_views:
            refined += 1
    for object_id, heats in sorted(by_object.items()):
        div = diversity(heats)
        per_object[object_id] = {
            "records": len(heats),
            "coverage": coverage(heats),
            "diversity": None if div is None else float(div),
        }
    cov_vals = [v["coverage"] for v in per_object.values()]
    div_vals = [v["diversity"] for v in per_object.values()
                if v["diversity"] is not None]
    rated = sum(reviews.values())
    splits = store.build_splits()
    result = {
        "objects": per_object,
        "dataset": {
            "object_count": len(per_object),
            "record_count": sum(v["records"] for v in per_object.values()),
            "mean_coverage": float(np.mean(cov_vals)) if cov_vals else None,
            "mean_diversity": float(np.mean(div_vals)) if div_vals else None,
        },
        "review": {
            "tiers": reviews, "rated": rated, "unreviewed": unreviewed,
            "tier_fractions": {k: (v / rated if rated else None)
                               for k, v in reviews.items()},
            "refined": refined,
        },
        "splits": {"train": len(splits.train), "test": len(splits.test),
                   "excluded": len(splits.excluded)},
    }
    if out:
        with open(out, "w", encoding="utf-8") as f:
            json.dump(result, f, indent=2, sort_keys=True)
        click.echo(f"wrote {out}")
    else:
        _echo_json(result)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
def splits(root):
    """Build and persist the train/test/excluded record split."""
    store = DatasetStore.open(root)
    s = store.build_splits()
    _echo_json({"train": len(s.train), "test": len(s.test),
                "excluded": len(s.excluded)})


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
def validate(root):
    """Check store integrity; non-zero exit when problems are found."""
    store = DatasetStore.open(root)
    problems = store.validate()
    _echo_json({"problems": problems})
    if problems:
        sys.exit(1)


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None)
def serve(root, host, port, config_path, frontend_dir):
    """Run the human review service."""
    import uvicorn

    from .review import build_review_app

    cfg = _load_cfg(config_path)
    store = DatasetStore.open(root)
    if frontend_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        frontend_dir = candidate if os.path.isdir(candidate) else None
    app = build_review_app(store, cfg, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("mock-serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8899, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--slope", default=None, type=float)
@click.option("--offset", default=None, type=float)
def mock_serve(host, port, seed, slope, offset):
    """Serve the mock model services over the wire protocol."""
    import uvicorn

    from .clients.mock import DEFAULT_LOGIT_OFFSET, DEFAULT_LOGIT_SLOPE
    from .clients.mock_server import build_mock_service_app

    app = build_mock_service_app(
        seed=seed,
        slope=slope if slope is not None else DEFAULT_LOGIT_SLOPE,
        offset=offset if offset is not None else DEFAULT_LOGIT_OFFSET)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("import-external")
@click.option("--src", required=True, type=click.Path(exists=True))
@click.option("--dest", required=True, type=click.Path())
def import_external_cmd(src, dest):
    """Import a released dataset directory into a store."""
    store = import_external(src, dest)
    _echo_json({"root": store.root, "objects": store.object_ids(),
                "records": len(store.record_ids())})


if __name__ == "__main__":
    main()
