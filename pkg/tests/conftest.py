import shutil

import numpy as np
import pytest

from afforge.clients.base import ClientBundle
from afforge.clients.mock import (MockPointClient, MockQueryClient,
                                  MockSegmentClient)
from afforge.clients.types import AffordanceQuery
from afforge.config import EngineConfig
from afforge.engine import Engine
from afforge.geometry import CameraView
from afforge.lift import Heatmap3D
from afforge.store import (RATING_CRITERIA, AnnotationRecord, DatasetStore,
                           ReviewState, ViewAsset)
from afforge.synthetic import SHAPE_KINDS, make_backgrounds, make_point_cloud, render_views

E2E_SEED = 7

# 1000 objects x 5 queries, 800 objects reviewed: 4000 ratings split
# 2892/492/616 = exactly 72.3/12.3/15.4 percent, 560 of the not_good
# records refined afterwards.
REVIEW_FIXTURE = {
    "objects": 1000,
    "queries_per_object": 5,
    "reviewed_objects": 800,
    "tiers": {"good": 2892, "ok": 492, "not_good": 616},
    "refined": 560,
    "splits": {"train": 1000, "test": 3944, "excluded": 56},
}


def make_camera(width=64, height=64, view_id=0, depth=None, fx=None):
    """Axis-aligned test camera at the world origin looking down +z."""
    fx = fx if fx is not None else 1.1 * width
    intr = np.array([[fx, 0.0, (width - 1) / 2.0],
                     [0.0, fx, (height - 1) / 2.0],
                     [0.0, 0.0, 1.0]])
    w2c = np.eye(4)
    if depth is None:
        depth = np.full((height, width), 2.0, dtype=np.float32)
    return CameraView(view_id=view_id, intrinsics=intr, world_to_camera=w2c,
                      width=width, height=height, depth=depth)


def backproject_pixels(cam, px, py, z):
    """World positions whose projections land exactly on pixel centers."""
    x = (np.asarray(px, dtype=np.float64) - cam.cx) / cam.fx * z
    y = (np.asarray(py, dtype=np.float64) - cam.cy) / cam.fy * z
    return np.column_stack([x, y, np.full(len(x), float(z))])


def mock_bundle(seed=E2E_SEED, max_points=3):
    return ClientBundle(query=MockQueryClient(seed=seed),
                        point=MockPointClient(seed=seed, max_points=max_points),
                        segment=MockSegmentClient(seed=seed))


def build_shape_store(root, seed=E2E_SEED, kinds=SHAPE_KINDS, size=192,
                      points=16384, workers=1):
    store = DatasetStore.create(root)
    for bg in make_backgrounds(size=256):
        store.add_background(bg)
    for kind in kinds:
        views = render_views(kind, image_size=size)
        assets = [ViewAsset(view_id=v.view_id, intrinsics=v.intrinsics,
                            world_to_camera=v.world_to_camera,
                            rgba=v.rgba, depth=v.depth) for v in views]
        pc = make_point_cloud(kind, n_points=points, seed=seed)
        store.add_object(kind, tag=kind, positions=pc.positions, views=assets)
    cfg = EngineConfig(seed=seed, workers=workers)
    report = Engine(store, mock_bundle(seed=seed), cfg).run_batch()
    assert report.count("failed") == 0, report.to_dict()
    return store


@pytest.fixture(scope="session")
def shape_store(tmp_path_factory):
    """Full cube/sphere/cylinder pipeline run at production settings.
    Read-only: tests that mutate must copy it first."""
    root = tmp_path_factory.mktemp("ring_store")
    return build_shape_store(root)


@pytest.fixture(scope="session")
def mini_store(tmp_path_factory):
    """Small single-cube pipeline store for cheap mutation copies."""
    root = tmp_path_factory.mktemp("mini_store")
    return build_shape_store(root, kinds=("cube",), size=96, points=2048)


@pytest.fixture
def mini_store_copy(mini_store, tmp_path):
    dest = tmp_path / "store"
    shutil.copytree(mini_store.root, dest)
    return DatasetStore.open(dest)


def build_review_fixture(root) -> DatasetStore:
    """Synthetic review corpus matching REVIEW_FIXTURE exactly.

    Objects carry four points and no views; the fixture exercises review
    bookkeeping and split arithmetic, not geometry.
    """
    fx = REVIEW_FIXTURE
    store = DatasetStore.create(root)
    points = np.array([[0.0, 0.0, 1.0], [0.1, 0.0, 1.0],
                       [0.0, 0.1, 1.0], [0.1, 0.1, 1.0]])
    heat = Heatmap3D(object_id="", query_id="",
                     values=np.array([0.5, 0.25, 0.0, 1.0], dtype=np.float32),
                     support=np.array([1, 2, 0, 3], dtype=np.uint32))
    all_pass = {k: "pass" for k in RATING_CRITERIA}
    all_fail = {k: "fail" for k in RATING_CRITERIA}
    mixed = dict(all_pass, coverage="fail")
    criteria_for = {"good": all_pass, "ok": mixed, "not_good": all_fail}

    tier_seq = []
    for tier in ("good", "ok", "not_good"):
        tier_seq.extend([tier] * fx["tiers"][tier])
    refine_left = fx["refined"]

    with store.bulk():
        idx = 0
        for i in range(fx["objects"]):
            object_id = f"rv_{i:04d}"
            store.add_object(object_id, tag="synthetic", positions=points)
            for j in range(fx["queries_per_object"]):
                if i < fx["reviewed_objects"]:
                    tier = tier_seq[idx]
                    idx += 1
                    refined = tier == "not_good" and refine_left > 0
                    if refined:
                        refine_left -= 1
                    review = ReviewState(
                        status="refined" if refined else tier, tier=tier,
                        rater_id="synthetic", criteria=criteria_for[tier],
                        refined_views=[0] if refined else [])
                else:
                    review = ReviewState()
                query = AffordanceQuery(
                    query_id=f"q{j}", object_id=object_id,
                    text=f"use object {i}", affordance_phrase="use",
                    object_class="synthetic")
                store.write_record(AnnotationRecord(
                    object_id=object_id, query=query, heatmap=heat,
                    review=review))
    return store


@pytest.fixture(scope="session")
def review_store(tmp_path_factory):
    """1000-object review corpus with the pinned tier mix; read-only."""
    return build_review_fixture(tmp_path_factory.mktemp("review_store"))
