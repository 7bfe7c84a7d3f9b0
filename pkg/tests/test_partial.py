import numpy as np
import pytest

from afforge.errors import EmptyInputError, NoVisiblePointsError
from afforge.geometry import PointCloud, VisibilityParams

from conftest import make_camera
from afforge.lift import Heatmap3D
from afforge.partial import (DEFAULT_PARTIAL_K, PartialRecord,
                             farthest_point_sample, make_partial,
                             restrict_heatmap, visible_subset)
from afforge.synthetic import make_camera_view, make_point_cloud, render_views

N_ORACLE_CLOUDS = 200
ORACLE_MAX_M = 512

import oracles


@pytest.fixture(scope="module")
def big_cube():
    views = render_views("cube", 96)
    cams = [make_camera_view(v) for v in views]
    pc = make_point_cloud("cube", 16384, seed=9)
    vp = VisibilityParams.for_cloud(pc)
    return pc, cams, vp


class TestMakePartial:
    def test_exact_count_unique_and_visible(self, big_cube):
        pc, cams, vp = big_cube
        for cam in (cams[0], cams[13]):
            rec = make_partial(pc, cam, vp)
            assert rec.indices.shape == (DEFAULT_PARTIAL_K,)
            assert len(np.unique(rec.indices)) == DEFAULT_PARTIAL_K
            allowed = set(visible_subset(pc, cam, vp).tolist())
            assert set(rec.indices.tolist()) <= allowed
            assert not rec.under_sampled
            assert rec.source_view == cam.view_id

    def test_deterministic(self, big_cube):
        pc, cams, vp = big_cube
        a = make_partial(pc, cams[4], vp)
        b = make_partial(pc, cams[4], vp)
        assert np.array_equal(a.indices, b.indices)

    def test_under_sampled_keeps_all_visible_ascending(self, big_cube):
        pc, cams, vp = big_cube
        vis = visible_subset(pc, cams[0], vp)
        rec = make_partial(pc, cams[0], vp, k=vis.shape[0] + 100)
        assert rec.under_sampled
        assert np.array_equal(rec.indices, vis)
        assert np.all(np.diff(rec.indices) > 0)

    def test_no_visible_points_raises(self):
        pts = np.array([[0.0, 0.0, -5.0], [1.0, 0.0, -5.0],
                        [0.0, 1.0, -6.0], [1.0, 1.0, -6.0]])
        pc = PointCloud(object_id="behind", positions=pts)
        cam = make_camera(32, 32, 0)
        with pytest.raises(NoVisiblePointsError):
            make_partial(pc, cam, VisibilityParams.for_cloud(pc))


class TestFPS:
    def test_matches_bruteforce_over_random_clouds(self):
        rng = np.random.default_rng(21)
        for trial in range(N_ORACLE_CLOUDS):
            if trial < 20:  # small clouds, full ordering
                m = int(rng.integers(2, 65))
                k = m
            else:
                m = int(rng.integers(2, ORACLE_MAX_M + 1))
                k = int(rng.integers(1, min(m, 128) + 1))
            pts = rng.random((m, 3)) * 4.0 - 2.0
            got = farthest_point_sample(pts, k)
            start = oracles.fps_start_oracle(pts)
            ref = oracles.fps_oracle(pts, k, start)
            assert np.array_equal(got, np.asarray(ref, dtype=np.int64)), \
                f"trial {trial}: m={m} k={k}"

    def test_first_pick_farthest_from_centroid(self):
        rng = np.random.default_rng(22)
        pts = rng.random((40, 3))
        idx = farthest_point_sample(pts, 5)
        d = np.linalg.norm(pts - pts.mean(axis=0), axis=1)
        assert idx[0] == int(np.argmax(d))

    def test_k_at_least_m_returns_permutation(self):
        rng = np.random.default_rng(23)
        pts = rng.random((17, 3))
        idx = farthest_point_sample(pts, 50)
        assert sorted(idx.tolist()) == list(range(17))

    def test_validation(self):
        with pytest.raises(EmptyInputError):
            farthest_point_sample(np.zeros((0, 3)), 1)
        with pytest.raises(ValueError):
            farthest_point_sample(np.zeros((4, 2)), 1)
        with pytest.raises(ValueError):
            farthest_point_sample(np.zeros((4, 3)), 0)


class TestPartialRecord:
    def test_duplicate_indices_rejected(self):
        with pytest.raises(ValueError):
            PartialRecord(object_id="o", source_view=0,
                          indices=np.array([1, 2, 2]), under_sampled=False)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            PartialRecord(object_id="o", source_view=0,
                          indices=np.array([], dtype=np.int64),
                          under_sampled=False)


class TestRestrictHeatmap:
    def test_values_and_support_bit_exact(self, big_cube):
        pc, cams, vp = big_cube
        rng = np.random.default_rng(24)
        n = pc.positions.shape[0]
        h = Heatmap3D(object_id=pc.object_id, query_id="q",
                      values=rng.random(n).astype(np.float32),
                      support=rng.integers(1, 26, n).astype(np.uint32))
        rec = make_partial(pc, cams[2], vp)
        sub = restrict_heatmap(h, rec)
        assert sub.values.tobytes() == h.values[rec.indices].tobytes()
        assert sub.support.tobytes() == h.support[rec.indices].tobytes()
        assert sub.object_id == h.object_id
        assert sub.query_id == h.query_id
        assert sub.values.shape == (DEFAULT_PARTIAL_K,)
