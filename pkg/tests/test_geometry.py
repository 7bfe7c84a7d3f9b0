import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afforge.errors import (BehindCameraError, NonPositiveDepthError,
                            OutOfRangeError)
from afforge.geometry import (CameraView, PointCloud, VisibilityParams,
                              backproject, project, project_many,
                              sample_bilinear, visible)
from afforge.synthetic import ring_camera_poses

from conftest import backproject_pixels, make_camera
from oracles import project_oracle


def ring_camera(view_id=0, width=64, height=64):
    intr, w2c = ring_camera_poses()[view_id]
    fx = 1.1 * width
    intrinsics = np.array([[fx, 0.0, (width - 1) / 2.0],
                           [0.0, fx, (height - 1) / 2.0],
                           [0.0, 0.0, 1.0]])
    depth = np.full((height, width), 2.0, dtype=np.float32)
    return CameraView(view_id=view_id, intrinsics=intrinsics,
                      world_to_camera=w2c, width=width, height=height,
                      depth=depth)


class TestPointCloud:
    def test_basic(self):
        pos = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                       dtype=np.int32)
        pc = PointCloud(object_id="x", positions=pos)
        assert pc.point_count == 4
        assert pc.positions.dtype == np.float64
        assert pc.positions.flags["C_CONTIGUOUS"]

    def test_rejects_degenerate_bbox(self):
        with pytest.raises(ValueError):
            PointCloud(object_id="x", positions=np.zeros((4, 3)))

    def test_bbox_diagonal(self):
        pos = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
        pc = PointCloud(object_id="x", positions=pos)
        assert pc.bbox_diagonal == pytest.approx(5.0)

    def test_rejects_bad_shapes(self):
        with pytest.raises(Exception):
            PointCloud(object_id="x", positions=np.zeros((4, 2)))
        with pytest.raises(Exception):
            PointCloud(object_id="x", positions=np.zeros((0, 3)))
        with pytest.raises(Exception):
            PointCloud(object_id="x",
                       positions=np.array([[0.0, np.nan, 0.0]]))


class TestCameraView:
    def test_rejects_non_orthonormal_rotation(self):
        cam = make_camera()
        w2c = cam.world_to_camera.copy()
        w2c[0, 0] = 1.5
        with pytest.raises(Exception):
            CameraView(view_id=0, intrinsics=cam.intrinsics,
                       world_to_camera=w2c, width=cam.width,
                       height=cam.height, depth=cam.depth)

    def test_rejects_negative_depth_pixels(self):
        cam = make_camera()
        depth = cam.depth.copy()
        depth[3, 3] = -1.0
        with pytest.raises(Exception):
            CameraView(view_id=0, intrinsics=cam.intrinsics,
                       world_to_camera=cam.world_to_camera, width=cam.width,
                       height=cam.height, depth=depth)

    def test_accepts_inf_and_zero_depth_pixels(self):
        cam = make_camera()
        depth = cam.depth.copy()
        depth[1, 1] = np.inf
        depth[2, 2] = 0.0
        CameraView(view_id=0, intrinsics=cam.intrinsics,
                   world_to_camera=cam.world_to_camera, width=cam.width,
                   height=cam.height, depth=depth)

    def test_camera_center(self):
        cam = ring_camera(view_id=3)
        # the ring cameras all sit at distance 2 from the origin
        assert np.linalg.norm(cam.camera_center) == pytest.approx(2.0)


class TestProject:
    def test_matches_oracle(self):
        cam = ring_camera(view_id=7)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.5, 0.5, size=(200, 3))
        for p in pts:
            got = project(p, cam)
            ref = project_oracle(p, cam.rotation.tolist(),
                                 cam.translation.tolist(),
                                 cam.fx, cam.fy, cam.cx, cam.cy)
            assert got.u == pytest.approx(ref[0], abs=1e-12)
            assert got.v == pytest.approx(ref[1], abs=1e-12)
            assert got.z_cam == pytest.approx(ref[2], abs=1e-12)

    def test_behind_camera_raises(self):
        cam = make_camera()
        with pytest.raises(BehindCameraError):
            project((0.0, 0.0, -1.0), cam)
        with pytest.raises(BehindCameraError):
            project((0.0, 0.0, 0.0), cam)  # exactly on the plane counts

    def test_project_many_matches_scalar(self):
        cam = ring_camera(view_id=11)
        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.5, 0.5, size=(100, 3))
        u, v, zc = project_many(pts, cam)
        for i, p in enumerate(pts):
            s = project(p, cam)
            assert s.u == u[i] and s.v == v[i] and s.z_cam == zc[i]


class TestRoundTrip:
    def test_project_backproject_10k(self):
        """Round-trip error bounded by 1e-9 of the cloud diagonal."""
        cam = ring_camera(view_id=5)
        rng = np.random.default_rng(42)
        pts = rng.uniform(-0.5, 0.5, size=(10_000, 3))
        diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
        worst = 0.0
        for p in pts:
            uvz = project(p, cam)
            q = backproject(uvz.u, uvz.v, uvz.z_cam, cam)
            worst = max(worst, float(np.linalg.norm(q - p)))
        assert worst <= 1e-9 * diag

    def test_backproject_rejects_nonpositive_depth(self):
        cam = make_camera()
        with pytest.raises(NonPositiveDepthError):
            backproject(1.0, 1.0, 0.0, cam)
        with pytest.raises(NonPositiveDepthError):
            backproject(1.0, 1.0, -2.0, cam)

    @settings(max_examples=100, deadline=None)
    @given(px=st.integers(0, 63), py=st.integers(0, 63),
           d=st.floats(0.1, 50.0), view=st.integers(0, 24))
    def test_pixel_depth_roundtrip_property(self, px, py, d, view):
        cam = ring_camera(view_id=view)
        p = backproject(float(px), float(py), d, cam)
        uvz = project(p, cam)
        assert uvz.u == pytest.approx(px, abs=1e-6)
        assert uvz.v == pytest.approx(py, abs=1e-6)
        assert uvz.z_cam == pytest.approx(d, rel=1e-9)


class TestVisibility:
    def test_two_plane_occlusion_oracle(self):
        """Near plane hides exactly the far-plane points behind it."""
        cam = make_camera(width=64, height=64)
        near_px = range(8, 32)
        near_py = range(16, 48)
        depth = np.full((64, 64), 4.0, dtype=np.float32)
        for py in near_py:
            for px in near_px:
                depth[py, px] = 2.0
        cam = make_camera(width=64, height=64, depth=depth)

        grid = np.array([(px, py) for py in range(64) for px in range(64)])
        far_pts = backproject_pixels(cam, grid[:, 0], grid[:, 1], 4.0)
        near_pts = backproject_pixels(
            cam, [px for py in near_py for px in near_px],
            [py for py in near_py for px in near_px], 2.0)

        pc = PointCloud(object_id="planes",
                        positions=np.vstack([near_pts, far_pts]))
        vp = VisibilityParams(rel_tol=0.01, abs_tol=1e-4)
        got = visible(pc, cam, vp)

        expected_near = np.ones(len(near_pts), dtype=bool)
        expected_far = np.array(
            [not (px in near_px and py in near_py) for px, py in grid])
        expected = np.concatenate([expected_near, expected_far])
        assert np.array_equal(got, expected)

    def test_border_pixels_are_inside(self):
        cam = make_camera(width=16, height=16)
        corners = backproject_pixels(cam, [0, 15, 0, 15], [0, 0, 15, 15], 2.0)
        pc = PointCloud(object_id="c", positions=corners)
        vp = VisibilityParams(rel_tol=0.01, abs_tol=1e-4)
        assert visible(pc, cam, vp).all()

    def test_outside_border_is_not_visible(self):
        cam = make_camera(width=16, height=16)
        # just beyond the border pixel on each side
        pts = backproject_pixels(cam, [-0.6, 15.6, 7.0, 7.0],
                                 [7.0, 7.0, -0.6, 15.6], 2.0)
        pc = PointCloud(object_id="c", positions=pts)
        vp = VisibilityParams(rel_tol=0.5, abs_tol=1.0)
        assert not visible(pc, cam, vp).any()

    def test_depth_tolerance_band(self):
        cam = make_camera(width=8, height=8)  # constant depth 2.0
        vp = VisibilityParams(rel_tol=0.01, abs_tol=0.0)
        pts = backproject_pixels(cam, [3.0, 5.0], [3.0, 5.0], 2.0)
        pts[0, 2] = 2.0 * 1.009   # inside the 1% band
        pts[1, 2] = 2.0 * 1.011   # outside it
        pc = PointCloud(object_id="band", positions=pts)
        assert list(visible(pc, cam, vp)) == [True, False]

    def test_hole_pixels_see_nothing(self):
        depth = np.full((8, 8), 2.0, dtype=np.float32)
        depth[4, 4] = 0.0
        depth[2, 2] = np.inf
        cam = make_camera(width=8, height=8, depth=depth)
        pts = backproject_pixels(cam, [4.0, 2.0, 5.0], [4.0, 2.0, 5.0], 2.0)
        pc = PointCloud(object_id="h", positions=pts)
        vp = VisibilityParams(rel_tol=0.01, abs_tol=1e-4)
        assert list(visible(pc, cam, vp)) == [False, False, True]

    def test_for_cloud_scales_abs_tol(self):
        pos = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])
        pc = PointCloud(object_id="x", positions=pos)
        vp = VisibilityParams.for_cloud(pc)
        assert vp.abs_tol == pytest.approx(1e-4 * 5.0)


class TestSampleBilinear:
    def test_exact_at_pixel_centers(self):
        m = np.arange(12, dtype=np.float32).reshape(3, 4)
        for y in range(3):
            for x in range(4):
                assert sample_bilinear(m, float(x), float(y)) == float(m[y, x])

    def test_midpoint_average(self):
        m = np.array([[0.0, 1.0], [0.0, 1.0]], dtype=np.float32)
        assert sample_bilinear(m, 0.5, 0.5) == pytest.approx(0.5)

    def test_out_of_range_raises(self):
        m = np.zeros((4, 4), dtype=np.float32)
        for u, v in [(-0.1, 0.0), (0.0, -0.1), (3.1, 0.0), (0.0, 3.1)]:
            with pytest.raises(OutOfRangeError):
                sample_bilinear(m, u, v)

    @settings(max_examples=100, deadline=None)
    @given(u=st.floats(0.0, 6.0), v=st.floats(0.0, 4.0), seed=st.integers(0, 99))
    def test_bounded_by_texels_property(self, u, v, seed):
        rng = np.random.default_rng(seed)
        m = rng.random((5, 7)).astype(np.float32)
        s = sample_bilinear(m, u, v)
        assert m.min() - 1e-12 <= s <= m.max() + 1e-12
