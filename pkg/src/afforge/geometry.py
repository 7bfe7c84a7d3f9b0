"""Pinhole camera math, depth-buffer visibility, and bilinear sampling.

Conventions: world and object space coincide (assets are normalized), the
camera follows the x-right / y-down / z-forward convention, and depth maps
store camera-frame z (not ray length). Pixel (0, 0) is the center of the
top-left texel; points landing exactly on the image border count as inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import BehindCameraError, NonPositiveDepthError, OutOfRangeError

VIEW_RING_SIZE = 25

DEFAULT_REL_TOL = 0.01
DEFAULT_ABS_TOL_SCALE = 1e-4


@dataclass(frozen=True)
class PointCloud:
    """N surface points of one object, positions in normalized asset scale."""

    object_id: str
    positions: np.ndarray

    def __post_init__(self):
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError(f"positions must be (N, 3) with N >= 1, got {pos.shape}")
        if not np.isfinite(pos).all():
            raise ValueError("positions must be finite")
        object.__setattr__(self, "positions", pos)
        if self.bbox_diagonal <= 0.0:
            raise ValueError("point cloud is degenerate (zero bounding box)")

    @property
    def point_count(self) -> int:
        return self.positions.shape[0]

    @cached_property
    def bbox_diagonal(self) -> float:
        span = self.positions.max(axis=0) - self.positions.min(axis=0)
        return float(math.sqrt(span[0] ** 2 + span[1] ** 2 + span[2] ** 2))


@dataclass(frozen=True)
class CameraView:
    """One rendered viewpoint: intrinsics, pose, depth map, image handle."""

    view_id: int
    intrinsics: np.ndarray
    world_to_camera: np.ndarray
    width: int
    height: int
    depth: np.ndarray
    image_ref: str | None = None

    def __post_init__(self):
        if not 0 <= self.view_id < VIEW_RING_SIZE:
            raise ValueError(f"view_id must be in [0, {VIEW_RING_SIZE - 1}]")
        k = np.ascontiguousarray(np.asarray(self.intrinsics, dtype=np.float64))
        w2c = np.ascontiguousarray(np.asarray(self.world_to_camera, dtype=np.float64))
        if k.shape != (3, 3):
            raise ValueError(f"intrinsics must be 3x3, got {k.shape}")
        if w2c.shape != (4, 4):
            raise ValueError(f"world_to_camera must be 4x4, got {w2c.shape}")
        if not (k[0, 0] > 0 and k[1, 1] > 0):
            raise ValueError("focal lengths must be positive")
        if not (0 <= k[0, 2] < self.width and 0 <= k[1, 2] < self.height):
            raise ValueError("principal point must lie inside the image")
        rot = w2c[:3, :3]
        if np.abs(rot @ rot.T - np.eye(3)).max() > 1e-6:
            raise ValueError("rotation block is not orthonormal within 1e-6")
        if np.abs(w2c[3] - np.array([0.0, 0.0, 0.0, 1.0])).max() > 1e-9:
            raise ValueError("world_to_camera last row must be [0, 0, 0, 1]")
        d = np.ascontiguousarray(np.asarray(self.depth, dtype=np.float32))
        if d.shape != (self.height, self.width):
            raise ValueError(
                f"depth shape {d.shape} does not match image {self.height}x{self.width}"
            )
        finite = np.isfinite(d)
        if finite.any() and d[finite].min() < 0:
            raise ValueError("depth values must be >= 0 where defined")
        object.__setattr__(self, "intrinsics", k)
        object.__setattr__(self, "world_to_camera", w2c)
        object.__setattr__(self, "depth", d)

    @property
    def fx(self) -> float:
        return float(self.intrinsics[0, 0])

    @property
    def fy(self) -> float:
        return float(self.intrinsics[1, 1])

    @property
    def cx(self) -> float:
        return float(self.intrinsics[0, 2])

    @property
    def cy(self) -> float:
        return float(self.intrinsics[1, 2])

    @cached_property
    def rotation(self) -> np.ndarray:
        return np.ascontiguousarray(self.world_to_camera[:3, :3])

    @cached_property
    def translation(self) -> np.ndarray:
        return np.ascontiguousarray(self.world_to_camera[:3, 3])

    @cached_property
    def camera_center(self) -> np.ndarray:
        """Camera origin in world coordinates."""
        return -(self.rotation.T @ self.translation)


@dataclass(frozen=True)
class VisibilityParams:
    """Depth-match tolerances for the visibility test."""

    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = 0.0

    def __post_init__(self):
        if self.rel_tol < 0 or self.abs_tol < 0:
            raise ValueError("tolerances must be >= 0")

    @classmethod
    def for_cloud(cls, pc: PointCloud, rel_tol: float = DEFAULT_REL_TOL,
                  abs_tol_scale: float = DEFAULT_ABS_TOL_SCALE) -> "VisibilityParams":
        """Default tolerances: abs_tol scales with the cloud's bbox diagonal."""
        return cls(rel_tol=rel_tol, abs_tol=abs_tol_scale * pc.bbox_diagonal)


class PixelCoord(NamedTuple):
    u: float
    v: float
    z_cam: float


def project(p, cam: CameraView) -> PixelCoord:
    """Project one world-space point through the camera.

    Raises BehindCameraError when the point has non-positive camera depth;
    (u, v) are not clamped to the image.
    """
    x, y, z = (float(p[0]), float(p[1]), float(p[2]))
    r = cam.rotation
    t = cam.translation
    xc = r[0, 0] * x + r[0, 1] * y + r[0, 2] * z + t[0]
    yc = r[1, 0] * x + r[1, 1] * y + r[1, 2] * z + t[1]
    zc = r[2, 0] * x + r[2, 1] * y + r[2, 2] * z + t[2]
    if zc <= 0.0:
        raise BehindCameraError(f"point has camera depth {zc}")
    u = cam.fx * (xc / zc) + cam.cx
    v = cam.fy * (yc / zc) + cam.cy
    return PixelCoord(float(u), float(v), float(zc))


def project_many(positions: np.ndarray, cam: CameraView):
    """Vectorized projection; returns (u, v, z_cam) without behind-camera
    checks. u/v are unusable where z_cam <= 0."""
    pos = np.ascontiguousarray(np.asarray(positions, dtype=np.float64))
    return _kernels.project_points(pos, cam.rotation, cam.translation,
                                   cam.fx, cam.fy, cam.cx, cam.cy)


def backproject(u: float, v: float, d: float, cam: CameraView) -> np.ndarray:
    """Lift a pixel + depth back to a world-space point (inverse of project)."""
    if not d > 0.0:
        raise NonPositiveDepthError(f"depth must be > 0, got {d}")
    xc = (u - cam.cx) / cam.fx * d
    yc = (v - cam.cy) / cam.fy * d
    p_cam = np.array([xc, yc, d], dtype=np.float64)
    return cam.rotation.T @ (p_cam - cam.translation)


def visible(pc: PointCloud, cam: CameraView, vp: VisibilityParams) -> np.ndarray:
    """Per-point depth-buffer visibility test.

    A point is visible iff it projects in front of the camera, inside the
    image (borders inclusive), onto a defined depth sample d* (finite, > 0)
    with |z_cam - d*| <= rel_tol * d* + abs_tol. The depth map is sampled at
    the nearest pixel, not interpolated, to avoid silhouette-edge bleeding.
    """
    return _kernels.visible_mask(pc.positions, cam.rotation, cam.translation,
                                 cam.fx, cam.fy, cam.cx, cam.cy,
                                 cam.depth, vp.rel_tol, vp.abs_tol)


def sample_bilinear(map_values: np.ndarray, u: float, v: float) -> float:
    """Bilinearly interpolate an H x W map at (u, v).

    Exact texel value at integer coordinates; raises OutOfRangeError outside
    [0, W-1] x [0, H-1].
    """
    m = np.asarray(map_values)
    h, w = m.shape
    if not (0.0 <= u <= w - 1.0 and 0.0 <= v <= h - 1.0):
        raise OutOfRangeError(f"({u}, {v}) outside [0, {w - 1}] x [0, {h - 1}]")
    x0 = math.floor(u)
    y0 = math.floor(v)
    fu = u - x0
    fv = v - y0
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    m00 = float(m[y0, x0])
    m01 = float(m[y0, x1])
    m10 = float(m[y1, x0])
    m11 = float(m[y1, x1])
    top = m00 + fu * (m01 - m00)
    bot = m10 + fu * (m11 - m10)
    return top + fv * (bot - top)
