"""Synthetic test objects with analytically known affordance regions.

Three shapes ship as the GPU-free end-to-end fixture: a cube with one marked
face, a sphere with a polar cap, and a cylinder with a side stripe. Points
are sampled exactly on the analytic surfaces, views are ray-traced against
the same surfaces, and the marked region is painted into the renders with a
distinctive color so the mock model services can recover it from pixels
alone. That keeps every stage honest: ground truth exists both as a per-point
predicate and as per-view pixels, and the two always agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import VIEW_RING_SIZE, CameraView, PointCloud

SHAPE_KINDS = ("cube", "sphere", "cylinder")

CUBE_HALF = 0.5
SPHERE_RADIUS = 0.5
SPHERE_CAP_DEG = 40.0
CYL_RADIUS = 0.35
CYL_HALF_HEIGHT = 0.5
CYL_STRIPE_DEG = 25.0

RING_RADIUS = 2.0
RING_ELEVATION_DEG = 20.0
FOCAL_SCALE = 1.1  # fx = fy = FOCAL_SCALE * width

BODY_COLOR = (140, 140, 140)
REGION_COLOR = (220, 60, 60)

# marker recovery rule used by the mock services
MARKER_R_MIN = 200
MARKER_G_MAX = 100

_SURFACE_EPS = 1e-9


def marker_mask_from_rgba(rgba: np.ndarray) -> np.ndarray:
    """Recover the painted GT region from render pixels."""
    return ((rgba[:, :, 0] >= MARKER_R_MIN)
            & (rgba[:, :, 1] <= MARKER_G_MAX)
            & (rgba[:, :, 3] > 0))


def sample_surface_points(kind: str, n: int, seed: int) -> np.ndarray:
    """n points uniform on the shape's surface (area-weighted)."""
    rng = np.random.default_rng(seed)
    if kind == "cube":
        face = rng.integers(0, 6, size=n)
        ab = rng.uniform(-CUBE_HALF, CUBE_HALF, size=(n, 2))
        pos = np.empty((n, 3), dtype=np.float64)
        axis = face // 2
        sign = np.where(face % 2 == 0, CUBE_HALF, -CUBE_HALF)
        for a in range(3):
            m = axis == a
            others = [i for i in range(3) if i != a]
            pos[m, a] = sign[m]
            pos[m, others[0]] = ab[m, 0]
            pos[m, others[1]] = ab[m, 1]
        return pos
    if kind == "sphere":
        v = rng.normal(size=(n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return SPHERE_RADIUS * v
    if kind == "cylinder":
        lat_area = 2.0 * math.pi * CYL_RADIUS * (2.0 * CYL_HALF_HEIGHT)
        cap_area = math.pi * CYL_RADIUS ** 2
        p_lat = lat_area / (lat_area + 2.0 * cap_area)
        pos = np.empty((n, 3), dtype=np.float64)
        pick = rng.random(n)
        phi = rng.uniform(-math.pi, math.pi, size=n)
        lat = pick < p_lat
        pos[lat, 0] = CYL_RADIUS * np.cos(phi[lat])
        pos[lat, 1] = CYL_RADIUS * np.sin(phi[lat])
        pos[lat, 2] = rng.uniform(-CYL_HALF_HEIGHT, CYL_HALF_HEIGHT, size=int(lat.sum()))
        cap = ~lat
        rho = CYL_RADIUS * np.sqrt(rng.random(int(cap.sum())))
        pos[cap, 0] = rho * np.cos(phi[cap])
        pos[cap, 1] = rho * np.sin(phi[cap])
        pos[cap, 2] = np.where(rng.random(int(cap.sum())) < 0.5,
                               CYL_HALF_HEIGHT, -CYL_HALF_HEIGHT)
        return pos
    raise ValueError(f"unknown shape kind {kind!r}")


def region_mask_points(kind: str, positions: np.ndarray) -> np.ndarray:
    """Analytic GT region membership for surface points."""
    p = np.asarray(positions, dtype=np.float64)
    if kind == "cube":
        return np.abs(p[:, 0] - CUBE_HALF) < _SURFACE_EPS
    if kind == "sphere":
        return p[:, 2] >= SPHERE_RADIUS * math.cos(math.radians(SPHERE_CAP_DEG))
    if kind == "cylinder":
        on_lateral = np.abs(np.hypot(p[:, 0], p[:, 1]) - CYL_RADIUS) < _SURFACE_EPS
        in_stripe = np.abs(np.arctan2(p[:, 1], p[:, 0])) <= math.radians(CYL_STRIPE_DEG)
        return on_lateral & in_stripe
    raise ValueError(f"unknown shape kind {kind!r}")


def _intersect_cube(origin, dirs):
    half = CUBE_HALF
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / dirs
    t1 = (-half - origin) * inv
    t2 = (half - origin) * inv
    # degenerate axes (dir component 0): outside slab = miss
    par = dirs == 0.0
    inside = (np.abs(origin) <= half) | ~par
    t_lo = np.where(par, -np.inf, np.minimum(t1, t2))
    t_hi = np.where(par, np.inf, np.maximum(t1, t2))
    t_near = t_lo.max(axis=1)
    t_far = t_hi.min(axis=1)
    hit = (t_near <= t_far) & (t_near > 0.0) & inside.all(axis=1)
    t = np.where(hit, t_near, 0.0)
    point = origin + t[:, None] * dirs
    # entry face = axis whose coordinate sits on +-half
    axis = np.argmin(np.abs(np.abs(point) - half), axis=1)
    face_sign = np.take_along_axis(point, axis[:, None], axis=1)[:, 0] > 0
    region = hit & (axis == 0) & face_sign
    return t, hit, region


def _intersect_sphere(origin, dirs):
    a = (dirs * dirs).sum(axis=1)
    b = 2.0 * (origin * dirs).sum(axis=1)
    c = (origin * origin).sum() - SPHERE_RADIUS ** 2
    disc = b * b - 4.0 * a * c
    ok = disc >= 0.0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t = (-b - sq) / (2.0 * a)
    hit = ok & (t > 0.0)
    t = np.where(hit, t, 0.0)
    point = origin + t[:, None] * dirs
    z_thresh = SPHERE_RADIUS * math.cos(math.radians(SPHERE_CAP_DEG))
    region = hit & (point[:, 2] >= z_thresh)
    return t, hit, region


def _intersect_cylinder(origin, dirs):
    ox, oy, oz = origin
    dx, dy, dz = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    a = dx * dx + dy * dy
    b = 2.0 * (ox * dx + oy * dy)
    c = ox * ox + oy * oy - CYL_RADIUS ** 2
    disc = b * b - 4.0 * a * c
    lat_ok = (disc >= 0.0) & (a > 0.0)
    sq = np.sqrt(np.where(lat_ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_lat = np.where(lat_ok, (-b - sq) / (2.0 * a), np.inf)
    z_at = oz + t_lat * dz
    lat_valid = lat_ok & (t_lat > 0.0) & (np.abs(z_at) <= CYL_HALF_HEIGHT)
    t_lat = np.where(lat_valid, t_lat, np.inf)

    with np.errstate(divide="ignore", invalid="ignore"):
        t_top = (CYL_HALF_HEIGHT - oz) / dz
        t_bot = (-CYL_HALF_HEIGHT - oz) / dz
    caps = []
    for t_cap in (t_top, t_bot):
        x = ox + t_cap * dx
        y = oy + t_cap * dy
        valid = (dz != 0.0) & (t_cap > 0.0) & (x * x + y * y <= CYL_RADIUS ** 2)
        caps.append(np.where(valid, t_cap, np.inf))
    t = np.minimum(t_lat, np.minimum(caps[0], caps[1]))
    hit = np.isfinite(t)
    is_lateral = hit & (t == t_lat)
    t = np.where(hit, t, 0.0)
    point = origin + t[:, None] * dirs
    in_stripe = np.abs(np.arctan2(point[:, 1], point[:, 0])) <= math.radians(CYL_STRIPE_DEG)
    region = is_lateral & in_stripe
    return t, hit, region


_INTERSECTORS = {
    "cube": _intersect_cube,
    "sphere": _intersect_sphere,
    "cylinder": _intersect_cylinder,
}


def ring_camera_poses(n_views: int = VIEW_RING_SIZE,
                      radius: float = RING_RADIUS,
                      elevation_deg: float = RING_ELEVATION_DEG):
    """Equal-azimuth ring of look-at-origin camera poses, fixed elevation.

    Returns a list of (position, world_to_camera) with x-right / y-down /
    z-forward camera axes.
    """
    el = math.radians(elevation_deg)
    up = np.array([0.0, 0.0, 1.0])
    poses = []
    for k in range(n_views):
        az = 2.0 * math.pi * k / n_views
        center = radius * np.array([math.cos(el) * math.cos(az),
                                    math.cos(el) * math.sin(az),
                                    math.sin(el)])
        z_c = -center / np.linalg.norm(center)
        x_c = np.cross(z_c, up)
        x_c = x_c / np.linalg.norm(x_c)
        y_c = np.cross(z_c, x_c)
        rot = np.stack([x_c, y_c, z_c])
        trans = -rot @ center
        w2c = np.eye(4)
        w2c[:3, :3] = rot
        w2c[:3, 3] = trans
        poses.append((center, w2c))
    return poses


def _pixel_rays(width: int, height: int, fx: float, fy: float,
                cx: float, cy: float, w2c: np.ndarray):
    """World-space ray directions through every pixel center, scaled so the
    ray parameter equals camera-frame depth."""
    us, vs = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    d_cam = np.stack([(us - cx) / fx, (vs - cy) / fy, np.ones_like(us)], axis=-1)
    rot = w2c[:3, :3]
    return d_cam.reshape(-1, 3) @ rot  # R^T applied row-wise


@dataclass(frozen=True)
class SyntheticView:
    """One ray-traced view: depth, RGBA render, GT region pixels."""

    view_id: int
    intrinsics: np.ndarray
    world_to_camera: np.ndarray
    depth: np.ndarray
    rgba: np.ndarray
    region_pixels: np.ndarray


def render_views(kind: str, image_size: int = 192,
                 n_views: int = VIEW_RING_SIZE) -> list[SyntheticView]:
    """Ray-trace the 25-view azimuth ring for one shape."""
    intersect = _INTERSECTORS[kind]
    w = h = image_size
    fx = fy = FOCAL_SCALE * image_size
    cx = cy = (image_size - 1) / 2.0
    intr = np.array([[fx, 0.0, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])
    views = []
    for view_id, (center, w2c) in enumerate(ring_camera_poses(n_views)):
        dirs = _pixel_rays(w, h, fx, fy, cx, cy, w2c)
        t, hit, region = intersect(center, dirs)
        depth = np.where(hit, t, 0.0).reshape(h, w).astype(np.float32)
        rgba = np.zeros((h, w, 4), dtype=np.uint8)
        hit2 = hit.reshape(h, w)
        region2 = region.reshape(h, w)
        body = hit2 & ~region2
        rgba[body] = (*BODY_COLOR, 255)
        rgba[region2] = (*REGION_COLOR, 255)
        views.append(SyntheticView(view_id=view_id, intrinsics=intr,
                                   world_to_camera=w2c, depth=depth,
                                   rgba=rgba, region_pixels=region2))
    return views


def make_point_cloud(kind: str, n_points: int = 16384, seed: int = 0) -> PointCloud:
    return PointCloud(object_id=kind,
                      positions=sample_surface_points(kind, n_points, seed))


def make_camera_view(view: SyntheticView, image_ref: str | None = None) -> CameraView:
    h, w = view.depth.shape
    return CameraView(view_id=view.view_id, intrinsics=view.intrinsics,
                      world_to_camera=view.world_to_camera, width=w, height=h,
                      depth=view.depth, image_ref=image_ref)


def make_backgrounds(size: int = 256) -> list[np.ndarray]:
    """Two deterministic gradient backgrounds for composite exports."""
    g = np.linspace(40, 215, size, dtype=np.float64)
    horiz = np.zeros((size, size, 3), dtype=np.uint8)
    horiz[:, :, 0] = np.rint(g)[None, :]
    horiz[:, :, 1] = 90
    horiz[:, :, 2] = np.rint(g[::-1])[None, :]
    vert = np.zeros((size, size, 3), dtype=np.uint8)
    vert[:, :, 0] = 60
    vert[:, :, 1] = np.rint(g)[:, None]
    vert[:, :, 2] = 130
    return [horiz, vert]
