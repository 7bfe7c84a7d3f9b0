"""Render fused 3D heatmaps back to 2D, pick export viewpoints, and build
background-composited training images."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import _kernels
from .errors import MissingAlphaError
from .geometry import (VIEW_RING_SIZE, CameraView, PointCloud,
                       VisibilityParams, project_many, visible)
from .lift import Heatmap2D, Heatmap3D

# splat footprint at the reference render width; scales linearly with width
DEFAULT_RADIUS_PX = 2.0
REFERENCE_WIDTH = 512

# challenge view is drawn from these ring offsets around the best view
CHALLENGE_OFFSETS = (-2, -1, 1, 2)

RESIZE_TO = 256
CROP_TO = 224


@dataclass(frozen=True)
class ViewScore:
    """Visibility score of the affordance region from one view."""

    view_id: int
    score: float

    def __post_init__(self):
        if self.score < 0:
            raise ValueError("score must be >= 0")


@dataclass(frozen=True)
class ViewSelection:
    """Export viewpoints for a record: the most visible view plus a seeded
    neighborhood challenge view. all_zero marks degenerate score vectors."""

    best: int
    challenge: int
    all_zero: bool = False


def default_radius_px(width: int) -> float:
    """Splat radius scaled to the render width, floored at the half-pixel
    minimum so the disc always covers its center pixel."""
    return max(0.5, DEFAULT_RADIUS_PX * width / REFERENCE_WIDTH)


def render_heatmap_2d(h: Heatmap3D, pc: PointCloud, cam: CameraView,
                      vp: VisibilityParams, radius_px: float | None = None) -> Heatmap2D:
    """Splat per-point heat into the view, max-combining overlapping writes.

    Each visible point writes its value to every pixel within radius_px of
    its projection; unwritten pixels stay 0. Max combining keeps dense point
    regions from exceeding 1.
    """
    if radius_px is None:
        radius_px = default_radius_px(cam.width)
    if radius_px < 0.5:
        raise ValueError(f"radius_px must be >= 0.5, got {radius_px}")
    vis = visible(pc, cam, vp)
    u, v, _ = project_many(pc.positions, cam)
    img = _kernels.splat_max(u, v, h.values.astype(np.float64),
                             np.ascontiguousarray(vis.astype(np.uint8)),
                             cam.height, cam.width, float(radius_px))
    return Heatmap2D(view_id=cam.view_id, values=img.astype(np.float32))


def view_scores(h: Heatmap3D, pc: PointCloud, cams, vp: VisibilityParams):
    """Score each view by summing the heat of the points it can see.

    Point-sum rather than pixel-sum: deterministic, independent of render
    resolution and splat footprint.
    """
    scores = []
    for cam in sorted(cams, key=lambda c: c.view_id):
        vis = visible(pc, cam, vp)
        score = float(np.sum(h.values[vis], dtype=np.float64))
        scores.append(ViewScore(view_id=cam.view_id, score=score))
    return scores


def select_viewpoints(scores, rng_seed: int) -> ViewSelection:
    """Pick (best, challenge) export views from 25 ring scores.

    best is the argmax (ties to the lowest view_id); challenge is drawn
    seeded-uniformly from ring offsets {-2, -1, +1, +2} around best, mod 25.
    An all-zero score vector falls back to view 0 and flags the selection.
    """
    if len(scores) != VIEW_RING_SIZE:
        raise ValueError(f"expected {VIEW_RING_SIZE} scores, got {len(scores)}")
    by_id = sorted(scores, key=lambda s: s.view_id)
    if [s.view_id for s in by_id] != list(range(VIEW_RING_SIZE)):
        raise ValueError("scores must cover view ids 0..24 exactly once")
    all_zero = all(s.score == 0.0 for s in by_id)
    best = 0
    if not all_zero:
        best_score = by_id[0].score
        for s in by_id[1:]:
            if s.score > best_score:
                best_score = s.score
                best = s.view_id
    offset = random.Random(rng_seed).choice(CHALLENGE_OFFSETS)
    challenge = (best + offset) % VIEW_RING_SIZE
    return ViewSelection(best=best, challenge=challenge, all_zero=all_zero)


def _crop_flip_params(rng_seed: int):
    """Seeded geometric augmentation parameters, shared by the image and its
    paired heatmap so they stay pixel-aligned."""
    rng = random.Random(rng_seed)
    span = RESIZE_TO - CROP_TO + 1
    x0 = rng.randrange(span)
    y0 = rng.randrange(span)
    flip = rng.random() < 0.5
    return x0, y0, flip


def composite_background(render: np.ndarray, bg: np.ndarray, rng_seed: int) -> np.ndarray:
    """Alpha-composite an RGBA render onto a background, then apply the
    seeded resize/crop/flip export transform.

    Returns a CROP_TO x CROP_TO x 3 uint8 image. Use transform_paired_heatmap
    with the same seed to keep the 2D heatmap aligned.
    """
    render = np.asarray(render)
    if render.ndim != 3 or render.shape[2] != 4:
        raise MissingAlphaError(f"render must be H x W x 4, got {render.shape}")
    bg = np.asarray(bg)
    if bg.ndim != 3 or bg.shape[2] != 3:
        raise ValueError(f"background must be H x W x 3, got {bg.shape}")
    h, w = render.shape[:2]
    bg_img = Image.fromarray(bg.astype(np.uint8)).resize((w, h), Image.BILINEAR)
    bg_arr = np.asarray(bg_img, dtype=np.float64)
    alpha = render[:, :, 3:4].astype(np.float64) / 255.0
    fg = render[:, :, :3].astype(np.float64)
    comp = np.rint(fg * alpha + bg_arr * (1.0 - alpha))
    comp_img = Image.fromarray(comp.astype(np.uint8))
    comp_img = comp_img.resize((RESIZE_TO, RESIZE_TO), Image.BILINEAR)
    x0, y0, flip = _crop_flip_params(rng_seed)
    out = np.asarray(comp_img)[y0:y0 + CROP_TO, x0:x0 + CROP_TO]
    if flip:
        out = out[:, ::-1]
    return np.ascontiguousarray(out)


def transform_paired_heatmap(heat: np.ndarray, rng_seed: int) -> np.ndarray:
    """Apply the identical geometric transform as composite_background to a
    2D heatmap (float path, bilinear resize)."""
    arr = np.asarray(heat, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"heatmap must be H x W, got {arr.shape}")
    img = Image.fromarray(arr, mode="F").resize((RESIZE_TO, RESIZE_TO), Image.BILINEAR)
    x0, y0, flip = _crop_flip_params(rng_seed)
    out = np.asarray(img)[y0:y0 + CROP_TO, x0:x0 + CROP_TO]
    if flip:
        out = out[:, ::-1]
    return np.ascontiguousarray(out)
