"""Partial-view variants: the points visible from one camera, downsampled by
deterministic farthest point sampling, with annotations restricted (never
recomputed) to the selected indices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyInputError, NoVisiblePointsError
from .geometry import CameraView, PointCloud, VisibilityParams, visible
from .lift import Heatmap3D

DEFAULT_PARTIAL_K = 2048


@dataclass(frozen=True)
class PartialRecord:
    """FPS-subsampled visible subset of one object from one view."""

    object_id: str
    source_view: int
    indices: np.ndarray
    under_sampled: bool

    def __post_init__(self):
        idx = np.ascontiguousarray(np.asarray(self.indices, dtype=np.int64))
        if idx.ndim != 1 or idx.shape[0] < 1:
            raise ValueError("indices must be a non-empty vector")
        if len(np.unique(idx)) != idx.shape[0]:
            raise ValueError("indices must be unique")
        object.__setattr__(self, "indices", idx)


def visible_subset(pc: PointCloud, cam: CameraView, vp: VisibilityParams) -> np.ndarray:
    """Indices of the points visible from cam, ascending."""
    return np.nonzero(visible(pc, cam, vp))[0].astype(np.int64)


def farthest_point_sample(points: np.ndarray, k: int) -> np.ndarray:
    """Greedy farthest point sampling, fully deterministic.

    The seed point is the one farthest from the centroid (ties to the lowest
    index); every later pick maximizes the squared Euclidean min-distance to
    the already-selected set, again breaking ties toward the lowest index.
    Returns min(k, M) indices in selection order.
    """
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must be (M, 3), got {pts.shape}")
    if pts.shape[0] == 0:
        raise EmptyInputError("farthest point sampling needs at least one point")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    centroid = pts.mean(axis=0)
    d = pts - centroid
    start = int(np.argmax(d[:, 0] ** 2 + d[:, 1] ** 2 + d[:, 2] ** 2))
    return _kernels.fps_select(pts, min(k, pts.shape[0]), start)


def make_partial(pc: PointCloud, cam: CameraView, vp: VisibilityParams,
                 k: int = DEFAULT_PARTIAL_K) -> PartialRecord:
    """Build the partial record for one (object, view) pair.

    When fewer than k points are visible, all of them are kept (ascending)
    and the record is flagged under_sampled instead of erroring or padding.
    """
    vis_idx = visible_subset(pc, cam, vp)
    if vis_idx.shape[0] == 0:
        raise NoVisiblePointsError(
            f"object {pc.object_id}: no points visible from view {cam.view_id}"
        )
    if vis_idx.shape[0] < k:
        return PartialRecord(object_id=pc.object_id, source_view=cam.view_id,
                             indices=vis_idx, under_sampled=True)
    local = farthest_point_sample(pc.positions[vis_idx], k)
    return PartialRecord(object_id=pc.object_id, source_view=cam.view_id,
                         indices=vis_idx[local], under_sampled=False)


def restrict_heatmap(h: Heatmap3D, rec: PartialRecord) -> Heatmap3D:
    """Restrict a full-shape heatmap to a partial record's points, preserving
    the original values and support exactly."""
    return Heatmap3D(object_id=h.object_id, query_id=h.query_id,
                     values=h.values[rec.indices], support=h.support[rec.indices])
