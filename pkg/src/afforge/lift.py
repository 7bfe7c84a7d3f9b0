"""Lift 2D mask evidence into fused per-point 3D heatmaps.

The fusion rule is visibility-gated voting: each view votes for the points
it can actually see, sampling its 2D heatmap at the point's projection, and
votes are combined per point (arithmetic mean by default). No per-annotation
renormalization is applied afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .clients.types import MaskLogits
from .errors import DimensionMismatchError
from .geometry import CameraView, PointCloud, VisibilityParams

COMBINERS = ("mean", "max", "sum_normalized_by_25")
DEFAULT_COMBINER = "mean"

# below this many supporting views (max over points) a record is flagged
LOW_SUPPORT_VIEWS = 3

SIGMOID_SATURATION = 30.0


@dataclass(frozen=True)
class Heatmap2D:
    """Per-pixel affordance likelihood in [0, 1] for one view."""

    view_id: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        if arr.ndim != 2:
            raise ValueError(f"values must be H x W, got shape {arr.shape}")
        if not ((arr >= 0.0) & (arr <= 1.0)).all():
            raise ValueError("heatmap values must lie in [0, 1]")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class Heatmap3D:
    """Per-point affordance likelihood plus per-point view support counts."""

    object_id: str
    query_id: str
    values: np.ndarray = field(repr=False)
    support: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float32))
        sup = np.ascontiguousarray(np.asarray(self.support, dtype=np.uint32))
        if vals.ndim != 1 or sup.shape != vals.shape:
            raise ValueError("values and support must be equal-length vectors")
        if vals.shape[0] < 1:
            raise ValueError("heatmap must cover at least one point")
        if not ((vals >= 0.0) & (vals <= 1.0)).all():
            raise ValueError("heatmap values must lie in [0, 1]")
        if (vals[sup == 0] != 0.0).any():
            raise ValueError("points with zero support must have zero value")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "support", sup)

    @property
    def point_count(self) -> int:
        return self.values.shape[0]

    @property
    def low_support(self) -> bool:
        return int(self.support.max()) < LOW_SUPPORT_VIEWS


def logits_to_heatmap(m: MaskLogits) -> Heatmap2D:
    """Map raw segmentation logits through a sigmoid.

    Saturates explicitly beyond |logit| > 30 so large logits cannot overflow
    exp(); sigmoid(30) is within 1e-13 of 1, so the branch is invisible at
    float32 output precision.
    """
    logits = m.logits.astype(np.float64)
    out = np.empty_like(logits)
    lo = logits < -SIGMOID_SATURATION
    hi = logits > SIGMOID_SATURATION
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    out[mid] = 1.0 / (1.0 + np.exp(-logits[mid]))
    return Heatmap2D(view_id=m.view_id, values=out.astype(np.float32))


def fuse_views(pc: PointCloud, contributions, vp: VisibilityParams,
               combiner: str = DEFAULT_COMBINER, query_id: str = "") -> Heatmap3D:
    """Fuse per-view 2D heatmaps into one per-point 3D heatmap.

    contributions is a list of (CameraView, Heatmap2D) pairs; it may be empty
    or partial (failed cells simply do not vote). For each point i, the views
    that see it form its support set S_i; with the default mean combiner,
    values[i] is the average of the bilinear heatmap samples over S_i, or 0
    when S_i is empty. Accumulation always runs in ascending view_id order,
    so the result is independent of input ordering, bit for bit.
    """
    if combiner not in COMBINERS:
        raise ValueError(f"combiner must be one of {COMBINERS}, got {combiner!r}")
    seen = set()
    for cam, hm in contributions:
        if hm.values.shape != (cam.height, cam.width):
            raise DimensionMismatchError(
                f"view {cam.view_id}: heatmap {hm.values.shape} vs "
                f"image {cam.height}x{cam.width}"
            )
        if hm.view_id != cam.view_id:
            raise ValueError(
                f"heatmap tagged view {hm.view_id} paired with camera {cam.view_id}"
            )
        if cam.view_id in seen:
            raise ValueError(f"view {cam.view_id} contributed twice")
        seen.add(cam.view_id)

    n = pc.point_count
    acc = np.zeros(n, dtype=np.float64)
    cnt = np.zeros(n, dtype=np.uint32)
    mode = _kernels.ACCUM_MAX if combiner == "max" else _kernels.ACCUM_ADD
    for cam, hm in sorted(contributions, key=lambda pair: pair[0].view_id):
        _kernels.accumulate_view(pc.positions, cam.rotation, cam.translation,
                                 cam.fx, cam.fy, cam.cx, cam.cy,
                                 cam.depth, hm.values, vp.rel_tol, vp.abs_tol,
                                 acc, cnt, mode)

    if combiner == "mean":
        out = np.zeros(n, dtype=np.float64)
        np.divide(acc, cnt, out=out, where=cnt > 0)
    elif combiner == "max":
        out = acc
    else:
        out = acc / 25.0
    np.clip(out, 0.0, 1.0, out=out)
    return Heatmap3D(object_id=pc.object_id, query_id=query_id,
                     values=out.astype(np.float32), support=cnt)
