"""Deterministic in-process substitutes for the three model services.

The mocks recover ground truth from the synthetic renders themselves (the
marked region is painted in a distinctive color), so they behave like honest
image-in / prediction-out services: pure functions of (seed, inputs), byte
stable across runs, and usable both in process and behind the wire protocol.
"""

from __future__ import annotations

import random
from typing import Mapping, Sequence

import numpy as np
from scipy import ndimage

from ..errors import MalformedResponseError
from ..synthetic import marker_mask_from_rgba
from .base import (DEFAULT_MAX_POINTS, QUERIES_PER_OBJECT, build_queries,
                   filter_points)
from .codec import decode_png_rgba
from .types import AffordanceQuery, InteractionPoint, MaskLogits

AFFORDANCE_POOLS = {
    "mug": ("hold", "lift", "drink from", "pour from", "carry"),
    "kettle": ("grab to open", "lift", "pour from", "press", "carry"),
    "cube": ("push", "press", "grip", "slide", "stack"),
    "sphere": ("roll", "grasp", "throw", "press", "spin"),
    "cylinder": ("grip", "twist", "hold", "shake", "pour from"),
}
DEFAULT_POOL = ("hold", "push", "lift", "grasp", "press")

# signed-distance logit profile of the mock segmenter
DEFAULT_LOGIT_SLOPE = 0.5   # logits per pixel of distance
DEFAULT_LOGIT_OFFSET = 0.0  # boundary dilation in pixels
MISS_LOGIT = -10.0


def mock_query_pairs(seed: int, object_hint: str):
    """(object_class, 5 x (text, phrase)) for a tagged object, seed-stable."""
    pool = AFFORDANCE_POOLS.get(object_hint, DEFAULT_POOL)
    rng = random.Random(f"{seed}:{object_hint}")
    phrases = rng.sample(pool, QUERIES_PER_OBJECT)
    pairs = [(f"Point to the part where you would {p} the {object_hint}.", p)
             for p in phrases]
    return object_hint, pairs


def mock_point_raw(rgba: np.ndarray):
    """Centroid of the visible GT marker, or nothing when it is not seen."""
    marker = marker_mask_from_rgba(rgba)
    vs, us = np.nonzero(marker)
    if us.shape[0] == 0:
        return []
    return [(float(us.mean()), float(vs.mean()), 1.0)]


def mock_segment_raw(rgba: np.ndarray, points_px,
                     slope: float = DEFAULT_LOGIT_SLOPE,
                     offset: float = DEFAULT_LOGIT_OFFSET) -> np.ndarray:
    """Signed-distance logits around the marker component nearest each
    prompt point, unioned by elementwise max."""
    marker = marker_mask_from_rgba(rgba)
    h, w = marker.shape
    if not marker.any():
        return np.full((h, w), MISS_LOGIT, dtype=np.float32)
    labels, _ = ndimage.label(marker)
    # nearest marker pixel for prompts that fall outside every component
    _, nearest = ndimage.distance_transform_edt(labels == 0, return_indices=True)
    chosen = set()
    for u, v in points_px:
        px = min(max(int(np.floor(u + 0.5)), 0), w - 1)
        py = min(max(int(np.floor(v + 0.5)), 0), h - 1)
        lab = labels[py, px]
        if lab == 0:
            lab = labels[nearest[0][py, px], nearest[1][py, px]]
        chosen.add(int(lab))
    out = np.full((h, w), -np.inf)
    for lab in sorted(chosen):
        comp = labels == lab
        signed = (ndimage.distance_transform_edt(~comp)
                  - ndimage.distance_transform_edt(comp))
        np.maximum(out, slope * (offset - signed), out)
    return out.astype(np.float32)


class MockQueryClient:
    def __init__(self, seed: int = 0):
        self.seed = seed

    def generate_queries(self, images: Sequence[bytes],
                         cfg: Mapping) -> list[AffordanceQuery]:
        if len(images) == 0:
            raise ValueError("generate_queries needs at least one view image")
        hint = str(cfg.get("object_hint", "object"))
        object_id = str(cfg.get("object_id", hint))
        cls, pairs = mock_query_pairs(self.seed, hint)
        queries = build_queries(object_id, cls, pairs)
        if len(queries) != QUERIES_PER_OBJECT:
            raise MalformedResponseError("mock produced a wrong query count")
        return queries


class MockPointClient:
    def __init__(self, seed: int = 0, max_points: int = DEFAULT_MAX_POINTS):
        self.seed = seed
        self.max_points = max_points

    def point_at(self, image: bytes, query: AffordanceQuery, view_id: int,
                 width: int, height: int) -> list[InteractionPoint]:
        rgba = decode_png_rgba(image)
        return filter_points(mock_point_raw(rgba), view_id, width, height,
                             self.max_points)


class MockSegmentClient:
    def __init__(self, seed: int = 0, slope: float = DEFAULT_LOGIT_SLOPE,
                 offset: float = DEFAULT_LOGIT_OFFSET):
        self.seed = seed
        self.slope = slope
        self.offset = offset

    def segment_at(self, image: bytes, points: Sequence[InteractionPoint],
                   view_id: int) -> MaskLogits:
        if len(points) == 0:
            raise ValueError("segment_at needs at least one prompt point")
        rgba = decode_png_rgba(image)
        logits = mock_segment_raw(rgba, [(p.u, p.v) for p in points],
                                  self.slope, self.offset)
        return MaskLogits(view_id=view_id, logits=logits)
