"""Client contracts for the three model services and the shared
post-processing every implementation must apply."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from .types import AffordanceQuery, InteractionPoint, MaskLogits

QUERIES_PER_OBJECT = 5
DEFAULT_MAX_POINTS = 3


class QueryClient(Protocol):
    def generate_queries(self, images: Sequence[bytes],
                         cfg: Mapping) -> list[AffordanceQuery]:
        """Exactly QUERIES_PER_OBJECT queries for the object shown in the
        images (engine passes 5 ring views)."""
        ...


class PointClient(Protocol):
    def point_at(self, image: bytes, query: AffordanceQuery, view_id: int,
                 width: int, height: int) -> list[InteractionPoint]:
        """0..max_points interaction points, confidence-sorted, in-bounds.
        An empty list means the region is not visible in this view."""
        ...


class SegmentClient(Protocol):
    def segment_at(self, image: bytes, points: Sequence[InteractionPoint],
                   view_id: int) -> MaskLogits:
        """Mask logits for the union of regions prompted by the points."""
        ...


@dataclass(frozen=True)
class ClientBundle:
    query: QueryClient
    point: PointClient
    segment: SegmentClient


def filter_points(raw_points, view_id: int, width: int, height: int,
                  max_points: int) -> list[InteractionPoint]:
    """Contract post-processing for pointing outputs: drop out-of-bounds
    coordinates (borders inclusive), sort by confidence descending (stable),
    keep at most max_points."""
    kept = []
    for u, v, conf in raw_points:
        if 0.0 <= u <= width - 1.0 and 0.0 <= v <= height - 1.0:
            kept.append((float(u), float(v), float(conf)))
    kept.sort(key=lambda p: -p[2])
    return [InteractionPoint(view_id=view_id, u=u, v=v, confidence=c)
            for u, v, c in kept[:max_points]]


def build_queries(object_id: str, object_class: str, pairs) -> list[AffordanceQuery]:
    """Assemble typed queries from (text, affordance_phrase) pairs, assigning
    stable per-object query ids."""
    return [AffordanceQuery(query_id=f"q{i}", object_id=object_id, text=text,
                            affordance_phrase=phrase, object_class=object_class)
            for i, (text, phrase) in enumerate(pairs)]
