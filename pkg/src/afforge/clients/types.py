"""Typed payloads exchanged with the three model services."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AffordanceQuery:
    """One natural-language interaction query for an object."""

    query_id: str
    object_id: str
    text: str
    affordance_phrase: str
    object_class: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("query text must be non-empty")
        if not self.affordance_phrase:
            raise ValueError("affordance_phrase must be non-empty")
        if not self.object_class:
            raise ValueError("object_class must be non-empty")


@dataclass(frozen=True)
class InteractionPoint:
    """A predicted contact pixel for a query in one view."""

    view_id: int
    u: float
    v: float
    confidence: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class MaskLogits:
    """Pre-sigmoid segmentation scores for one view."""

    view_id: int
    logits: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.logits, dtype=np.float32))
        if arr.ndim != 2:
            raise ValueError(f"logits must be H x W, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("logits must be finite")
        object.__setattr__(self, "logits", arr)
