"""Multi-view affordance annotation engine.

Lifts per-view 2D affordance evidence (interaction points + mask logits from
model services) into fused per-point 3D heatmaps, renders them back to 2D,
generates partial-view variants, scores everything with a saliency-style
metric suite, and serves a human review/refinement workflow.
"""

__version__ = "0.1.0"

from .geometry import CameraView, PointCloud, VisibilityParams  # noqa: F401
from .lift import Heatmap2D, Heatmap3D  # noqa: F401
