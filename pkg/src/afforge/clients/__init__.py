from .types import AffordanceQuery, InteractionPoint, MaskLogits  # noqa: F401
