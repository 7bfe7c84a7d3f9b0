from .api import build_review_app

__all__ = ["build_review_app"]
