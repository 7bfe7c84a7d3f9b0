"""Pipeline configuration: TOML file over package defaults.

Unknown sections or keys raise immediately; silent typos in tolerance or
threshold names would otherwise change results without a trace.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .clients.mock import DEFAULT_LOGIT_OFFSET, DEFAULT_LOGIT_SLOPE
from .geometry import DEFAULT_ABS_TOL_SCALE, DEFAULT_REL_TOL
from .lift import COMBINERS, DEFAULT_COMBINER
from .metrics import (COVERAGE_TAU, EPSILON, GT_BINARIZE_THRESHOLD,
                      NSS_FIXATION_RATIO)
from .partial import DEFAULT_PARTIAL_K
from .reproject import DEFAULT_RADIUS_PX


@dataclass(frozen=True)
class EngineConfig:
    # geometry
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol_scale: float = DEFAULT_ABS_TOL_SCALE
    # fusion
    combiner: str = DEFAULT_COMBINER
    # clients
    max_points: int = 3
    timeout_s: float = 30.0
    backoff_s: float = 0.5
    bearer_token: str = ""
    mock_logit_slope: float = DEFAULT_LOGIT_SLOPE
    mock_logit_offset: float = DEFAULT_LOGIT_OFFSET
    # services (env vars override when set)
    query_url: str = ""
    point_url: str = ""
    segment_url: str = ""
    # render
    radius_px: float = DEFAULT_RADIUS_PX
    # partial
    partial_k: int = DEFAULT_PARTIAL_K
    # metrics
    binarize_threshold: float = GT_BINARIZE_THRESHOLD
    coverage_tau: float = COVERAGE_TAU
    epsilon: float = EPSILON
    nss_fixation_ratio: float = NSS_FIXATION_RATIO
    # engine
    seed: int = 0
    workers: int = 4

    def __post_init__(self):
        if self.combiner not in COMBINERS:
            raise ValueError(f"combiner must be one of {COMBINERS}")
        if self.rel_tol < 0 or self.abs_tol_scale < 0:
            raise ValueError("tolerances must be >= 0")
        if self.max_points < 1:
            raise ValueError("max_points must be >= 1")
        if self.partial_k < 1:
            raise ValueError("partial_k must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


_SECTIONS = {
    "geometry": ("rel_tol", "abs_tol_scale"),
    "fusion": ("combiner",),
    "clients": ("max_points", "timeout_s", "backoff_s", "bearer_token",
                "mock_logit_slope", "mock_logit_offset"),
    "services": ("query_url", "point_url", "segment_url"),
    "render": ("radius_px",),
    "partial": ("partial_k",),
    "metrics": ("binarize_threshold", "coverage_tau", "epsilon",
                "nss_fixation_ratio"),
    "engine": ("seed", "workers"),
}


def load_config(path=None, overrides: dict | None = None) -> EngineConfig:
    """Config from a TOML file (optional) plus flat keyword overrides."""
    values = {}
    if path is not None:
        with open(path, "rb") as f:
            data = tomllib.load(f)
        for section, content in data.items():
            if section not in _SECTIONS:
                raise ValueError(f"unknown config section [{section}]")
            if not isinstance(content, dict):
                raise ValueError(f"[{section}] must be a table")
            for key, val in content.items():
                if key not in _SECTIONS[section]:
                    raise ValueError(f"unknown key {key!r} in [{section}]")
                values[key] = val
    cfg = EngineConfig(**values)
    if overrides:
        known = {f.name for f in fields(EngineConfig)}
        bad = set(overrides) - known
        if bad:
            raise ValueError(f"unknown config overrides: {sorted(bad)}")
        cfg = replace(cfg, **overrides)
    return cfg
