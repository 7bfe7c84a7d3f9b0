"""Kernel backend selection.

Two interchangeable backends implement the hot loops: a Cython extension
(``_core``) and a pure-numpy fallback (``numpy_backend``). They are kept in
bit-for-bit agreement, so which one runs is purely a speed question.

Selection order:
  1. AFFORGE_KERNELS=numpy    -> force the pure-numpy backend
  2. AFFORGE_KERNELS=compiled -> require the extension, raise if missing
  3. unset / auto             -> compiled if importable, else numpy
"""

from __future__ import annotations

import os

ACCUM_ADD = 0
ACCUM_MAX = 1


def _load_backend():
    choice = os.environ.get("AFFORGE_KERNELS", "auto").lower()
    if choice not in ("auto", "compiled", "numpy"):
        raise ValueError(
            f"AFFORGE_KERNELS must be one of auto|compiled|numpy, got {choice!r}"
        )
    if choice == "numpy":
        from . import numpy_backend
        return numpy_backend, "numpy"
    try:
        from . import _core
        return _core, "compiled"
    except ImportError:
        if choice == "compiled":
            raise
        from . import numpy_backend
        return numpy_backend, "numpy"


_backend, BACKEND_NAME = _load_backend()

project_points = _backend.project_points
sample_bilinear_many = _backend.sample_bilinear_many
visible_mask = _backend.visible_mask
accumulate_view = _backend.accumulate_view
fps_select = _backend.fps_select
splat_max = _backend.splat_max


def backend_name() -> str:
    """Name of the backend actually in use ('compiled' or 'numpy')."""
    return BACKEND_NAME
