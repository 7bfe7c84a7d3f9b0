"""Pure-numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_core.pyx``. The two backends
must produce bit-identical outputs, so all floating-point expressions are
written with an explicit association order (no BLAS matmul, no pairwise
reductions inside a formula) and both files keep the exact same expression
shapes. If you change a formula here, change it in ``_core.pyx`` too.

Conventions shared by both backends:
  - positions: (N, 3) float64, C-contiguous
  - rot: (3, 3) float64 world-to-camera rotation, trans: (3,) float64
  - depth / heat maps: (H, W) float32
  - image bounds are inclusive: u in [0, W-1], v in [0, H-1] counts as inside
  - nearest-pixel index = floor(x + 0.5), i.e. half-up rounding
"""

from __future__ import annotations

import numpy as np

ACCUM_ADD = 0
ACCUM_MAX = 1


def project_points(positions, rot, trans, fx, fy, cx, cy):
    """Perspective-project points. Returns (u, v, z_cam) float64 arrays.

    u/v are unclamped and undefined (garbage, not NaN-safe) where z_cam <= 0;
    callers must mask on z_cam themselves.
    """
    x = positions[:, 0]
    y = positions[:, 1]
    z = positions[:, 2]
    xc = rot[0, 0] * x + rot[0, 1] * y + rot[0, 2] * z + trans[0]
    yc = rot[1, 0] * x + rot[1, 1] * y + rot[1, 2] * z + trans[1]
    zc = rot[2, 0] * x + rot[2, 1] * y + rot[2, 2] * z + trans[2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = fx * (xc / zc) + cx
        v = fy * (yc / zc) + cy
    return u, v, zc


def sample_bilinear_many(values, u, v):
    """Bilinear interpolation at (u, v); caller guarantees in-bounds coords.

    Uses the lerp form a + t*(b - a) so sampling a constant region returns
    the constant exactly and results never leave [min, max] of the four
    enclosing texels.
    """
    h, w = values.shape
    x0 = np.floor(u)
    y0 = np.floor(v)
    fu = u - x0
    fv = v - y0
    x0i = x0.astype(np.int64)
    y0i = y0.astype(np.int64)
    x1i = np.minimum(x0i + 1, w - 1)
    y1i = np.minimum(y0i + 1, h - 1)
    m00 = values[y0i, x0i].astype(np.float64)
    m01 = values[y0i, x1i].astype(np.float64)
    m10 = values[y1i, x0i].astype(np.float64)
    m11 = values[y1i, x1i].astype(np.float64)
    top = m00 + fu * (m01 - m00)
    bot = m10 + fu * (m11 - m10)
    return top + fv * (bot - top)


def visible_mask(positions, rot, trans, fx, fy, cx, cy, depth, rel_tol, abs_tol):
    """Depth-buffer visibility test; returns a bool array of length N.

    A point is visible iff it projects in front of the camera, lands inside
    the image (borders inclusive), and its camera depth matches the
    nearest-pixel depth sample within rel_tol * d + abs_tol. Depth <= 0 or
    non-finite marks empty pixels.
    """
    h, w = depth.shape
    u, v, zc = project_points(positions, rot, trans, fx, fy, cx, cy)
    front = zc > 0.0
    inside = front & (u >= 0.0) & (u <= w - 1.0) & (v >= 0.0) & (v <= h - 1.0)
    px = np.zeros(len(u), dtype=np.int64)
    py = np.zeros(len(v), dtype=np.int64)
    px[inside] = np.floor(u[inside] + 0.5).astype(np.int64)
    py[inside] = np.floor(v[inside] + 0.5).astype(np.int64)
    d = depth[py, px].astype(np.float64)
    surface = inside & np.isfinite(d) & (d > 0.0)
    match = np.zeros(len(u), dtype=bool)
    s = surface
    match[s] = np.abs(zc[s] - d[s]) <= rel_tol * d[s] + abs_tol
    return match


def accumulate_view(positions, rot, trans, fx, fy, cx, cy, depth, heat,
                    rel_tol, abs_tol, acc, cnt, mode):
    """Fold one view's heatmap into (acc, cnt), in place.

    For every point visible in this view, samples the heatmap bilinearly at
    its projection and either adds the sample to acc (ACCUM_ADD) or takes
    the running max (ACCUM_MAX). cnt counts contributing views per point.
    """
    vis = visible_mask(positions, rot, trans, fx, fy, cx, cy, depth, rel_tol, abs_tol)
    if not vis.any():
        return
    u, v, _ = project_points(positions, rot, trans, fx, fy, cx, cy)
    s = sample_bilinear_many(heat, u[vis], v[vis])
    if mode == ACCUM_ADD:
        acc[vis] += s
    else:
        acc[vis] = np.maximum(acc[vis], s)
    cnt[vis] += 1


def fps_select(positions, k, start):
    """Greedy farthest point sampling from a fixed start index.

    Each pick maximizes the squared Euclidean min-distance to the already
    selected set; ties resolve to the lowest index (argmax first-hit).
    Returns min(k, N) indices in selection order.
    """
    n = positions.shape[0]
    k = min(k, n)
    x = positions[:, 0]
    y = positions[:, 1]
    z = positions[:, 2]
    selected = np.empty(k, dtype=np.int64)
    selected[0] = start
    dx = x - x[start]
    dy = y - y[start]
    dz = z - z[start]
    dmin = dx * dx + dy * dy + dz * dz
    for t in range(1, k):
        nxt = int(np.argmax(dmin))
        selected[t] = nxt
        dx = x - x[nxt]
        dy = y - y[nxt]
        dz = z - z[nxt]
        d = dx * dx + dy * dy + dz * dz
        np.minimum(dmin, d, out=dmin)
    return selected


def splat_max(u, v, heat, visible, height, width, radius):
    """Max-combining point splat onto an (H, W) float64 canvas.

    Each visible point writes its heat value to every integer pixel within
    Euclidean distance `radius` of its projected (u, v); overlapping writes
    keep the maximum.
    """
    img = np.zeros((height, width), dtype=np.float64)
    m = visible.astype(bool)
    if not m.any():
        return img
    uu = u[m]
    vv = v[m]
    hh = heat[m]
    bx = np.floor(uu).astype(np.int64)
    by = np.floor(vv).astype(np.int64)
    span = int(np.ceil(radius))
    r2 = radius * radius
    for oy in range(-span, span + 2):
        py = by + oy
        dy = py - vv
        for ox in range(-span, span + 2):
            px = bx + ox
            dx = px - uu
            hit = (dx * dx + dy * dy <= r2) & (px >= 0) & (px < width) & (py >= 0) & (py < height)
            if hit.any():
                np.maximum.at(img, (py[hit], px[hit]), hh[hit])
    return img
