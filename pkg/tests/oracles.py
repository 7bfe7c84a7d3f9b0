"""Brute-force reference implementations used only by the tests.

Deliberately written as plain Python loops over scalars (math module, no
vectorization) so they share no code path, intermediate representation, or
library call with the package implementations they check.
"""

from __future__ import annotations

import math


def aiou_oracle(pred, gt):
    pred = [float(x) for x in pred]
    gt_bin = [float(x) >= 0.5 for x in gt]
    total = 0.0
    for t in range(1, 100):
        thr = t / 100.0
        inter = 0
        union = 0
        for p, g in zip(pred, gt_bin):
            pb = p >= thr
            if pb and g:
                inter += 1
            if pb or g:
                union += 1
        total += inter / union if union > 0 else 1.0
    return total / 99.0


def auc_oracle(pred, gt):
    """Pairwise win counting; equals the midrank Mann-Whitney formula."""
    pred = [float(x) for x in pred]
    pos = [p for p, g in zip(pred, gt) if float(g) >= 0.5]
    neg = [p for p, g in zip(pred, gt) if float(g) < 0.5]
    if not pos or not neg:
        return None
    wins = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                wins += 1.0
            elif a == b:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def sim_oracle(pred, gt):
    pred = [float(x) for x in pred]
    gt = [float(x) for x in gt]
    sp = sum(pred)
    sg = sum(gt)
    if sp <= 0.0 or sg <= 0.0:
        return None
    return sum(min(p / sp, g / sg) for p, g in zip(pred, gt))


def mae_oracle(pred, gt):
    diffs = [abs(float(p) - float(g)) for p, g in zip(pred, gt)]
    return sum(diffs) / len(diffs)


def kld_oracle(pred, gt, eps=1e-12):
    pred = [float(x) for x in pred]
    gt = [float(x) for x in gt]
    sg = sum(gt)
    if sg <= 0.0:
        return None
    shifted = [p + eps for p in pred]
    sp = sum(shifted)
    total = 0.0
    for p, g in zip(shifted, gt):
        q = g / sg
        if q > 0.0:
            total += q * math.log(q / (p / sp))
    return total


def nss_oracle(pred, gt, fixation_ratio=0.5):
    pred = [float(x) for x in pred]
    gt = [float(x) for x in gt]
    gmax = max(gt)
    if gmax <= 0.0:
        return None
    fix = [g / gmax >= fixation_ratio for g in gt]
    n = len(pred)
    mean = sum(pred) / n
    var = sum((p - mean) ** 2 for p in pred) / n
    sigma = math.sqrt(var)
    if sigma == 0.0:
        return 0.0
    zs = [(p - mean) / sigma for p, f in zip(pred, fix) if f]
    return sum(zs) / len(zs)


def coverage_oracle(annotations, tau=0.5):
    n = len(annotations[0])
    covered = 0
    for i in range(n):
        best = max(float(a[i]) for a in annotations)
        if best >= tau:
            covered += 1
    return covered / n


def diversity_oracle(annotations, eps=1e-12):
    if len(annotations) < 2:
        return None
    rows = [[float(x) for x in a] for a in annotations]
    total = 0.0
    pairs = 0
    for i, a in enumerate(rows):
        sa = sum(a)
        if sa <= 0.0:
            continue
        for j, b in enumerate(rows):
            if j == i:
                continue
            smoothed = [x + eps for x in b]
            sb = sum(smoothed)
            acc = 0.0
            for x, y in zip(a, smoothed):
                q = x / sa
                if q > 0.0:
                    acc += q * math.log(q / (y / sb))
            total += acc
            pairs += 1
    if pairs == 0:
        return None
    return total / pairs


def fps_oracle(points, k, start):
    """Greedy farthest point sampling, quadratic scan per step."""
    n = len(points)
    chosen = [start]
    dmin = [None] * n
    for i in range(n):
        dmin[i] = _sqdist(points[i], points[start])
    while len(chosen) < k:
        best = 0
        best_d = -1.0
        for i in range(n):
            if dmin[i] > best_d:
                best_d = dmin[i]
                best = i
        chosen.append(best)
        for i in range(n):
            d = _sqdist(points[i], points[best])
            if d < dmin[i]:
                dmin[i] = d
    return chosen


def _sqdist(a, b):
    return sum((float(x) - float(y)) ** 2 for x, y in zip(a, b))


def fps_start_oracle(points):
    """Start index: farthest point from the centroid, lowest index on ties."""
    n = len(points)
    dims = len(points[0])
    centroid = [sum(float(p[d]) for p in points) / n for d in range(dims)]
    best = 0
    best_d = -1.0
    for i in range(n):
        d = _sqdist(points[i], centroid)
        if d > best_d:
            best_d = d
            best = i
    return best


def splat_oracle(us, vs, values, visible, height, width, radius):
    """Max-combining disc splat: every visible point writes its value to all
    integer pixels within Euclidean radius of (u, v); overlaps keep the max.
    Occlusion is the caller's problem (the visible flags)."""
    img = [[0.0] * width for _ in range(height)]
    span = int(math.ceil(radius))
    r2 = radius * radius
    for i in range(len(us)):
        if not visible[i]:
            continue
        u, v, val = float(us[i]), float(vs[i]), float(values[i])
        bu = int(math.floor(u))
        bv = int(math.floor(v))
        for dy in range(-span, span + 2):
            for dx in range(-span, span + 2):
                px = bu + dx
                py = bv + dy
                if not (0 <= px < width and 0 <= py < height):
                    continue
                du = px - u
                dv = py - v
                if du * du + dv * dv > r2:
                    continue
                if val > img[py][px]:
                    img[py][px] = val
    return img


def bilinear_oracle(heat, u, v):
    """Corner-weighted bilinear with edge clamping on the +1 neighbors."""
    h = len(heat)
    w = len(heat[0])
    x0 = int(math.floor(u))
    y0 = int(math.floor(v))
    x0 = min(max(x0, 0), w - 1)
    y0 = min(max(y0, 0), h - 1)
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    fu = u - x0
    fv = v - y0
    m00 = float(heat[y0][x0])
    m01 = float(heat[y0][x1])
    m10 = float(heat[y1][x0])
    m11 = float(heat[y1][x1])
    top = m00 * (1.0 - fu) + m01 * fu
    bot = m10 * (1.0 - fu) + m11 * fu
    return top * (1.0 - fv) + bot * fv


def project_oracle(point, rotation, translation, fx, fy, cx, cy):
    """Pinhole projection via explicit matrix rows."""
    x, y, z = (float(c) for c in point)
    xc = rotation[0][0] * x + rotation[0][1] * y + rotation[0][2] * z + translation[0]
    yc = rotation[1][0] * x + rotation[1][1] * y + rotation[1][2] * z + translation[1]
    zc = rotation[2][0] * x + rotation[2][1] * y + rotation[2][2] * z + translation[2]
    if zc <= 0.0:
        return None
    return fx * xc / zc + cx, fy * yc / zc + cy, zc
