#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the numpy fallback.

Runs every hot kernel on production-shaped inputs with both backends,
checks the outputs agree bit for bit, and reports wall time plus speedup.
The numbers justify keeping the extension; the agreement check justifies
trusting the fallback wherever the extension is unavailable.
"""

import argparse
import time

import numpy as np

from afforge._kernels import ACCUM_ADD, numpy_backend
from afforge.synthetic import make_camera_view, make_point_cloud, render_views

try:
    from afforge._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_workloads(n_points, image_size):
    cam = make_camera_view(render_views("cube", image_size=image_size)[3])
    pc = make_point_cloud("cube", n_points=n_points, seed=1)
    pos = np.ascontiguousarray(pc.positions)
    rot = np.ascontiguousarray(cam.world_to_camera[:3, :3])
    trans = np.ascontiguousarray(cam.world_to_camera[:3, 3])
    intr = (cam.fx, cam.fy, cam.cx, cam.cy)
    depth = cam.depth
    rng = np.random.default_rng(0)
    heat2d = rng.random((cam.height, cam.width)).astype(np.float32)
    heat1d = rng.random(n_points)
    u = rng.uniform(0, cam.width - 1, n_points)
    v = rng.uniform(0, cam.height - 1, n_points)
    vis_flags = (rng.random(n_points) < 0.6).astype(np.uint8)
    fps_pts = np.ascontiguousarray(pc.positions[:16384])

    def workload(backend):
        out = {}
        out["project_points"] = lambda: backend.project_points(
            pos, rot, trans, *intr)
        out["visible_mask"] = lambda: backend.visible_mask(
            pos, rot, trans, *intr, depth, 0.01, 1e-4)
        out["sample_bilinear_many"] = lambda: backend.sample_bilinear_many(
            heat2d, u, v)

        def run_accumulate():
            acc = np.zeros(n_points)
            cnt = np.zeros(n_points, dtype=np.uint32)
            backend.accumulate_view(pos, rot, trans, *intr, depth, heat2d,
                                    0.01, 1e-4, acc, cnt, ACCUM_ADD)
            return acc, cnt

        out["accumulate_view"] = run_accumulate
        out["fps_select"] = lambda: backend.fps_select(fps_pts, 2048, 0)
        out["splat_max"] = lambda: backend.splat_max(
            u, v, heat1d, vis_flags, cam.height, cam.width, 1.5)
        return out

    return workload


def as_bytes(result):
    if isinstance(result, tuple):
        return b"".join(as_bytes(r) for r in result)
    return np.ascontiguousarray(result).tobytes()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--image-size", type=int, default=192)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _core is None:
        raise SystemExit("compiled extension not importable; build it first "
                         "(pip install -e . --no-build-isolation)")

    workload = build_workloads(args.points, args.image_size)
    numpy_fns = workload(numpy_backend)
    core_fns = workload(_core)

    print(f"{args.points} points, {args.image_size}px views, "
          f"best of {args.repeats}")
    header = f"{'kernel':<22}{'numpy':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name in numpy_fns:
        assert as_bytes(numpy_fns[name]()) == as_bytes(core_fns[name]()), \
            f"{name}: backends disagree"
        t_np = best_of(numpy_fns[name], args.repeats)
        t_core = best_of(core_fns[name], args.repeats)
        print(f"{name:<22}{t_np * 1e3:>10.2f}ms{t_core * 1e3:>10.2f}ms"
              f"{t_np / t_core:>9.1f}x")


if __name__ == "__main__":
    main()
