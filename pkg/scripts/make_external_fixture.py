#!/usr/bin/env python3
"""Generate a small sample in the released-dataset layout.

Each object directory holds points.npy (N x 3 float64), queries.json
(list of {text, affordance}) and heatmaps.npy (Q x N float32 in [0, 1]).
Heatmaps are radial bumps around anchor points so coverage and diversity
land away from the degenerate 0/1 ends.

Values come from a counter-mode sha256 stream, so the sample is identical
across platforms and numpy versions. Regenerating with the same tag must
reproduce the committed fixture byte for byte.
"""

import argparse
import hashlib
import json
import os

import numpy as np

AFFORDANCES = ("grasp", "push", "lift", "open", "press", "pour", "hang")


def unit_stream(tag: str):
    counter = 0
    while True:
        digest = hashlib.sha256(f"{tag}:{counter}".encode()).digest()
        for i in range(0, 32, 4):
            yield int.from_bytes(digest[i:i + 4], "little") / 2.0 ** 32
        counter += 1


def build_object(tag: str, zero_query: int | None):
    s = unit_stream(tag)
    n_points = 80 + int(next(s) * 81)        # 80..160
    n_queries = 2 + int(next(s) * 3)         # 2..4
    pts = np.array([[next(s) - 0.5 for _ in range(3)]
                    for _ in range(n_points)])
    heats = np.zeros((n_queries, n_points), dtype=np.float32)
    queries = []
    for qi in range(n_queries):
        verb = AFFORDANCES[int(next(s) * len(AFFORDANCES))]
        queries.append({"text": f"{verb} the object", "affordance": verb})
        anchor = pts[int(next(s) * n_points)]
        sigma = 0.15 + 0.3 * next(s)
        if qi == zero_query:
            continue
        d2 = ((pts - anchor) ** 2).sum(axis=1)
        heats[qi] = np.exp(-d2 / (2.0 * sigma * sigma)).astype(np.float32)
    assert float(heats.max()) <= 1.0 and float(heats.min()) >= 0.0
    return pts, queries, heats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/data/external_sample")
    ap.add_argument("--objects", type=int, default=20)
    ap.add_argument("--tag", default="external-v1")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for i in range(args.objects):
        object_id = f"ext_{i:02d}"
        # one object carries an all-zero annotation to exercise the
        # zero-mass skip rules downstream
        zero_query = 1 if i == 7 else None
        pts, queries, heats = build_object(f"{args.tag}:{object_id}",
                                           zero_query)
        obj_dir = os.path.join(args.out, object_id)
        os.makedirs(obj_dir, exist_ok=True)
        np.save(os.path.join(obj_dir, "points.npy"), pts)
        np.save(os.path.join(obj_dir, "heatmaps.npy"), heats)
        with open(os.path.join(obj_dir, "queries.json"), "w",
                  encoding="utf-8") as f:
            json.dump(queries, f, indent=2)
            f.write("\n")
        print(f"{object_id}: {pts.shape[0]} points, {heats.shape[0]} queries")


if __name__ == "__main__":
    main()
