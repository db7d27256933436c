"""Throughput benchmark for the geometry and assignment hot paths.

Workloads are generated from a seed, streamed in fixed-size batches to
keep memory flat, and timed around the computation only.  The IoU
checksum is the plain sequential sum of every IoU value, so two runs
with the same seed must agree to the last bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..assignment import MatchingConfig, assign
from ..geometry import OrientedBox, rotated_iou

IOU_BATCH = 10_000

ASSIGN_ANCHORS = 100
ASSIGN_GTS = 3


@dataclass(frozen=True)
class BenchReport:
    """Timings and determinism checksums of one benchmark run."""

    schema_version: int
    seed: int
    n_pairs: int
    iou_batch: int
    iou_seconds: float
    iou_pairs_per_second: float
    iou_checksum: float
    assign_scenes: int
    assign_anchors: int
    assign_gts: int
    assign_seconds: float
    assign_scenes_per_second: float
    assign_positive_total: int


def _random_boxes(rng, n):
    xs = rng.uniform(0.0, 100.0, n)
    ys = rng.uniform(0.0, 100.0, n)
    ws = rng.uniform(2.0, 40.0, n)
    hs = rng.uniform(2.0, 40.0, n)
    ts = rng.uniform(-math.pi / 2, math.pi / 2, n)
    return [
        OrientedBox(float(xs[i]), float(ys[i]), float(ws[i]), float(hs[i]), float(ts[i]))
        for i in range(n)
    ]


def run_benchmark(n_pairs: int, seed: int, assign_scenes: int | None = None) -> BenchReport:
    """Time rotated_iou over n_pairs random pairs plus a few assign scenes.

    assign_scenes defaults to n_pairs / 20000, capped at 50, so small runs
    stay small.  n_pairs == 0 skips the IoU stage entirely.
    """
    if n_pairs < 0:
        raise ValueError(f"n_pairs must be >= 0, got {n_pairs}")
    rng = np.random.default_rng(seed)
    checksum = 0.0
    iou_seconds = 0.0
    done = 0
    while done < n_pairs:
        batch = min(IOU_BATCH, n_pairs - done)
        a = _random_boxes(rng, batch)
        b = _random_boxes(rng, batch)
        start = time.perf_counter()
        for pa, pb in zip(a, b):
            checksum += rotated_iou(pa, pb)
        iou_seconds += time.perf_counter() - start
        done += batch

    if assign_scenes is None:
        assign_scenes = min(50, n_pairs // 20_000)
    config = MatchingConfig()
    assign_seconds = 0.0
    positive_total = 0
    for _ in range(assign_scenes):
        anchors = _random_boxes(rng, ASSIGN_ANCHORS)
        jitter = rng.normal(0.0, 2.0, (ASSIGN_ANCHORS, 2))
        preds = [
            OrientedBox(a.x + float(jitter[i][0]), a.y + float(jitter[i][1]),
                        a.w, a.h, a.angle)
            for i, a in enumerate(anchors)
        ]
        gts = _random_boxes(rng, ASSIGN_GTS)
        start = time.perf_counter()
        result = assign(anchors, preds, gts, config, t=1.0)
        assign_seconds += time.perf_counter() - start
        positive_total += len(result.positives)

    return BenchReport(
        schema_version=1,
        seed=seed,
        n_pairs=n_pairs,
        iou_batch=IOU_BATCH,
        iou_seconds=iou_seconds,
        iou_pairs_per_second=n_pairs / iou_seconds if iou_seconds > 0 else 0.0,
        iou_checksum=checksum,
        assign_scenes=assign_scenes,
        assign_anchors=ASSIGN_ANCHORS,
        assign_gts=ASSIGN_GTS,
        assign_seconds=assign_seconds,
        assign_scenes_per_second=(
            assign_scenes / assign_seconds if assign_seconds > 0 else 0.0
        ),
        assign_positive_total=positive_total,
    )
