"""Flat-array adapters over the scalar core.

Boxes travel as contiguous row-major float64 arrays, five values per box
(x, y, w, h, angle), either shape (n, 5) or flat (5n,).  A well-shaped
float64 input is viewed, not copied; anything else gets exactly one
defensive cast.  Every kernel below loops over the corresponding scalar
core function, so batch results are bit-identical to per-pair core calls
by construction.  The layer holds no state; reentrancy is the core's.

Structural faults (wrong rank, length not divisible by five, non-finite
values, mismatched batch sizes) raise ShapeError here; per-box validity
and domain errors come from the core unchanged.
"""

from __future__ import annotations

import numpy as np

from obbmatch import (
    MatchingConfig,
    Offsets,
    OrientedBox,
    assign,
    decode,
    encode,
    rotated_iou,
)


class ShapeError(ValueError):
    """A batch array does not have the advertised layout."""


def _as_rows(arr, name: str) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 1:
        if a.size % 5:
            raise ShapeError(f"{name}: flat length {a.size} not divisible by 5")
        a = a.reshape(-1, 5)
    elif a.ndim == 2:
        if a.shape[1] != 5:
            raise ShapeError(f"{name}: expected 5 columns, got {a.shape[1]}")
    else:
        raise ShapeError(f"{name}: expected 1 or 2 dimensions, got {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ShapeError(f"{name}: non-finite values")
    return np.ascontiguousarray(a)


def _as_boxes(arr, name: str) -> list[OrientedBox]:
    return [
        OrientedBox(float(r[0]), float(r[1]), float(r[2]), float(r[3]),
                    float(r[4]))
        for r in _as_rows(arr, name)
    ]


def _as_offsets(arr, name: str) -> list[Offsets]:
    return [
        Offsets(float(r[0]), float(r[1]), float(r[2]), float(r[3]),
                float(r[4]))
        for r in _as_rows(arr, name)
    ]


def batch_iou(a, b) -> np.ndarray:
    """(n, m) IoU matrix; element (i, j) is the core IoU of a_i and b_j."""
    boxes_a = _as_boxes(a, "a")
    boxes_b = _as_boxes(b, "b")
    out = np.empty((len(boxes_a), len(boxes_b)), dtype=np.float64)
    for i, box_a in enumerate(boxes_a):
        for j, box_b in enumerate(boxes_b):
            out[i, j] = rotated_iou(box_a, box_b)
    return out


def batch_assign(anchors, predictions, gts, alpha0: float = 0.3,
                 gamma: float = 5.0, pos_threshold: float = 0.6,
                 t: float = 1.0, uncertainty_in_warmup: bool = True):
    """Scene assignment over flat arrays.

    Returns three aligned arrays: labels (int64, 1 for positives),
    matched ground-truth indices (int64), and loss weights (float64,
    0 for negatives).  anchors and predictions must have equal counts;
    an empty gts array raises the core's EmptyGroundTruth.
    """
    anchor_boxes = _as_boxes(anchors, "anchors")
    pred_boxes = _as_boxes(predictions, "predictions")
    gt_boxes = _as_boxes(gts, "gts")
    if len(anchor_boxes) != len(pred_boxes):
        raise ShapeError(
            f"{len(anchor_boxes)} anchors vs {len(pred_boxes)} predictions"
        )
    config = MatchingConfig(alpha0=alpha0, gamma=gamma,
                            pos_threshold=pos_threshold,
                            uncertainty_in_warmup=uncertainty_in_warmup)
    result = assign(anchor_boxes, pred_boxes, gt_boxes, config, t)
    labels = np.fromiter((int(v) for v in result.labels), dtype=np.int64,
                         count=result.n_anchors)
    matched = np.asarray(result.matched_gt, dtype=np.int64)
    weights = np.asarray(result.weights, dtype=np.float64)
    return labels, matched, weights


def batch_encode(targets, anchors) -> np.ndarray:
    """(n, 5) regression offsets carrying each anchor onto its target."""
    target_boxes = _as_boxes(targets, "targets")
    anchor_boxes = _as_boxes(anchors, "anchors")
    if len(target_boxes) != len(anchor_boxes):
        raise ShapeError(
            f"{len(target_boxes)} targets vs {len(anchor_boxes)} anchors"
        )
    out = np.empty((len(target_boxes), 5), dtype=np.float64)
    for i, (target, anchor) in enumerate(zip(target_boxes, anchor_boxes)):
        o = encode(target, anchor)
        out[i] = (o.tx, o.ty, o.tw, o.th, o.ttheta)
    return out


def batch_decode(offsets, anchors) -> np.ndarray:
    """(n, 5) decoded boxes, canonical form, one row per anchor."""
    offset_rows = _as_offsets(offsets, "offsets")
    anchor_boxes = _as_boxes(anchors, "anchors")
    if len(offset_rows) != len(anchor_boxes):
        raise ShapeError(
            f"{len(offset_rows)} offset rows vs {len(anchor_boxes)} anchors"
        )
    out = np.empty((len(offset_rows), 5), dtype=np.float64)
    for i, (o, anchor) in enumerate(zip(offset_rows, anchor_boxes)):
        box = decode(o, anchor)
        out[i] = (box.x, box.y, box.w, box.h, box.angle)
    return out
