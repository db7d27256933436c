"""Monte Carlo cross-check for the exact rotated IoU.

Samples uniformly over the axis-aligned bounding box of both rectangles
and estimates IoU as the fraction of union hits that also land in the
intersection.  The reported standard error is the binomial error of that
conditional fraction, which is what the exact value should sit within.
"""

from __future__ import annotations

import math

import numpy as np

from ..geometry import OrientedBox, to_polygon

MIN_SAMPLES = 10_000


def _inside(box: OrientedBox, px, py):
    c = math.cos(box.angle)
    s = math.sin(box.angle)
    dx = px - box.x
    dy = py - box.y
    lx = dx * c + dy * s
    ly = dy * c - dx * s
    return (np.abs(lx) <= 0.5 * box.w) & (np.abs(ly) <= 0.5 * box.h)


def mc_iou_oracle(a: OrientedBox, b: OrientedBox, n_samples: int, seed: int):
    """(estimate, standard_error) for the IoU of two boxes.

    Draws n_samples >= MIN_SAMPLES points over the pair's joint bounding
    box.  Pairs with no union hits (cannot happen for valid boxes) and
    pairs with no intersection hits both report an estimate of 0.0.
    """
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    corners = to_polygon(a).vertices + to_polygon(b).vertices
    xs = [p[0] for p in corners]
    ys = [p[1] for p in corners]
    rng = np.random.default_rng(seed)
    px = rng.uniform(min(xs), max(xs), n_samples)
    py = rng.uniform(min(ys), max(ys), n_samples)
    in_a = _inside(a, px, py)
    in_b = _inside(b, px, py)
    n_union = int(np.count_nonzero(in_a | in_b))
    if n_union == 0:
        return 0.0, 0.0
    n_inter = int(np.count_nonzero(in_a & in_b))
    p = n_inter / n_union
    se = math.sqrt(p * (1.0 - p) / n_union)
    return p, se
