"""Matching-degree label assignment with best-anchor compensation.

An anchor's quality for a ground truth blends how well the anchor itself
covers it (input IoU, before regression) with how well the regressed
prediction covers it (output IoU, after regression), minus a penalty for
disagreement between the two.  Early in training the regressor output is
noise, so a warm-up schedule leans fully on input IoU first and ramps the
blend toward its final setting over the first 30% of training.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyGroundTruth, EmptyPositives, InvalidConfig, LengthMismatch
from .geometry import OrientedBox, rotated_iou

# Warm-up breakpoints of the blend schedule, as fractions of training.
WARMUP_END = 0.1
RAMP_END = 0.3


@dataclass(frozen=True)
class MatchingConfig:
    """Hyperparameters of the matching-degree criterion.

    alpha0 is the final input-IoU weight, gamma the exponent on the
    uncertainty penalty, pos_threshold the positive cutoff on matching
    degree.  uncertainty_in_warmup keeps the penalty active even while the
    schedule still weights input IoU fully; turning it off makes warm-up
    selection identical to plain input-IoU matching.
    """

    alpha0: float = 0.3
    gamma: float = 5.0
    pos_threshold: float = 0.6
    total_iterations: int = 20_000
    uncertainty_in_warmup: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha0 <= 1.0:
            raise InvalidConfig(f"alpha0 must be in (0, 1], got {self.alpha0}")
        if self.gamma < 1.0:
            raise InvalidConfig(f"gamma must be >= 1, got {self.gamma}")
        if not 0.0 < self.pos_threshold < 1.0:
            raise InvalidConfig(
                f"pos_threshold must be in (0, 1), got {self.pos_threshold}"
            )
        if self.total_iterations <= 0:
            raise InvalidConfig(
                f"total_iterations must be positive, got {self.total_iterations}"
            )

    def progress(self, iteration: int) -> float:
        """Training progress in [0, 1] after `iteration` of total_iterations."""
        t = iteration / self.total_iterations
        return 0.0 if t < 0.0 else 1.0 if t > 1.0 else t


def alpha_schedule(t: float, alpha0: float) -> float:
    """Input-IoU weight at training progress t.

    Holds 1 through the first 10% of training, ramps linearly down to
    alpha0 between 10% and 30%, then stays at alpha0.  The ramp is written
    anchored at its left endpoint, 1 + 5*(alpha0 - 1)*(t - 0.1), so both
    breakpoints are exact in floating point rather than merely close.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"progress must be in [0, 1], got {t}")
    if not 0.0 < alpha0 <= 1.0:
        raise ValueError(f"alpha0 must be in (0, 1], got {alpha0}")
    if t < WARMUP_END:
        return 1.0
    if t < RAMP_END:
        return 1.0 + (alpha0 - 1.0) * (5.0 * (t - WARMUP_END))
    return alpha0


def matching_degree(sa: float, fa: float, alpha: float, gamma: float) -> float:
    """Blend of spatial alignment sa and feature alignment fa, less the
    uncertainty penalty |sa - fa| ** gamma.  Ranges over [-1, 1]."""
    if not 0.0 <= sa <= 1.0:
        raise ValueError(f"sa must be in [0, 1], got {sa}")
    if not 0.0 <= fa <= 1.0:
        raise ValueError(f"fa must be in [0, 1], got {fa}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    return alpha * sa + (1.0 - alpha) * fa - abs(sa - fa) ** gamma


@dataclass(frozen=True)
class MatchScores:
    """Alignment scores of one anchor/prediction pair against one ground truth."""

    sa: float
    fa: float
    u: float
    md: float

    @classmethod
    def compute(cls, sa, fa, alpha, gamma) -> "MatchScores":
        return cls(sa, fa, abs(sa - fa), matching_degree(sa, fa, alpha, gamma))


def blend_matrix(sa_rows, fa_rows, alpha, gamma, uncertainty_penalty=True):
    """Matching-degree matrix from precomputed sa/fa matrices.

    With uncertainty_penalty off, entries are the plain blend
    alpha*sa + (1-alpha)*fa.
    """
    if uncertainty_penalty:
        return [
            [matching_degree(s, f, alpha, gamma) for s, f in zip(srow, frow)]
            for srow, frow in zip(sa_rows, fa_rows)
        ]
    return [
        [alpha * s + (1.0 - alpha) * f for s, f in zip(srow, frow)]
        for srow, frow in zip(sa_rows, fa_rows)
    ]


def pairwise_scores(anchors, predictions, gts, alpha, gamma, uncertainty_penalty=True):
    """Anchor-major (sa, fa, md) matrices for every anchor/gt pair."""
    if len(anchors) != len(predictions):
        raise LengthMismatch(f"{len(anchors)} anchors vs {len(predictions)} predictions")
    sa = [[rotated_iou(a, g) for g in gts] for a in anchors]
    fa = [[rotated_iou(p, g) for g in gts] for p in predictions]
    return sa, fa, blend_matrix(sa, fa, alpha, gamma, uncertainty_penalty)


def select_by_metric(metric_rows, threshold):
    """Positive/negative split of anchors under any quality matrix.

    Every anchor matches its best ground truth (ties to the lower gt
    index) and is positive when that best value reaches the threshold.
    A ground truth left without any positive is compensated: it claims
    its best-scoring anchor among those not already positive, ties to
    the lower anchor index.  Compensation runs in gt order, and anchors
    claimed earlier are skipped in favor of the next-best unclaimed one.

    Returns (labels, matched) lists over anchors.
    """
    n = len(metric_rows)
    m = len(metric_rows[0]) if n else 0
    matched = []
    labels = []
    for row in metric_rows:
        best = 0
        for g in range(1, m):
            if row[g] > row[best]:
                best = g
        matched.append(best)
        labels.append(row[best] >= threshold)
    covered = [False] * m
    for i in range(n):
        if labels[i]:
            covered[matched[i]] = True
    for g in range(m):
        if covered[g]:
            continue
        order = sorted(range(n), key=lambda i: (-metric_rows[i][g], i))
        for i in order:
            if not labels[i]:
                labels[i] = True
                matched[i] = g
                break
        else:
            raise ValueError(
                f"no unclaimed anchor left to compensate ground truth {g}"
            )
    return labels, matched


def compensation_weights(md_pos: Sequence[float]) -> list[float]:
    """Loss weights for one ground truth's positives.

    The gap of the best positive to a perfect match is added to every
    positive, so the best one always weighs exactly 1 and the rest keep
    their distance to it: w_j = 1 - (max(md_pos) - md_pos_j).
    """
    if not md_pos:
        raise EmptyPositives("no positives to weight")
    top = max(md_pos)
    return [1.0 - (top - md) for md in md_pos]


@dataclass(frozen=True)
class Assignment:
    """Per-anchor labels plus per-ground-truth selection summaries.

    matched_gt is the anchor's best ground truth by matching degree, except
    for compensated anchors, which point at the ground truth that claimed
    them.  md is the matching degree against matched_gt; weight is the
    compensation-adjusted loss weight, 0.0 for negatives.
    """

    labels: tuple[bool, ...]
    matched_gt: tuple[int, ...]
    md: tuple[float, ...]
    weights: tuple[float, ...]
    gt_md_max: tuple[float, ...]
    gt_delta_md: tuple[float, ...]
    gt_n_positives: tuple[int, ...]

    @property
    def n_anchors(self) -> int:
        return len(self.labels)

    @property
    def positives(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab]


def assign(grid, predictions, gts, config: MatchingConfig, t: float) -> Assignment:
    """Label every anchor of a scene positive or negative by matching degree.

    grid may be an AnchorGrid or any sequence of anchor boxes, paired
    one-to-one with decoded predictions.  t is training progress in [0, 1]
    and drives the warm-up schedule.
    """
    anchors = getattr(grid, "anchors", grid)
    gts = list(gts)
    if not gts:
        raise EmptyGroundTruth("assignment needs at least one ground truth")
    if len(anchors) != len(predictions):
        raise LengthMismatch(
            f"{len(anchors)} anchors vs {len(predictions)} predictions"
        )
    alpha = alpha_schedule(t, config.alpha0)
    penalty = config.uncertainty_in_warmup or t >= WARMUP_END
    _, _, md = pairwise_scores(anchors, predictions, gts, alpha, config.gamma, penalty)
    labels, matched = select_by_metric(md, config.pos_threshold)

    n, m = len(anchors), len(gts)
    per_gt: list[list[int]] = [[] for _ in range(m)]
    for i in range(n):
        if labels[i]:
            per_gt[matched[i]].append(i)
    weights = [0.0] * n
    gt_md_max = [0.0] * m
    gt_delta = [0.0] * m
    for g in range(m):
        idxs = per_gt[g]
        mds = [md[i][g] for i in idxs]
        ws = compensation_weights(mds)
        for i, w in zip(idxs, ws):
            weights[i] = w
        gt_md_max[g] = max(mds)
        gt_delta[g] = 1.0 - gt_md_max[g]
    return Assignment(
        labels=tuple(labels),
        matched_gt=tuple(matched),
        md=tuple(md[i][matched[i]] for i in range(n)),
        weights=tuple(weights),
        gt_md_max=tuple(gt_md_max),
        gt_delta_md=tuple(gt_delta),
        gt_n_positives=tuple(len(per_gt[g]) for g in range(m)),
    )
