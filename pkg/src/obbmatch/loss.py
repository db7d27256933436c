"""Matching-sensitive classification and regression losses.

The classification loss is focal loss over all anchors plus a second
focal term over positives only, scaled by their compensation weights; the
regression loss is compensation-weighted smooth L1 over the five offset
components of each positive.  Gradients are closed-form and verified
against central differences by `grad_check` / `check_loss_gradients`.

All reductions are plain sequential sums in anchor order, so results are
independent of how callers batch the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .codec import Offsets
from .errors import LengthMismatch, NoPositives, NonDifferentiablePoint

# Probability clamp applied before any log.
SCORE_EPS = 1e-7
FOCAL_ALPHA = 0.25
FOCAL_GAMMA = 2.0

# Kinks of smooth L1: the quadratic/linear seams at +-1.
SMOOTH_L1_KINKS = (-1.0, 1.0)


def _clamp_score(p: float) -> float:
    if p < SCORE_EPS:
        return SCORE_EPS
    if p > 1.0 - SCORE_EPS:
        return 1.0 - SCORE_EPS
    return p


def focal_loss(p: float, pstar: int, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> float:
    """Focal loss of one binary score; p is clamped away from {0, 1} first."""
    p = _clamp_score(p)
    if pstar:
        return -alpha * (1.0 - p) ** gamma * math.log(p)
    return -(1.0 - alpha) * p ** gamma * math.log(1.0 - p)


def focal_loss_grad(p: float, pstar: int, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> float:
    """d focal_loss / dp, valid on the clamp interior."""
    p = _clamp_score(p)
    if pstar:
        if gamma == 0.0:
            return -alpha / p
        return alpha * gamma * (1.0 - p) ** (gamma - 1.0) * math.log(p) - alpha * (
            1.0 - p
        ) ** gamma / p
    if gamma == 0.0:
        return (1.0 - alpha) / (1.0 - p)
    return -(1.0 - alpha) * (
        gamma * p ** (gamma - 1.0) * math.log(1.0 - p) - p ** gamma / (1.0 - p)
    )


def smooth_l1(x: float) -> float:
    """Quadratic inside |x| < 1, linear outside."""
    ax = abs(x)
    if ax < 1.0:
        return 0.5 * x * x
    return ax - 0.5


def smooth_l1_grad(x: float) -> float:
    if abs(x) < 1.0:
        return x
    return math.copysign(1.0, x)


def offset_residual(pred: Offsets, target: Offsets) -> tuple[float, ...]:
    return tuple(a - b for a, b in zip(pred.as_tuple(), target.as_tuple()))


@dataclass(frozen=True)
class LossInputs:
    """One scene's worth of loss inputs.

    scores and labels run over all anchors; offsets, targets and weights
    run over the positives only, in anchor order.  num_gts distinguishes
    a legitimately empty scene (no ground truth, no positives) from a
    selection bug (ground truths present but nothing positive).
    """

    scores: tuple[float, ...]
    labels: tuple[int, ...]
    offsets: tuple[Offsets, ...]
    targets: tuple[Offsets, ...]
    weights: tuple[float, ...]
    num_gts: int

    def __post_init__(self):
        if len(self.scores) != len(self.labels):
            raise LengthMismatch(
                f"{len(self.scores)} scores vs {len(self.labels)} labels"
            )
        npos = sum(1 for lab in self.labels if lab)
        if not len(self.offsets) == len(self.targets) == len(self.weights) == npos:
            raise LengthMismatch(
                f"{npos} positive labels vs {len(self.offsets)} offsets / "
                f"{len(self.targets)} targets / {len(self.weights)} weights"
            )

    @property
    def n(self) -> int:
        return len(self.scores)

    @property
    def n_pos(self) -> int:
        return len(self.weights)


def _require_positives(inputs: LossInputs):
    if inputs.num_gts > 0 and inputs.n_pos == 0:
        raise NoPositives(
            f"{inputs.num_gts} ground truths but no positive anchors"
        )


def cls_loss(inputs: LossInputs, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> float:
    """Mean focal loss over all anchors plus the weighted positive term."""
    _require_positives(inputs)
    if inputs.n == 0:
        return 0.0
    total = sum(
        focal_loss(p, lab, alpha, gamma)
        for p, lab in zip(inputs.scores, inputs.labels)
    )
    out = total / inputs.n
    if inputs.n_pos:
        pos_scores = [p for p, lab in zip(inputs.scores, inputs.labels) if lab]
        matched = sum(
            w * focal_loss(p, 1, alpha, gamma)
            for w, p in zip(inputs.weights, pos_scores)
        )
        out += matched / inputs.n_pos
    return out


def reg_loss(inputs: LossInputs) -> float:
    """Weighted smooth L1 over the positives' offset residuals; 0.0 when the
    scene has no ground truth."""
    _require_positives(inputs)
    if inputs.n_pos == 0:
        return 0.0
    total = 0.0
    for o, t, w in zip(inputs.offsets, inputs.targets, inputs.weights):
        total += w * sum(smooth_l1(r) for r in offset_residual(o, t))
    return total / inputs.n_pos


@dataclass(frozen=True)
class LossReport:
    """Scalar losses plus their per-term breakdown.

    cls_terms holds each anchor's share of the first classification term,
    cls_matching_terms each positive's share of the weighted term, and
    reg_terms each positive's share of the regression loss.
    """

    l_cls: float
    l_reg: float
    l_total: float
    cls_terms: tuple[float, ...]
    cls_matching_terms: tuple[float, ...]
    reg_terms: tuple[float, ...]


def total_loss(inputs: LossInputs, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> LossReport:
    """Classification plus regression loss, with l_total == l_cls + l_reg."""
    l_cls = cls_loss(inputs, alpha, gamma)
    l_reg = reg_loss(inputs)
    n = inputs.n
    npos = inputs.n_pos
    cls_terms = tuple(
        focal_loss(p, lab, alpha, gamma) / n
        for p, lab in zip(inputs.scores, inputs.labels)
    )
    pos_scores = [p for p, lab in zip(inputs.scores, inputs.labels) if lab]
    cls_matching = tuple(
        w * focal_loss(p, 1, alpha, gamma) / npos
        for w, p in zip(inputs.weights, pos_scores)
    )
    reg_terms = tuple(
        w * sum(smooth_l1(r) for r in offset_residual(o, t)) / npos
        for o, t, w in zip(inputs.offsets, inputs.targets, inputs.weights)
    )
    return LossReport(
        l_cls=l_cls,
        l_reg=l_reg,
        l_total=l_cls + l_reg,
        cls_terms=cls_terms,
        cls_matching_terms=cls_matching,
        reg_terms=reg_terms,
    )


def cls_loss_grad(inputs: LossInputs, alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> list[float]:
    """d cls_loss / d score, one entry per anchor."""
    _require_positives(inputs)
    n = inputs.n
    grads = [
        focal_loss_grad(p, lab, alpha, gamma) / n
        for p, lab in zip(inputs.scores, inputs.labels)
    ]
    if inputs.n_pos:
        npos = inputs.n_pos
        j = 0
        for i, lab in enumerate(inputs.labels):
            if lab:
                grads[i] += inputs.weights[j] * focal_loss_grad(
                    inputs.scores[i], 1, alpha, gamma
                ) / npos
                j += 1
    return grads


def reg_loss_grad(inputs: LossInputs) -> list[tuple[float, ...]]:
    """d reg_loss / d offset component, one 5-tuple per positive."""
    _require_positives(inputs)
    npos = inputs.n_pos
    rows = []
    for o, t, w in zip(inputs.offsets, inputs.targets, inputs.weights):
        rows.append(
            tuple(w * smooth_l1_grad(r) / npos for r in offset_residual(o, t))
        )
    return rows


def grad_check(
    fn: Callable[[float], float],
    grad_fn: Callable[[float], float],
    x: float,
    h: float = 1e-6,
    kinks: Sequence[float] = (),
) -> float:
    """Relative error of grad_fn against the central difference of fn at x.

    Raises NonDifferentiablePoint when x sits within h of a declared kink,
    where the central difference straddles two branches and says nothing.
    """
    for k in kinks:
        if abs(x - k) <= h:
            raise NonDifferentiablePoint(f"x={x} within h={h} of kink at {k}")
    num = (fn(x + h) - fn(x - h)) / (2.0 * h)
    ana = grad_fn(x)
    scale = max(abs(num), abs(ana), 1e-8)
    return abs(num - ana) / scale


def check_loss_gradients(inputs: LossInputs, h: float = 1e-6,
                         alpha: float = FOCAL_ALPHA, gamma: float = FOCAL_GAMMA) -> float:
    """Max relative error of the analytic loss gradients at `inputs`.

    Perturbs every anchor score and every positive offset component in
    turn.  Scores within h of the clamp bounds and residual components
    within h of the smooth L1 seams raise NonDifferentiablePoint.
    """
    for p in inputs.scores:
        if abs(p - SCORE_EPS) <= h or abs(p - (1.0 - SCORE_EPS)) <= h:
            raise NonDifferentiablePoint(f"score {p} within h of the clamp bound")
    for o, t in zip(inputs.offsets, inputs.targets):
        for r in offset_residual(o, t):
            for k in SMOOTH_L1_KINKS:
                if abs(r - k) <= h:
                    raise NonDifferentiablePoint(
                        f"residual {r} within h of the smooth L1 seam at {k}"
                    )

    worst = 0.0
    ana_cls = cls_loss_grad(inputs, alpha, gamma)
    scores = list(inputs.scores)
    for i in range(inputs.n):
        lo = replace(inputs, scores=tuple(scores[:i] + [scores[i] - h] + scores[i + 1:]))
        hi = replace(inputs, scores=tuple(scores[:i] + [scores[i] + h] + scores[i + 1:]))
        num = (cls_loss(hi, alpha, gamma) - cls_loss(lo, alpha, gamma)) / (2.0 * h)
        scale = max(abs(num), abs(ana_cls[i]), 1e-8)
        worst = max(worst, abs(num - ana_cls[i]) / scale)

    ana_reg = reg_loss_grad(inputs)
    offsets = list(inputs.offsets)
    for j, off in enumerate(offsets):
        vals = list(off.as_tuple())
        for k in range(5):
            bumped_lo = vals[:]
            bumped_hi = vals[:]
            bumped_lo[k] -= h
            bumped_hi[k] += h
            lo = replace(
                inputs,
                offsets=tuple(offsets[:j] + [Offsets(*bumped_lo)] + offsets[j + 1:]),
            )
            hi = replace(
                inputs,
                offsets=tuple(offsets[:j] + [Offsets(*bumped_hi)] + offsets[j + 1:]),
            )
            num = (reg_loss(hi) - reg_loss(lo)) / (2.0 * h)
            ana = ana_reg[j][k]
            scale = max(abs(num), abs(ana), 1e-8)
            worst = max(worst, abs(num - ana) / scale)
    return worst
