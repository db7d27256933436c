"""Brute-force reference for label assignment, kept deliberately naive.

Same arithmetic expressions as the package (so results must agree bit for
bit) but independently structured: dict-of-pairs quality table, explicit
candidate sorts, no shared selection code.  Used by the unit and
acceptance suites to cross-check the real implementation.
"""

from obbmatch.geometry import rotated_iou


def naive_assign(anchors, preds, gts, alpha0, gamma, threshold, t,
                 uncertainty_in_warmup=True):
    if t < 0.1:
        alpha = 1.0
    elif t < 0.3:
        alpha = 1.0 + (alpha0 - 1.0) * (5.0 * (t - 0.1))
    else:
        alpha = alpha0
    with_penalty = uncertainty_in_warmup or t >= 0.1

    n = len(anchors)
    m = len(gts)
    quality = {}
    for i in range(n):
        for g in range(m):
            sa = rotated_iou(anchors[i], gts[g])
            fa = rotated_iou(preds[i], gts[g])
            q = alpha * sa + (1.0 - alpha) * fa
            if with_penalty:
                q = alpha * sa + (1.0 - alpha) * fa - abs(sa - fa) ** gamma
            quality[(i, g)] = q

    matched = {}
    for i in range(n):
        best_g = None
        best_q = None
        for g in range(m):
            if best_q is None or quality[(i, g)] > best_q:
                best_g = g
                best_q = quality[(i, g)]
        matched[i] = best_g

    positives = set()
    for i in range(n):
        if quality[(i, matched[i])] >= threshold:
            positives.add(i)

    for g in range(m):
        if any(matched[i] == g for i in positives):
            continue
        unclaimed = [i for i in range(n) if i not in positives]
        unclaimed.sort(key=lambda i: (-quality[(i, g)], i))
        chosen = unclaimed[0]
        positives.add(chosen)
        matched[chosen] = g

    weights = {i: 0.0 for i in range(n)}
    gt_top = {}
    for g in range(m):
        members = [i for i in range(n) if i in positives and matched[i] == g]
        top = max(quality[(i, g)] for i in members)
        gt_top[g] = top
        for i in members:
            weights[i] = 1.0 - (top - quality[(i, g)])

    return {
        "labels": [i in positives for i in range(n)],
        "matched": [matched[i] for i in range(n)],
        "md": [quality[(i, matched[i])] for i in range(n)],
        "weights": [weights[i] for i in range(n)],
        "gt_md_max": [gt_top[g] for g in range(m)],
        "gt_delta_md": [1.0 - gt_top[g] for g in range(m)],
        "gt_n_positives": [
            sum(1 for i in positives if matched[i] == g) for g in range(m)
        ],
    }
