"""Five-parameter offset encoding between anchors and target boxes.

Centers are shifted relative to anchor size, sides compared in log space,
and the wrapped angle residual goes through a tangent.  The tangent only
spans residuals inside (-pi/2, pi/2); residuals within ANGLE_EPS of the
open ends raise AngleSingularity rather than silently saturating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AngleSingularity
from .geometry import HALF_PI, OrientedBox, wrap_half_pi

# Guard band around +-pi/2 where tan() is treated as singular.
ANGLE_EPS = 1e-4


@dataclass(frozen=True)
class Offsets:
    """Regression offsets: center shifts, log side ratios, angle tangent."""

    tx: float
    ty: float
    tw: float
    th: float
    ttheta: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.tx, self.ty, self.tw, self.th, self.ttheta)


def angle_residual(theta: float, theta_anchor: float) -> float:
    """Angle difference wrapped into (-pi/2, pi/2).

    Raises AngleSingularity when the wrapped residual falls within
    ANGLE_EPS of +-pi/2, where the tangent encoding blows up.
    """
    d = wrap_half_pi(theta - theta_anchor)
    if HALF_PI - abs(d) <= ANGLE_EPS:
        raise AngleSingularity(
            f"angle residual {d:+.6f} rad is within {ANGLE_EPS} of +-pi/2"
        )
    return d


def encode(target: OrientedBox, anchor: OrientedBox) -> Offsets:
    """Offsets that carry `anchor` onto `target`."""
    return Offsets(
        (target.x - anchor.x) / anchor.w,
        (target.y - anchor.y) / anchor.h,
        math.log(target.w / anchor.w),
        math.log(target.h / anchor.h),
        math.tan(angle_residual(target.angle, anchor.angle)),
    )


def decode(offsets: Offsets, anchor: OrientedBox) -> OrientedBox:
    """Apply offsets to an anchor; the result comes back in canonical form."""
    return OrientedBox(
        offsets.tx * anchor.w + anchor.x,
        offsets.ty * anchor.h + anchor.y,
        math.exp(offsets.tw) * anchor.w,
        math.exp(offsets.th) * anchor.h,
        anchor.angle + math.atan(offsets.ttheta),
    ).canonical()
