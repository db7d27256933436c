"""Exact rotated-rectangle geometry: IoU, enclosing rectangles, NMS.

Boxes are center/size/angle rectangles in a y-up Cartesian plane.  The
canonical "long edge" form keeps w >= h with the angle wrapped into
(-pi/2, pi/2]; a box and its canonical form cover the same point set.
Everything here is plain double precision and sequential, so results are
reproducible bit for bit regardless of batch order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateInput, LengthMismatch

Point = tuple[float, float]

HALF_PI = math.pi / 2.0

# Relative tolerance for half-plane membership during clipping.  Cross
# products scale with the square of the coordinate magnitude, so the
# working epsilon is CLIP_EPS * max(1, max coordinate)**2.
CLIP_EPS = 1e-12


def wrap_half_pi(angle: float) -> float:
    """Wrap an angle into (-pi/2, pi/2], its value modulo pi."""
    a = math.fmod(angle, math.pi)
    if a > HALF_PI:
        a -= math.pi
    elif a <= -HALF_PI:
        a += math.pi
    return a


@dataclass(frozen=True)
class OrientedBox:
    """Rotated rectangle: center (x, y), sides (w, h), rotation angle in radians."""

    x: float
    y: float
    w: float
    h: float
    angle: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h", "angle"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{name} must be a finite number, got {v!r}")
        if self.w <= 0.0 or self.h <= 0.0:
            raise ValueError(f"sides must be positive, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def canonical(self) -> "OrientedBox":
        """Long-edge form: w >= h, angle in (-pi/2, pi/2].

        Squares only get their angle wrapped; for w < h the sides swap and
        the angle turns by pi/2.  The point set is unchanged.
        """
        w, h, angle = self.w, self.h, self.angle
        if w < h:
            w, h = h, w
            angle += HALF_PI
        return OrientedBox(self.x, self.y, w, h, wrap_half_pi(angle))


@dataclass(frozen=True)
class Quad:
    """Convex quadrilateral, vertices in counter-clockwise order."""

    vertices: tuple[Point, Point, Point, Point]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise ValueError(f"need 4 vertices, got {len(self.vertices)}")
        if _signed_area(self.vertices) <= 0.0:
            raise ValueError("vertices must be counter-clockwise with nonzero area")
        eps = _working_eps(self.vertices)
        pts = self.vertices
        for i in range(4):
            o, a, b = pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]
            if _cross(o, a, b) < -eps:
                raise ValueError("vertices must form a convex polygon")

    @property
    def area(self) -> float:
        return 0.5 * abs(_signed_doubled_area(self.vertices))


def to_polygon(box: OrientedBox) -> Quad:
    """Corner quad of a box, counter-clockwise from the local (-w/2, -h/2) corner."""
    return Quad(_corners(box.x, box.y, box.w, box.h, box.angle))


def _corners(x, y, w, h, angle):
    c = math.cos(angle)
    s = math.sin(angle)
    hw = 0.5 * w
    hh = 0.5 * h
    wc, ws = hw * c, hw * s
    hc, hs = hh * c, hh * s
    return (
        (x - wc + hs, y - ws - hc),
        (x + wc + hs, y + ws - hc),
        (x + wc - hs, y + ws + hc),
        (x - wc - hs, y - ws + hc),
    )


def _signed_doubled_area(pts) -> float:
    acc = 0.0
    n = len(pts)
    x0, y0 = pts[-1]
    for x1, y1 in pts:
        acc += x0 * y1 - x1 * y0
        x0, y0 = x1, y1
    return acc


def _signed_area(pts) -> float:
    return 0.5 * _signed_doubled_area(pts)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _working_eps(*point_sets) -> float:
    m = 1.0
    for pts in point_sets:
        for x, y in pts:
            ax, ay = abs(x), abs(y)
            if ax > m:
                m = ax
            if ay > m:
                m = ay
    return CLIP_EPS * m * m


def _clip(subject, clip_poly, eps):
    """Sutherland-Hodgman clip of `subject` by the CCW convex `clip_poly`.

    Vertices within eps of a clip edge count as inside, so a shared edge
    degenerates to a zero-area sliver instead of flipping in and out.
    """
    output = list(subject)
    n = len(clip_poly)
    for i in range(n):
        if not output:
            break
        ax, ay = clip_poly[i]
        bx, by = clip_poly[(i + 1) % n]
        ex = bx - ax
        ey = by - ay
        incoming = output
        output = []
        px, py = incoming[-1]
        pside = ex * (py - ay) - ey * (px - ax)
        for qx, qy in incoming:
            qside = ex * (qy - ay) - ey * (qx - ax)
            if qside >= -eps:
                if pside < -eps:
                    t = pside / (pside - qside)
                    output.append((px + t * (qx - px), py + t * (qy - py)))
                output.append((qx, qy))
            elif pside >= -eps:
                t = pside / (pside - qside)
                output.append((px + t * (qx - px), py + t * (qy - py)))
            px, py, pside = qx, qy, qside
    return output


def polygon_intersection_area(a: Quad, b: Quad) -> float:
    """Intersection area of two convex CCW quads; 0.0 for measure-zero contact."""
    pa, pb = a.vertices, b.vertices
    eps = _working_eps(pa, pb)
    clipped = _clip(pa, pb, eps)
    if len(clipped) < 3:
        return 0.0
    return 0.5 * abs(_signed_doubled_area(clipped))


def rotated_iou(a: OrientedBox, b: OrientedBox) -> float:
    """Area IoU of two rotated rectangles, exact up to clipping epsilon.

    Symmetric bit for bit: the pair is put into a fixed order before
    clipping, so rotated_iou(a, b) and rotated_iou(b, a) run the same
    arithmetic.  Identical field tuples short-circuit the self-clip into
    an exact 1.0 because every vertex lies on its own boundary.
    """
    ka = (a.x, a.y, a.w, a.h, a.angle)
    kb = (b.x, b.y, b.w, b.h, b.angle)
    if kb < ka:
        ka, kb = kb, ka
    # Cheap reject: boxes farther apart than their circumradii cannot meet.
    dx = kb[0] - ka[0]
    dy = kb[1] - ka[1]
    ra = 0.5 * math.hypot(ka[2], ka[3])
    rb = 0.5 * math.hypot(kb[2], kb[3])
    if dx * dx + dy * dy > (ra + rb) * (ra + rb):
        return 0.0
    pa = _corners(*ka)
    pb = _corners(*kb)
    eps = _working_eps(pa, pb)
    clipped = _clip(pa, pb, eps)
    if len(clipped) < 3:
        return 0.0
    inter = 0.5 * abs(_signed_doubled_area(clipped))
    # Polygon areas, not w*h, so a box against itself cancels exactly.
    area_a = 0.5 * abs(_signed_doubled_area(pa))
    area_b = 0.5 * abs(_signed_doubled_area(pb))
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    iou = inter / union
    if iou < 0.0:
        return 0.0
    if iou > 1.0:
        return 1.0
    return iou


def _convex_hull(pts):
    """Counter-clockwise convex hull (monotone chain); collinear points dropped."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def build(ordered):
        out = []
        for p in ordered:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(reversed(pts))
    return lower[:-1] + upper[:-1]


def min_area_rect(points: Iterable[Point]) -> OrientedBox:
    """Smallest-area enclosing rotated rectangle of three or more points.

    One side of the optimum is flush with a convex-hull edge, so the hull
    edges are swept and the best flush rectangle wins.  The result comes
    back in canonical form.  Collinear or coincident inputs raise
    DegenerateInput.
    """
    pts = [(float(px), float(py)) for px, py in points]
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(pts)}")
    hull = _convex_hull(pts)
    if len(hull) < 3:
        raise DegenerateInput("points are collinear or coincident")
    best = None
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        angle = math.atan2(by - ay, bx - ax)
        c = math.cos(angle)
        s = math.sin(angle)
        xs = [px * c + py * s for px, py in hull]
        ys = [py * c - px * s for px, py in hull]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        area = (x1 - x0) * (y1 - y0)
        if best is None or area < best[0]:
            best = (area, angle, x0, x1, y0, y1)
    _, angle, x0, x1, y0, y1 = best
    w = x1 - x0
    h = y1 - y0
    if w <= 0.0 or h <= 0.0:
        raise DegenerateInput("hull has zero extent")
    c = math.cos(angle)
    s = math.sin(angle)
    lx = 0.5 * (x0 + x1)
    ly = 0.5 * (y0 + y1)
    return OrientedBox(lx * c - ly * s, lx * s + ly * c, w, h, angle).canonical()


def rotated_nms(
    boxes: Sequence[OrientedBox],
    scores: Sequence[float],
    iou_threshold: float,
) -> list[int]:
    """Greedy non-maximum suppression under rotated IoU.

    Returns indices of the kept boxes, best score first; equal scores break
    toward the lower index.  A candidate is dropped when its IoU with any
    already-kept box exceeds iou_threshold.
    """
    if len(boxes) != len(scores):
        raise LengthMismatch(f"{len(boxes)} boxes vs {len(scores)} scores")
    if not 0.0 <= iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in [0, 1], got {iou_threshold}")
    order = sorted(range(len(boxes)), key=lambda i: (-scores[i], i))
    kept: list[int] = []
    for i in order:
        if all(rotated_iou(boxes[i], boxes[j]) <= iou_threshold for j in kept):
            kept.append(i)
    return kept


def same_box(a: OrientedBox, b: OrientedBox, tol: float = 1e-9) -> bool:
    """Whether two boxes describe the same rectangle, up to canonical symmetry.

    Field comparison on canonical forms.  Near-square boxes additionally
    accept the w/h swap with the angle turned by pi/2, which describes the
    same point set.
    """
    ca, cb = a.canonical(), b.canonical()
    if (
        abs(ca.x - cb.x) <= tol
        and abs(ca.y - cb.y) <= tol
        and abs(ca.w - cb.w) <= tol
        and abs(ca.h - cb.h) <= tol
        and abs(wrap_half_pi(ca.angle - cb.angle)) <= tol
    ):
        return True
    if abs(ca.w - ca.h) <= tol and abs(cb.w - cb.h) <= tol:
        return (
            abs(ca.x - cb.x) <= tol
            and abs(ca.y - cb.y) <= tol
            and abs(ca.w - cb.h) <= tol
            and abs(ca.h - cb.w) <= tol
            and HALF_PI - abs(wrap_half_pi(ca.angle - cb.angle)) <= tol
        )
    return False
