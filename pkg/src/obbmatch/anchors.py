"""Horizontal anchor grids over a feature pyramid.

Rotation is left to the regressor: every anchor sits at angle 0 and the
aspect ratios {1/2, 1, 2} cover orientation coarsely.  Per ratio r an
anchor is base_scale*sqrt(r) wide and base_scale/sqrt(r) tall, so each
one covers base_scale**2 of area regardless of ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidConfig
from .geometry import OrientedBox

DEFAULT_RATIOS = (0.5, 1.0, 2.0)
DEFAULT_STRIDES = (8, 16, 32, 64, 128)


def pyramid_levels(strides=DEFAULT_STRIDES, scale_multiple: float = 4.0):
    """(stride, base_scale) pairs with base_scale = scale_multiple * stride."""
    return tuple((float(s), scale_multiple * float(s)) for s in strides)


@dataclass(frozen=True)
class GridConfig:
    """Anchor layout for one image size."""

    image_w: float
    image_h: float
    levels: tuple[tuple[float, float], ...] = field(default_factory=pyramid_levels)
    ratios: tuple[float, ...] = DEFAULT_RATIOS

    def build(self) -> "AnchorGrid":
        return generate_grid(self.image_w, self.image_h, self.levels, self.ratios)


@dataclass(frozen=True)
class AnchorGrid:
    """Flat anchor list plus per-level bookkeeping.

    anchors is level-major, row-major over cells, ratio index innermost.
    level_offsets[k] is the index of level k's first anchor.
    """

    anchors: tuple[OrientedBox, ...]
    level_offsets: tuple[int, ...]
    strides: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.anchors)


def generate_grid(image_w, image_h, levels=None, ratios=DEFAULT_RATIOS) -> AnchorGrid:
    """Tile every pyramid level of an image with horizontal anchors.

    Cells are stride-sized with anchors at cell centers (i + 0.5) * stride;
    a level covers ceil(image / stride) cells per axis.  Border anchors may
    overhang the image; nothing is clipped.
    """
    if levels is None:
        levels = pyramid_levels()
    if not (image_w > 0 and image_h > 0):
        raise InvalidConfig(f"image size must be positive, got {image_w}x{image_h}")
    if not levels:
        raise InvalidConfig("need at least one pyramid level")
    if not ratios:
        raise InvalidConfig("need at least one aspect ratio")
    for stride, scale in levels:
        if stride <= 0 or scale <= 0:
            raise InvalidConfig(f"bad level ({stride}, {scale})")
    for r in ratios:
        if r <= 0:
            raise InvalidConfig(f"aspect ratios must be positive, got {r}")

    anchors: list[OrientedBox] = []
    offsets: list[int] = []
    strides: list[float] = []
    for stride, scale in levels:
        offsets.append(len(anchors))
        strides.append(float(stride))
        shapes = [(scale * math.sqrt(r), scale / math.sqrt(r)) for r in ratios]
        nx = math.ceil(image_w / stride)
        ny = math.ceil(image_h / stride)
        for j in range(ny):
            cy = (j + 0.5) * stride
            for i in range(nx):
                cx = (i + 0.5) * stride
                for w, h in shapes:
                    anchors.append(OrientedBox(cx, cy, w, h, 0.0))
    return AnchorGrid(tuple(anchors), tuple(offsets), tuple(strides))
