"""Seeded synthetic scenes and a stand-in regressor.

The regressor interpolates an anchor toward a target box and optionally
smears the result with Gaussian noise, which is enough to give every
anchor a nontrivial "after regression" box without training anything.
All randomness flows from numpy SeedSequence spawning, so scene i's draws
do not depend on how many scenes come before it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import OrientedBox, wrap_half_pi
from .annotations import GroundTruth, Scene

CLASS_NAMES = ("ship", "plane", "vehicle", "harbor")


@dataclass(frozen=True)
class RegressorParams:
    """How far synthetic predictions move toward their target.

    Each anchor draws its own pull in [pull_low, pull_high]; noise_scale
    is the Gaussian sigma per normalized parameter (centers in units of
    box size, sides in log space, angle in radians).
    """

    pull_low: float = 0.1
    pull_high: float = 1.0
    noise_scale: float = 0.12

    def __post_init__(self):
        if not 0.0 <= self.pull_low <= self.pull_high <= 1.0:
            raise ValueError(f"bad pull range [{self.pull_low}, {self.pull_high}]")
        if self.noise_scale < 0.0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")


def regress_toward(anchor: OrientedBox, target: OrientedBox, pull: float,
                   noise_scale: float, rng: np.random.Generator) -> OrientedBox:
    """Interpolate anchor toward target, then apply parameter noise.

    pull=0 keeps the anchor's parameters and pull=1 takes the target's,
    exactly, so with zero noise the prediction degenerates to one of the
    endpoints bit for bit.  The angle moves along the wrapped residual.
    When noise_scale is 0 the rng is never consulted.
    """
    if pull == 0.0:
        x, y, w, h, a = anchor.x, anchor.y, anchor.w, anchor.h, anchor.angle
    elif pull == 1.0:
        x, y, w, h, a = target.x, target.y, target.w, target.h, target.angle
    else:
        x = anchor.x + pull * (target.x - anchor.x)
        y = anchor.y + pull * (target.y - anchor.y)
        w = anchor.w + pull * (target.w - anchor.w)
        h = anchor.h + pull * (target.h - anchor.h)
        a = anchor.angle + pull * wrap_half_pi(target.angle - anchor.angle)
    if noise_scale > 0.0:
        e = rng.normal(0.0, noise_scale, 5)
        x += e[0] * w
        y += e[1] * h
        w *= math.exp(e[2])
        h *= math.exp(e[3])
        a += e[4]
    return OrientedBox(float(x), float(y), float(w), float(h), float(a))


def synthetic_regressor(anchor: OrientedBox, target: OrientedBox, pull: float,
                        noise_scale: float, seed: int) -> OrientedBox:
    """Seeded one-shot wrapper around regress_toward."""
    return regress_toward(anchor, target, pull, noise_scale,
                          np.random.default_rng(seed))


@dataclass(frozen=True)
class CorpusParams:
    """Distribution knobs for synthetic scenes.

    Sizes are sqrt-areas in pixels; aspect is drawn log-uniformly and
    folded to long-edge form, so the drawn angle is already the canonical
    angle.  Its range stays clear of +-pi/2, keeping encoded targets out
    of the tangent guard band.
    """

    image_w: float = 32.0
    image_h: float = 32.0
    min_objects: int = 1
    max_objects: int = 3
    size_low: float = 12.0
    size_high: float = 26.0
    aspect_low: float = 0.45
    aspect_high: float = 2.2
    angle_low: float = -1.35
    angle_high: float = 1.35
    margin: float = 4.0


def synthetic_scenes(n_scenes: int, seed: int, params: CorpusParams = CorpusParams()) -> list[Scene]:
    """Seeded random scenes; ground truths come back in canonical form."""
    if n_scenes < 0:
        raise ValueError(f"n_scenes must be >= 0, got {n_scenes}")
    root = np.random.SeedSequence(seed)
    scenes = []
    for child in root.spawn(n_scenes):
        rng = np.random.default_rng(child)
        k = int(rng.integers(params.min_objects, params.max_objects + 1))
        objects = []
        for _ in range(k):
            size = rng.uniform(params.size_low, params.size_high)
            aspect = math.exp(rng.uniform(math.log(params.aspect_low),
                                          math.log(params.aspect_high)))
            w = size * math.sqrt(aspect)
            h = size / math.sqrt(aspect)
            if w < h:
                w, h = h, w
            x = rng.uniform(params.margin, params.image_w - params.margin)
            y = rng.uniform(params.margin, params.image_h - params.margin)
            angle = rng.uniform(params.angle_low, params.angle_high)
            label = CLASS_NAMES[int(rng.integers(len(CLASS_NAMES)))]
            box = OrientedBox(float(x), float(y), float(w), float(h), float(angle))
            objects.append(GroundTruth(box.canonical(), label))
        scenes.append(Scene(params.image_w, params.image_h, tuple(objects)))
    return scenes
