"""Batch flat-array interface over the obbmatch core."""

from ._flat import ShapeError, batch_assign, batch_decode, batch_encode, batch_iou

__version__ = "0.1.0"

__all__ = [
    "ShapeError",
    "batch_assign",
    "batch_decode",
    "batch_encode",
    "batch_iou",
    "__version__",
]
