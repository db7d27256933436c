"""Rotated-box geometry, dynamic anchor selection, and matching-sensitive losses."""

from . import errors
from .anchors import AnchorGrid, GridConfig, generate_grid, pyramid_levels
from .assignment import (
    Assignment,
    MatchingConfig,
    MatchScores,
    alpha_schedule,
    assign,
    blend_matrix,
    compensation_weights,
    matching_degree,
    pairwise_scores,
    select_by_metric,
)
from .codec import ANGLE_EPS, Offsets, angle_residual, decode, encode
from .geometry import (
    OrientedBox,
    Quad,
    min_area_rect,
    polygon_intersection_area,
    rotated_iou,
    rotated_nms,
    same_box,
    to_polygon,
    wrap_half_pi,
)
from .loss import (
    LossInputs,
    LossReport,
    check_loss_gradients,
    cls_loss,
    cls_loss_grad,
    focal_loss,
    focal_loss_grad,
    grad_check,
    reg_loss,
    reg_loss_grad,
    smooth_l1,
    smooth_l1_grad,
    total_loss,
)

__version__ = "0.1.0"

__all__ = [
    "ANGLE_EPS",
    "AnchorGrid",
    "Assignment",
    "GridConfig",
    "LossInputs",
    "LossReport",
    "MatchScores",
    "MatchingConfig",
    "Offsets",
    "OrientedBox",
    "Quad",
    "alpha_schedule",
    "angle_residual",
    "assign",
    "blend_matrix",
    "check_loss_gradients",
    "cls_loss",
    "cls_loss_grad",
    "compensation_weights",
    "decode",
    "encode",
    "errors",
    "focal_loss",
    "focal_loss_grad",
    "generate_grid",
    "grad_check",
    "matching_degree",
    "min_area_rect",
    "pairwise_scores",
    "polygon_intersection_area",
    "pyramid_levels",
    "reg_loss",
    "reg_loss_grad",
    "rotated_iou",
    "rotated_nms",
    "same_box",
    "select_by_metric",
    "smooth_l1",
    "smooth_l1_grad",
    "to_polygon",
    "total_loss",
    "wrap_half_pi",
]
