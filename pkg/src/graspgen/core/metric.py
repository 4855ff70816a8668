"""The rectangle success metric for grasp predictions.

A predicted grasp counts as a success against a set of ground-truth
rectangles when, for at least one of them, the rasterized IOU exceeds the
IOU threshold and the orientation offset stays under the angle threshold.
"""

import math
from dataclasses import dataclass

from .. import kernels
from ..errors import InvalidConfigError, InvalidGeometryError, InvalidInputError
from .geometry import image_grasp_to_rect, wrap_angle


@dataclass(frozen=True)
class MetricThresholds:
    iou_min: float = 0.25
    angle_max_deg: float = 30.0

    def __post_init__(self):
        if not 0.0 < self.iou_min < 1.0:
            raise InvalidConfigError(f"iou_min must be in (0, 1), got {self.iou_min}")
        if not 0.0 < self.angle_max_deg <= 90.0:
            raise InvalidConfigError(
                f"angle_max_deg must be in (0, 90], got {self.angle_max_deg}"
            )


def iou(a, b):
    """Rasterized intersection-over-union of two grasp rectangles.

    Pixel counting happens on the integer grid over the pair's joint
    bounding box (the convention rectangle-metric results on Cornell-format
    data are reported with). Symmetric in its arguments.

    Raises:
        InvalidGeometryError: if the union rasterizes to zero pixels.
    """
    inter, union = kernels.quad_pair_counts(a.vertices, b.vertices)
    if union == 0:
        raise InvalidGeometryError("zero-area union: both rectangles rasterize to nothing")
    return inter / union


def angle_offset(a, b):
    """Orientation offset in degrees, in [0, 90], modulo gripper symmetry."""
    return abs(math.degrees(wrap_angle(a - b)))


def rectangle_metric(pred, positives, thresholds=MetricThresholds()):
    """True iff ``pred`` matches at least one positive rectangle.

    Raises:
        InvalidInputError: if ``positives`` is empty.
        DegenerateGraspError: if ``pred`` has zero width (propagated).
    """
    if not positives:
        raise InvalidInputError("rectangle_metric needs at least one positive rectangle")
    pred_rect = image_grasp_to_rect(pred)
    for gt in positives:
        if angle_offset(pred.angle, gt.angle) >= thresholds.angle_max_deg:
            continue
        if iou(pred_rect, gt) > thresholds.iou_min:
            return True
    return False
