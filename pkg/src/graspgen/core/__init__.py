from .geometry import (
    GraspRectangle,
    ImageGrasp,
    angle_from_components,
    image_grasp_to_rect,
    rect_to_image_grasp,
    wrap_angle,
)
from .maps import (
    PEAK_SIGMA_PX,
    WIDTH_MAX_PX,
    GraspMapSet,
    decode_grasps,
    encode_target_maps,
)
from .metric import MetricThresholds, angle_offset, iou, rectangle_metric

__all__ = [
    "GraspRectangle",
    "ImageGrasp",
    "angle_from_components",
    "image_grasp_to_rect",
    "rect_to_image_grasp",
    "wrap_angle",
    "GraspMapSet",
    "decode_grasps",
    "encode_target_maps",
    "WIDTH_MAX_PX",
    "PEAK_SIGMA_PX",
    "MetricThresholds",
    "angle_offset",
    "iou",
    "rectangle_metric",
]
