"""Prediction rendering: grasp overlays and map heatmaps.

The heatmap colormap is a fixed linear ramp between two documented
endpoints, LOW_COLOR (dark navy) at vmin and HIGH_COLOR (yellow) at vmax,
so rendered images are stable across runs. Each map is rendered over a
fixed value range: quality and width over [0, 1], angle over
[-pi/2, pi/2].
"""

import math
from pathlib import Path

import cv2
import numpy as np
from PIL import Image

from .core.maps import GraspMapSet  # noqa: F401  (documented input type)
from .core.geometry import image_grasp_to_rect

LOW_COLOR = (0, 0, 64)
HIGH_COLOR = (255, 255, 0)
JAW_COLOR = (255, 64, 64)
AXIS_COLOR = (64, 128, 255)


def render_heatmap(values, vmin, vmax):
    """Map an h x w array onto the fixed two-endpoint ramp; returns RGB."""
    values = np.asarray(values, dtype=np.float64)
    span = vmax - vmin
    t = np.clip((values - vmin) / span if span > 0 else values * 0.0, 0.0, 1.0)
    low = np.array(LOW_COLOR, dtype=np.float64)
    high = np.array(HIGH_COLOR, dtype=np.float64)
    rgb = low[None, None, :] + t[:, :, None] * (high - low)[None, None, :]
    return np.clip(rgb + 0.5, 0, 255).astype(np.uint8)


def angle_map(maps):
    """Per-pixel grasp angle from the sin/cos planes, in [-pi/2, pi/2)."""
    angles = 0.5 * np.arctan2(maps.sin2, maps.cos2)
    angles = np.mod(angles + math.pi / 2, math.pi) - math.pi / 2
    return angles


def draw_grasps(rgb, grasps, jaw_height=None):
    """Draw grasp rectangles on a copy of the image.

    Jaw edges render in JAW_COLOR, gripper-opening sides in AXIS_COLOR.
    ``grasps`` holds ImageGrasps (converted with the default jaw height
    unless given) or GraspRectangles. Zero-width grasps, the decoder's
    "nothing found" output, have no rectangle and are skipped.
    """
    out = np.ascontiguousarray(np.asarray(rgb, dtype=np.uint8).copy())
    for grasp in grasps:
        if hasattr(grasp, "vertices"):
            rect = grasp
        elif grasp.width <= 0:
            continue
        else:
            rect = image_grasp_to_rect(grasp, jaw_height)
        pts = rect.vertices[:, ::-1]  # (row, col) -> (x, y) for drawing
        corners = [tuple(np.round(p).astype(int)) for p in pts]
        for i, color in ((0, AXIS_COLOR), (1, JAW_COLOR), (2, AXIS_COLOR), (3, JAW_COLOR)):
            cv2.line(out, corners[i], corners[(i + 1) % 4], color, 1, cv2.LINE_AA)
    return out


def save_prediction_viz(rgb, maps, grasps, out_dir, stem="pred"):
    """Write the four standard images; returns their paths.

    overlay: grasps drawn on the RGB image; quality and width over [0, 1];
    angle over [-pi/2, pi/2].
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    panels = {
        "overlay": draw_grasps(rgb, grasps),
        "quality": render_heatmap(maps.quality, 0.0, 1.0),
        "angle": render_heatmap(angle_map(maps), -math.pi / 2, math.pi / 2),
        "width": render_heatmap(maps.width, 0.0, 1.0),
    }
    paths = []
    for name, image in panels.items():
        path = out_dir / f"{stem}_{name}.png"
        Image.fromarray(image).save(path)
        paths.append(path)
    return paths
