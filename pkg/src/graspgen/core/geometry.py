"""Grasp representations in image space and conversions between them.

Conventions used everywhere in this package:

* Points are (row, col) in pixels; arrays are indexed ``arr[row, col]``.
* A grasp rectangle's vertices walk the perimeter. The edge from vertex 0
  to vertex 1 runs along the gripper opening axis: its orientation is the
  grasp angle and its length is the grasp width. The perpendicular edge
  (vertex 1 to vertex 2) is the jaw height.
* Angles are radians in the half-open interval [-pi/2, pi/2); pi/2 wraps
  to -pi/2 so every orientation has a unique representation.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import (
    DegenerateGraspError,
    InvalidGeometryError,
    UndefinedAngleError,
)

# Angular slack between opposite edges before a source rectangle is flagged
# as skew (annotation noise in Cornell-format data can bend them slightly).
SKEW_FLAG_RAD = 0.05
SKEW_NOMINAL_RAD = 1e-3


def wrap_angle(theta):
    """Wrap an angle to [-pi/2, pi/2); pi/2 maps to -pi/2."""
    return (theta + math.pi / 2.0) % math.pi - math.pi / 2.0


def angle_from_components(s, c):
    """Recover the grasp angle from its (sin 2a, cos 2a) encoding.

    Raises:
        UndefinedAngleError: if both components are zero.
    """
    if s == 0.0 and c == 0.0:
        raise UndefinedAngleError("angle undefined for (sin, cos) == (0, 0)")
    return wrap_angle(0.5 * math.atan2(s, c))


@dataclass(frozen=True)
class ImageGrasp:
    """A single grasp in image coordinates: center, angle, width, quality."""

    center: tuple  # (row, col) pixels
    angle: float  # radians in [-pi/2, pi/2)
    width: float  # pixels
    quality: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.quality <= 1.0:
            raise ValueError(f"quality must be in [0, 1], got {self.quality}")
        if self.width < 0.0:
            raise ValueError(f"width must be >= 0, got {self.width}")

    def with_quality(self, q):
        return replace(self, quality=q)


class GraspRectangle:
    """Four-vertex rotated rectangle in pixel coordinates."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=np.float64)
        if v.shape != (4, 2):
            raise InvalidGeometryError(f"expected 4 (row, col) vertices, got shape {v.shape}")
        self.vertices = v

    def __repr__(self):
        return f"GraspRectangle({self.vertices.tolist()})"

    @property
    def center(self):
        c = self.vertices.mean(axis=0)
        return (float(c[0]), float(c[1]))

    @property
    def angle(self):
        d = self.vertices[1] - self.vertices[0]
        return wrap_angle(math.atan2(-d[0], d[1]))

    @property
    def width(self):
        return float(np.linalg.norm(self.vertices[1] - self.vertices[0]))

    @property
    def jaw_height(self):
        return float(np.linalg.norm(self.vertices[2] - self.vertices[1]))

    @property
    def area(self):
        """Shoelace area of the vertex polygon."""
        v = self.vertices
        s = 0.0
        for i in range(4):
            j = (i + 1) % 4
            s += v[i, 0] * v[j, 1] - v[j, 0] * v[i, 1]
        return abs(s) / 2.0

    @property
    def skew(self):
        """Largest angular deviation (rad) between opposite edge pairs."""
        v = self.vertices
        worst = 0.0
        for i in (0, 1):
            a = v[i + 1] - v[i]
            b = v[i + 2] - v[(i + 3) % 4]  # opposite edge, same walking sense
            na = np.linalg.norm(a)
            nb = np.linalg.norm(b)
            if na == 0.0 or nb == 0.0:
                continue
            cosang = np.clip(abs(float(np.dot(a, b))) / (na * nb), 0.0, 1.0)
            worst = max(worst, math.acos(cosang))
        return worst

    @property
    def flagged(self):
        """True when the source vertices are too skew to trust blindly."""
        return self.skew > SKEW_FLAG_RAD

    def offset(self, drow, dcol):
        return GraspRectangle(self.vertices + np.array([drow, dcol], dtype=np.float64))


def rect_to_image_grasp(rect):
    """Collapse a grasp rectangle to (center, angle, width, quality=1).

    Raises:
        InvalidGeometryError: for a degenerate (zero-area) rectangle.
    """
    if rect.area == 0.0:
        raise InvalidGeometryError("degenerate rectangle (zero area)")
    return ImageGrasp(center=rect.center, angle=rect.angle, width=rect.width, quality=1.0)


def image_grasp_to_rect(grasp, jaw_height=None):
    """Expand an image grasp back to a 4-vertex rectangle.

    ``jaw_height`` defaults to half the grasp width, which is what the
    rectangle metric and the overlay renderer use.

    Raises:
        DegenerateGraspError: if the grasp width is zero.
    """
    w = grasp.width
    if w <= 0.0:
        raise DegenerateGraspError("cannot build a rectangle from a zero-width grasp")
    h = w / 2.0 if jaw_height is None else float(jaw_height)
    if h <= 0.0:
        raise DegenerateGraspError(f"jaw height must be > 0, got {h}")
    psi = grasp.angle
    axis = np.array([-math.sin(psi), math.cos(psi)])
    normal = np.array([math.cos(psi), math.sin(psi)])
    c = np.asarray(grasp.center, dtype=np.float64)
    half_w = 0.5 * w * axis
    half_h = 0.5 * h * normal
    return GraspRectangle(
        np.stack([c - half_w - half_h, c + half_w - half_h, c + half_w + half_h, c - half_w + half_h])
    )
