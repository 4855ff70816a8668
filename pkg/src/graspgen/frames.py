"""Image -> camera -> robot grasp-pose transforms.

Deprojection follows the pinhole model: for pixel (x, y) = (column, row)
with depth d,
    u = ((x - c_a) / f_a) * d
    v = ((y - c_b) / f_b) * d
    w = d
Note the indexing convention: depth at pixel (x, y) lives at
depth_map[row=y, col=x]. The extrinsic is a rigid 4x4 camera-to-robot
transform; the grasp yaw is carried through it as the direction of the
gripper-opening axis projected on the robot x-y plane (top-down tabletop
assumption: the camera's optical axis is aligned with the robot z).

Calibration files are YAML with a 3x3 K matrix and a 4x4 T matrix; see
configs/calibration.example.yaml.
"""

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .core.geometry import wrap_angle
from .errors import InvalidConfigError, InvalidExtrinsicError, NoDepthError

CALIBRATION_VERSION = "graspgen-calibration@1"


@dataclass(frozen=True)
class CameraIntrinsics:
    f_a: float  # focal length, pixels, image x (columns)
    f_b: float  # focal length, pixels, image y (rows)
    c_a: float  # principal point x
    c_b: float  # principal point y

    def __post_init__(self):
        if self.f_a <= 0 or self.f_b <= 0:
            raise InvalidConfigError(
                f"focal lengths must be positive, got ({self.f_a}, {self.f_b})"
            )

    @property
    def matrix(self):
        return np.array(
            [[self.f_a, 0.0, self.c_a], [0.0, self.f_b, self.c_b], [0.0, 0.0, 1.0]]
        )

    @classmethod
    def from_matrix(cls, k):
        k = np.asarray(k, dtype=np.float64)
        if k.shape != (3, 3):
            raise InvalidConfigError(f"K must be 3x3, got {k.shape}")
        return cls(f_a=float(k[0, 0]), f_b=float(k[1, 1]),
                   c_a=float(k[0, 2]), c_b=float(k[1, 2]))


class Extrinsic:
    """Rigid 4x4 camera-to-robot transform (proper rotation, unit last row)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (4, 4):
            raise InvalidExtrinsicError(f"extrinsic must be 4x4, got {m.shape}")
        r = m[:3, :3]
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-6):
            raise InvalidExtrinsicError("rotation block is not orthonormal (1e-6)")
        if np.linalg.det(r) < 0:
            raise InvalidExtrinsicError("rotation block has det -1 (reflection)")
        if not np.allclose(m[3], [0.0, 0.0, 0.0, 1.0], atol=1e-9):
            raise InvalidExtrinsicError(f"last row must be (0,0,0,1), got {m[3]}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @property
    def rotation(self):
        return self.matrix[:3, :3]

    @property
    def translation(self):
        return self.matrix[:3, 3]


@dataclass(frozen=True)
class RobotGrasp:
    position: tuple  # (x, y, z) meters, robot base frame
    yaw: float       # radians in [-pi/2, pi/2)
    width: float     # gripper opening, meters
    quality: float

    def __post_init__(self):
        if self.width < 0:
            raise InvalidConfigError(f"width must be >= 0, got {self.width}")
        if not 0.0 <= self.quality <= 1.0:
            raise InvalidConfigError(f"quality must be in [0,1], got {self.quality}")


def _depth_at(x, y, depth_map):
    depth_map = np.asarray(depth_map)
    h, w = depth_map.shape
    xi, yi = int(round(x)), int(round(y))
    if not (0 <= xi < w and 0 <= yi < h):
        raise NoDepthError(f"pixel ({x}, {y}) outside depth map {h}x{w}")
    d = float(depth_map[yi, xi])
    if math.isfinite(d) and d > 0:
        return d
    window = depth_map[max(0, yi - 2) : yi + 3, max(0, xi - 2) : xi + 3]
    valid = window[np.isfinite(window) & (window > 0)]
    if valid.size == 0:
        raise NoDepthError(f"no valid depth in the 5x5 window around ({xi}, {yi})")
    return float(np.median(valid))


def deproject(x, y, depth_map, intrinsics):
    """Pixel (x=column, y=row) plus depth -> camera-frame (u, v, w) meters.

    Missing depth at the pixel falls back to the median of valid depths in
    the 5x5 neighborhood; with none valid, raises NoDepthError.
    """
    d = _depth_at(x, y, depth_map)
    u = ((x - intrinsics.c_a) / intrinsics.f_a) * d
    v = ((y - intrinsics.c_b) / intrinsics.f_b) * d
    return (u, v, d)


def project(point, intrinsics):
    """Camera-frame (u, v, w) back to pixel (x, y); inverse of deproject."""
    u, v, w = point
    if w <= 0:
        raise InvalidConfigError(f"cannot project non-positive depth {w}")
    return (u / w * intrinsics.f_a + intrinsics.c_a,
            v / w * intrinsics.f_b + intrinsics.c_b)


def camera_to_robot(point, extrinsic):
    """Apply the rigid camera-to-robot transform to a 3-D point."""
    p = np.asarray(point, dtype=np.float64)
    out = extrinsic.rotation @ p + extrinsic.translation
    return (float(out[0]), float(out[1]), float(out[2]))


def image_grasp_to_robot_grasp(grasp, depth_map, intrinsics, extrinsic):
    """Lift an ImageGrasp into the robot frame.

    Position deprojects the grasp center; yaw carries the gripper-opening
    axis through the extrinsic rotation (top-down assumption); width
    converts pixels to meters at the grasp depth via f_a.
    """
    row, col = grasp.center
    u, v, w = deproject(col, row, depth_map, intrinsics)
    position = camera_to_robot((u, v, w), extrinsic)
    axis_cam = np.array([math.cos(grasp.angle), math.sin(grasp.angle), 0.0])
    axis_rob = extrinsic.rotation @ axis_cam
    yaw = wrap_angle(math.atan2(axis_rob[1], axis_rob[0]))
    width_m = grasp.width * w / intrinsics.f_a
    return RobotGrasp(position=position, yaw=yaw, width=width_m, quality=grasp.quality)


def save_calibration(path, intrinsics, extrinsic):
    payload = {
        "version": CALIBRATION_VERSION,
        "K": [[float(v) for v in row] for row in intrinsics.matrix],
        "T": [[float(v) for v in row] for row in extrinsic.matrix],
    }
    with open(path, "w") as f:
        yaml.safe_dump(payload, f, sort_keys=True)


def load_calibration(path):
    """Read (CameraIntrinsics, Extrinsic) from a calibration YAML file."""
    with open(path) as f:
        payload = yaml.safe_load(f)
    if not isinstance(payload, dict) or "K" not in payload or "T" not in payload:
        raise InvalidConfigError(f"{path}: calibration needs 'K' and 'T' matrices")
    version = payload.get("version", CALIBRATION_VERSION)
    if version != CALIBRATION_VERSION:
        raise InvalidConfigError(f"{path}: unknown calibration version {version!r}")
    return CameraIntrinsics.from_matrix(payload["K"]), Extrinsic(payload["T"])
