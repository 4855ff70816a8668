"""Per-pixel grasp maps: encoding ground truth and decoding predictions.

A map set holds four h x w planes: grasp quality in [0, 1], the sin/cos of
twice the grasp angle in [-1, 1], and the grasp width normalized by
``WIDTH_MAX_PX``. Doubling the angle removes the 180-degree gripper symmetry
so the two angle planes are continuous where grasps wrap around.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .. import kernels
from ..errors import InvalidGeometryError
from .geometry import ImageGrasp, image_grasp_to_rect, rect_to_image_grasp, wrap_angle

# Normalization constant for the width plane; generous for 224-px crops of
# Cornell-format scenes.
WIDTH_MAX_PX = 150.0

# Fraction of the rectangle (along the opening axis) painted as positive.
_CENTER_FRACTION = 1.0 / 3.0

# Gaussian smoothing applied to the quality plane before peak extraction.
PEAK_SIGMA_PX = 2.0

MAPS_FORMAT_VERSION = "graspgen-maps@1"


@dataclass
class GraspMapSet:
    """Pixel-wise quality / sin(2a) / cos(2a) / normalized-width planes."""

    quality: np.ndarray
    sin2: np.ndarray
    cos2: np.ndarray
    width: np.ndarray

    @property
    def shape(self):
        return self.quality.shape

    def validate(self):
        shapes = {p.shape for p in (self.quality, self.sin2, self.cos2, self.width)}
        if len(shapes) != 1:
            raise InvalidGeometryError(f"map planes disagree on shape: {shapes}")
        if self.quality.min() < 0.0 or self.quality.max() > 1.0:
            raise ValueError("quality plane out of [0, 1]")
        for name in ("sin2", "cos2"):
            plane = getattr(self, name)
            if plane.min() < -1.0 or plane.max() > 1.0:
                raise ValueError(f"{name} plane out of [-1, 1]")
        if self.width.min() < 0.0:
            raise ValueError("width plane has negative values")

    def stacked(self):
        """(4, h, w) float32 view in (quality, sin2, cos2, width) order."""
        return np.stack(
            [p.astype(np.float32) for p in (self.quality, self.sin2, self.cos2, self.width)]
        )

    @classmethod
    def from_stacked(cls, arr):
        arr = np.asarray(arr, dtype=np.float32)
        if arr.ndim != 3 or arr.shape[0] != 4:
            raise ValueError(f"expected a (4, h, w) array, got {arr.shape}")
        return cls(quality=arr[0], sin2=arr[1], cos2=arr[2], width=arr[3])

    def save(self, path):
        """Serialize as a 4-channel float32 array in numpy's npz container."""
        np.savez(path, maps=self.stacked(), version=MAPS_FORMAT_VERSION)

    @classmethod
    def load(cls, path):
        with np.load(path, allow_pickle=False) as data:
            return cls.from_stacked(data["maps"])


def encode_target_maps(rects, shape, width_max=WIDTH_MAX_PX):
    """Paint ground-truth rectangles into target maps.

    Only the central third of each rectangle along the opening axis is
    painted (quality 1, angle components, normalized width); everything else
    stays zero. Later rectangles overwrite earlier ones where they overlap.
    An empty rectangle list yields all-zero maps.
    """
    h, w = shape
    quality = np.zeros((h, w), dtype=np.float32)
    sin2 = np.zeros((h, w), dtype=np.float32)
    cos2 = np.zeros((h, w), dtype=np.float32)
    width = np.zeros((h, w), dtype=np.float32)
    for rect in rects:
        grasp = rect_to_image_grasp(rect)
        region = image_grasp_to_rect(
            replace(grasp, width=grasp.width * _CENTER_FRACTION),
            jaw_height=rect.jaw_height,
        )
        mask = kernels.quad_mask(region.vertices, h, w).astype(bool)
        if not mask.any():
            continue
        quality[mask] = 1.0
        sin2[mask] = math.sin(2.0 * grasp.angle)
        cos2[mask] = math.cos(2.0 * grasp.angle)
        width[mask] = min(grasp.width / width_max, 1.0)
    return GraspMapSet(quality=quality, sin2=sin2, cos2=cos2, width=width)


def _peak_component(smoothed, peak_value):
    """Connected half-max region containing the first (row-major) argmax.

    Ties between equal maxima resolve through the row-major argmax, i.e.
    lexicographic (row, col) order.
    """
    above = smoothed >= 0.5 * peak_value
    labels, _ = ndimage.label(above, structure=np.ones((3, 3), dtype=int))
    first = np.unravel_index(int(np.argmax(smoothed)), smoothed.shape)
    return labels == labels[first]


def decode_grasps(maps, k=1, sigma=PEAK_SIGMA_PX, width_max=WIDTH_MAX_PX):
    """Extract up to ``k`` grasps from predicted maps, best first.

    The quality plane is smoothed with an isotropic Gaussian before peak
    extraction. Each peak is the rounded centroid of the connected half-max
    region around the current maximum, so the symmetric plateaus produced by
    encoded targets decode to their centers. That region plus a disk around
    the peak is suppressed before the next peak is taken. If the smoothed
    plane carries no positive evidence at all, the single deterministic
    tie-break grasp at the first (row, col) argmax is returned with its raw
    quality.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    q = np.asarray(maps.quality, dtype=np.float64)
    smoothed = ndimage.gaussian_filter(q, sigma) if sigma > 0 else q.copy()
    h, w = q.shape
    grasps = []
    for i in range(k):
        peak_value = float(smoothed.max())
        if peak_value <= 0.0:
            if i == 0:
                r, c = np.unravel_index(int(np.argmax(smoothed)), smoothed.shape)
                grasps.append(_read_grasp(maps, int(r), int(c), width_max))
            break
        component = _peak_component(smoothed, peak_value)
        rows, cols = np.nonzero(component)
        r = int(math.floor(rows.mean() + 0.5))
        c = int(math.floor(cols.mean() + 0.5))
        grasp = _read_grasp(maps, r, c, width_max)
        grasps.append(grasp)
        radius = max(grasp.width / 2.0 + 2.0 * sigma, 4.0 * sigma, 2.0)
        rr, cc = np.ogrid[:h, :w]
        suppress = component | ((rr - r) ** 2 + (cc - c) ** 2 <= radius**2)
        smoothed[suppress] = -np.inf
    grasps.sort(key=lambda g: -g.quality)
    return grasps


def _read_grasp(maps, r, c, width_max):
    s = float(maps.sin2[r, c])
    co = float(maps.cos2[r, c])
    if s == 0.0 and co == 0.0:
        angle = 0.0  # no angle evidence at this pixel
    else:
        angle = wrap_angle(0.5 * math.atan2(s, co))
    width = float(np.clip(maps.width[r, c], 0.0, 1.0)) * width_max
    return ImageGrasp(
        center=(float(r), float(c)),
        angle=angle,
        width=width,
        quality=float(np.clip(maps.quality[r, c], 0.0, 1.0)),
    )
