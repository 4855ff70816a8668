"""Seeded similarity-transform augmentation: rotate, zoom, crop.

A transform is sampled per scene draw (rotation uniform over [-pi/2, pi/2),
zoom over [0.85, 1.15], crop centered on the object centroid jittered by up
to +/-16 px) and applied identically to the image, the depth, and every
rectangle. Rectangles with any vertex landing outside the crop are dropped;
draws that keep zero positive rectangles are resampled up to 10 times before
falling back to the plain centered crop.
"""

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .cornell import SceneRecord
from ..core.geometry import GraspRectangle

OUT_SIZE = 224
ZOOM_RANGE = (0.85, 1.15)
JITTER_PX = 16.0
MAX_RESAMPLES = 10
DEFAULT_MULTIPLICITY = 10  # draws per scene; 5110 positives -> ~51,000 grasps


@dataclass(frozen=True)
class AugmentTransform:
    """Similarity transform mapping source pixels into the 224x224 crop.

    ``matrix`` is the 2x3 affine in (x, y) = (col, row) coordinates; the
    sampled parameters ride along as metadata.
    """

    matrix: np.ndarray
    rotation: float
    zoom: float
    source_center: tuple

    @property
    def crop_offset(self):
        """Source (row, col) that lands on the output's top-left corner."""
        return self.source_point((0.0, 0.0))

    def source_point(self, point):
        """Map an output (row, col) back into the source image."""
        a = self.matrix[:, :2]
        t = self.matrix[:, 2]
        xy = np.linalg.solve(a, np.array([point[1], point[0]]) - t)
        return (float(xy[1]), float(xy[0]))


def object_center(scene):
    """Centroid of all positive-rectangle vertices, else the image center."""
    if scene.positives:
        pts = np.concatenate([r.vertices for r in scene.positives])
        return (float(pts[:, 0].mean()), float(pts[:, 1].mean()))
    h, w = scene.shape
    return (h / 2.0, w / 2.0)


def build_transform(center, rotation, zoom, out_size=OUT_SIZE):
    """Affine taking source point ``center`` (row, col) to the crop center."""
    cos, sin = math.cos(rotation), math.sin(rotation)
    a = zoom * np.array([[cos, -sin], [sin, cos]], dtype=np.float64)
    src_xy = np.array([center[1], center[0]], dtype=np.float64)
    out_xy = np.array([out_size / 2.0, out_size / 2.0])
    t = out_xy - a @ src_xy
    return np.hstack([a, t[:, None]])


def sample_transform(scene, rng, out_size=OUT_SIZE):
    rotation = float(rng.uniform(-math.pi / 2, math.pi / 2))
    zoom = float(rng.uniform(*ZOOM_RANGE))
    base = object_center(scene)
    center = (
        base[0] + float(rng.uniform(-JITTER_PX, JITTER_PX)),
        base[1] + float(rng.uniform(-JITTER_PX, JITTER_PX)),
    )
    matrix = build_transform(center, rotation, zoom, out_size)
    return AugmentTransform(matrix, rotation, zoom, center)


def identity_transform(scene, out_size=OUT_SIZE):
    """Plain centered crop: no rotation, no zoom, no jitter."""
    center = object_center(scene)
    return AugmentTransform(build_transform(center, 0.0, 1.0, out_size), 0.0, 1.0, center)


def transform_rects(transform, rects, out_size=OUT_SIZE):
    """Map rectangles through the transform, dropping any that leave the crop."""
    a = transform.matrix[:, :2]
    t = transform.matrix[:, 2]
    kept = []
    for rect in rects:
        xy = rect.vertices[:, ::-1]  # (row, col) -> (x, y)
        out_xy = xy @ a.T + t
        out = out_xy[:, ::-1]
        if (out >= 0).all() and (out < out_size).all():
            kept.append(GraspRectangle(out.copy()))
    return kept


def apply_transform(scene, transform, out_size=OUT_SIZE):
    """Warp image, depth, and rectangles into the crop frame."""
    m = transform.matrix
    size = (out_size, out_size)
    rgb = cv2.warpAffine(
        scene.rgb, m, size, flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE
    )
    depth = cv2.warpAffine(
        scene.depth, m, size, flags=cv2.INTER_NEAREST, borderMode=cv2.BORDER_REPLICATE
    )
    return SceneRecord(
        id=scene.id,
        rgb=rgb,
        depth=depth,
        positives=transform_rects(transform, scene.positives, out_size),
        negatives=transform_rects(transform, scene.negatives, out_size),
    )


def augment(scene, seed, out_size=OUT_SIZE):
    """Sample and apply one augmentation; returns (scene, transform).

    Draws are resampled while they keep zero positive rectangles, up to
    MAX_RESAMPLES, after which the unaugmented centered crop is returned.
    """
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RESAMPLES):
        transform = sample_transform(scene, rng, out_size)
        out = apply_transform(scene, transform, out_size)
        if out.positives or not scene.positives:
            return out, transform
    transform = identity_transform(scene, out_size)
    return apply_transform(scene, transform, out_size), transform


def augmented_grasp_count(scenes, multiplicity=DEFAULT_MULTIPLICITY, seed=0):
    """Total positive rectangles over ``multiplicity`` draws of each scene."""
    from .splits import derive_seed

    total = 0
    for scene in scenes:
        for m in range(multiplicity):
            out, _ = augment(scene, derive_seed(seed, scene.id, m))
            total += len(out.positives)
    return total
