"""Scene -> network input normalization.

RGB is scaled to [0, 1] and mean-centered per image (scalar mean over all
pixels and channels); depth is inpainted, mean-centered, and clipped to
[-1, 1]. Channels stack in (R, G, B, D) order for the rgbd mode and
(R, G, B) for rgb.
"""

from dataclasses import dataclass, field

import numpy as np

from .augment import OUT_SIZE
from .cornell import SceneRecord
from .. import kernels
from ..errors import InvalidInputError, InvalidSceneError

MODES = ("rgbd", "rgb")


@dataclass
class InputTensor:
    """Normalized n x 224 x 224 input plus the geometry that produced it."""

    data: np.ndarray
    crop_offset: tuple = (0.0, 0.0)
    scale: float = 1.0
    rotation: float = 0.0

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[0] not in (3, 4):
            raise InvalidInputError(f"bad input tensor shape {self.data.shape}")


def center_crop(scene, out_size=OUT_SIZE):
    """Crop the middle out_size x out_size window; returns (scene, offset)."""
    h, w = scene.shape
    if h < out_size or w < out_size:
        raise InvalidInputError(f"scene {scene.shape} smaller than {out_size}")
    top = (h - out_size) // 2
    left = (w - out_size) // 2
    cropped = SceneRecord(
        id=scene.id,
        rgb=scene.rgb[top : top + out_size, left : left + out_size],
        depth=scene.depth[top : top + out_size, left : left + out_size],
        positives=[r.offset(-top, -left) for r in scene.positives],
        negatives=[r.offset(-top, -left) for r in scene.negatives],
    )
    return cropped, (float(top), float(left))


def normalize_depth(depth):
    """Inpaint missing depth, center on the mean, clip to [-1, 1]."""
    depth = np.asarray(depth, dtype=np.float64)
    valid = np.isfinite(depth) & (depth > 0)
    if not valid.any():
        raise InvalidSceneError("no valid depth anywhere in scene")
    if not valid.all():
        depth = kernels.fill_missing(depth, valid)
    depth = depth - depth.mean()
    return np.clip(depth, -1.0, 1.0)


def normalize_input(scene, mode="rgbd", transform=None, out_size=OUT_SIZE):
    """Build the network InputTensor for a scene.

    Scenes larger than out_size are center-cropped first. ``transform`` is
    optional AugmentTransform metadata recorded on the tensor.
    """
    if mode not in MODES:
        raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}")
    offset = (0.0, 0.0)
    if scene.shape != (out_size, out_size):
        scene, offset = center_crop(scene, out_size)
    rgb = scene.rgb.astype(np.float64) / 255.0
    rgb = rgb - rgb.mean()
    channels = [rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]]
    if mode == "rgbd":
        channels.append(normalize_depth(scene.depth))
    data = np.stack(channels).astype(np.float32)
    if transform is not None:
        return InputTensor(
            data,
            crop_offset=transform.crop_offset,
            scale=transform.zoom,
            rotation=transform.rotation,
        )
    return InputTensor(data, crop_offset=offset)
