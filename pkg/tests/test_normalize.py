"""Network input normalization."""

import numpy as np
import pytest

from graspgen.dataset import (
    InputTensor,
    SceneRecord,
    augment,
    center_crop,
    normalize_depth,
    normalize_input,
)
from graspgen.errors import InvalidInputError, InvalidSceneError


def flat_scene(shape=(240, 320), rgb_value=128, depth_value=0.8, positives=()):
    return SceneRecord(
        id="flat",
        rgb=np.full((*shape, 3), rgb_value, dtype=np.uint8),
        depth=np.full(shape, depth_value, dtype=np.float32),
        positives=list(positives),
        negatives=[],
    )


class TestCenterCrop:
    def test_offsets_and_shape(self):
        scene = flat_scene()
        cropped, (top, left) = center_crop(scene)
        assert cropped.rgb.shape == (224, 224, 3)
        assert cropped.depth.shape == (224, 224)
        assert (top, left) == (8.0, 48.0)

    def test_rects_shifted(self):
        from graspgen.core import GraspRectangle

        rect = GraspRectangle([(100.0, 100.0), (100.0, 120.0), (110.0, 120.0), (110.0, 100.0)])
        scene = flat_scene(positives=[rect])
        cropped, (top, left) = center_crop(scene)
        np.testing.assert_allclose(
            cropped.positives[0].vertices, rect.vertices - [top, left]
        )

    def test_too_small_raises(self):
        with pytest.raises(InvalidInputError):
            center_crop(flat_scene(shape=(100, 100)))


class TestNormalizeDepth:
    def test_constant_depth_becomes_zero(self):
        out = normalize_depth(np.full((32, 32), 0.7))
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_zero_pixels_inpainted_before_centering(self):
        depth = np.full((16, 16), 1.0)
        depth[3, 3] = 0.0  # missing
        out = normalize_depth(depth)
        np.testing.assert_allclose(out, 0.0, atol=1e-12)

    def test_clipping(self):
        depth = np.ones((8, 8))
        depth[0, 0] = 100.0
        out = normalize_depth(depth)
        assert out.max() <= 1.0
        assert out.min() >= -1.0

    def test_all_missing_raises(self):
        with pytest.raises(InvalidSceneError):
            normalize_depth(np.zeros((8, 8)))


class TestNormalizeInput:
    def test_rgbd_shape_and_dtype(self, scenes):
        tensor = normalize_input(scenes[0], mode="rgbd")
        assert tensor.data.shape == (4, 224, 224)
        assert tensor.data.dtype == np.float32

    def test_rgb_mode_three_channels(self, scenes):
        tensor = normalize_input(scenes[0], mode="rgb")
        assert tensor.data.shape == (3, 224, 224)

    def test_constant_scene_is_all_zero(self):
        tensor = normalize_input(flat_scene())
        np.testing.assert_allclose(tensor.data, 0.0, atol=1e-7)

    def test_rgb_mean_centered(self, scenes):
        tensor = normalize_input(scenes[0], mode="rgb")
        # Scalar mean over all pixels and channels is subtracted.
        assert abs(float(tensor.data.mean())) < 1e-6

    def test_depth_channel_bounds(self, scenes):
        tensor = normalize_input(scenes[0], mode="rgbd")
        assert tensor.data[3].min() >= -1.0
        assert tensor.data[3].max() <= 1.0

    def test_bad_mode_raises(self, scenes):
        with pytest.raises(InvalidInputError):
            normalize_input(scenes[0], mode="grayscale")

    def test_transform_metadata_recorded(self, scenes):
        out, t = augment(scenes[0], 7)
        tensor = normalize_input(out, transform=t)
        assert tensor.rotation == t.rotation
        assert tensor.scale == t.zoom
        np.testing.assert_allclose(tensor.crop_offset, t.crop_offset)

    def test_center_crop_offset_recorded(self, scenes):
        tensor = normalize_input(scenes[0])
        assert tensor.crop_offset == (8.0, 48.0)

    def test_input_tensor_validation(self):
        with pytest.raises(InvalidInputError):
            InputTensor(np.zeros((2, 224, 224), np.float32))
        with pytest.raises(InvalidInputError):
            InputTensor(np.zeros((224, 224), np.float32))
