"""Backend parity and correctness of the hot kernels."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from graspgen import kernels
from graspgen.kernels import numba_impl, numpy_impl


def random_quad(rng, lo=-5.0, hi=40.0):
    center = rng.uniform(lo + 10, hi - 10, size=2)
    psi = rng.uniform(-math.pi / 2, math.pi / 2)
    half_w = rng.uniform(2, 12)
    half_h = rng.uniform(1, 8)
    axis = np.array([-math.sin(psi), math.cos(psi)])
    normal = np.array([math.cos(psi), math.sin(psi)])
    return np.stack(
        [
            center - half_w * axis - half_h * normal,
            center + half_w * axis - half_h * normal,
            center + half_w * axis + half_h * normal,
            center - half_w * axis + half_h * normal,
        ]
    )


class TestBackendParity:
    def test_quad_mask_bitwise_equal(self, rng):
        for _ in range(100):
            quad = random_quad(rng)
            a = numpy_impl.quad_mask(quad, 48, 48)
            b = numba_impl.quad_mask(quad, 48, 48)
            np.testing.assert_array_equal(a, b)

    def test_quad_pair_counts_equal(self, rng):
        for _ in range(100):
            qa, qb = random_quad(rng), random_quad(rng)
            assert numpy_impl.quad_pair_counts(qa, qb) == numba_impl.quad_pair_counts(qa, qb)

    def test_fill_missing_bitwise_equal(self, rng):
        vals = rng.normal(size=(40, 50))
        valid = rng.random((40, 50)) > 0.3
        valid[0, 0] = True  # keep at least one source
        a = numpy_impl.fill_missing(vals, valid)
        b = numba_impl.fill_missing(vals, valid)
        np.testing.assert_array_equal(a, b)


class TestQuadMask:
    def test_axis_aligned_exact(self):
        # [2, 6) x [3, 10): pixel centers inside are rows 2..5, cols 3..9.
        quad = np.array([(2.0, 3.0), (2.0, 10.0), (6.0, 10.0), (6.0, 3.0)])
        mask = kernels.quad_mask(quad, 12, 14)
        expected = np.zeros((12, 14), dtype=np.uint8)
        expected[2:6, 3:10] = 1
        np.testing.assert_array_equal(mask, expected)

    def test_winding_invariance(self, rng):
        quad = random_quad(rng)
        np.testing.assert_array_equal(
            kernels.quad_mask(quad, 48, 48), kernels.quad_mask(quad[::-1], 48, 48)
        )

    def test_clipped_outside_image(self):
        quad = np.array([(-10.0, -10.0), (-10.0, -2.0), (-4.0, -2.0), (-4.0, -10.0)])
        assert kernels.quad_mask(quad, 20, 20).sum() == 0

    def test_partial_clip(self):
        quad = np.array([(-2.0, -2.0), (-2.0, 3.0), (3.0, 3.0), (3.0, -2.0)])
        mask = kernels.quad_mask(quad, 20, 20)
        assert mask[:3, :3].all()
        assert mask.sum() == 9


class TestQuadPairCounts:
    def test_identical(self):
        quad = np.array([(0.0, 0.0), (0.0, 10.0), (5.0, 10.0), (5.0, 0.0)])
        inter, union = kernels.quad_pair_counts(quad, quad)
        assert inter == union == 50

    def test_disjoint(self):
        a = np.array([(0.0, 0.0), (0.0, 4.0), (4.0, 4.0), (4.0, 0.0)])
        b = a + 100.0
        inter, union = kernels.quad_pair_counts(a, b)
        assert inter == 0
        assert union == 32

    def test_half_overlap_counts(self):
        # Two 10x10 squares offset by 5 columns: inter 50, union 150.
        a = np.array([(0.0, 0.0), (0.0, 10.0), (10.0, 10.0), (10.0, 0.0)])
        b = a + np.array([0.0, 5.0])
        assert kernels.quad_pair_counts(a, b) == (50, 150)

    def test_negative_coordinates_supported(self):
        a = np.array([(-8.0, -8.0), (-8.0, -2.0), (-2.0, -2.0), (-2.0, -8.0)])
        inter, union = kernels.quad_pair_counts(a, a)
        assert inter == union == 36


class TestFillMissing:
    def test_single_hole_is_neighbor_mean(self):
        vals = np.arange(9, dtype=np.float64).reshape(3, 3)
        valid = np.ones((3, 3), dtype=bool)
        valid[1, 1] = False
        out = kernels.fill_missing(vals, valid)
        neighbors = [0, 1, 2, 3, 5, 6, 7, 8]
        assert out[1, 1] == pytest.approx(np.mean(neighbors))
        vals[1, 1] = out[1, 1]
        np.testing.assert_array_equal(out, vals)

    def test_valid_pixels_untouched(self, rng):
        vals = rng.normal(size=(20, 20))
        valid = rng.random((20, 20)) > 0.5
        valid[3, 4] = True
        out = kernels.fill_missing(vals, valid)
        np.testing.assert_array_equal(out[valid], vals[valid])

    def test_fills_everything(self, rng):
        vals = rng.normal(size=(30, 30))
        valid = np.zeros((30, 30), dtype=bool)
        valid[0, 0] = True
        out = kernels.fill_missing(vals, valid)
        assert np.isfinite(out).all()

    def test_all_missing_raises(self):
        with pytest.raises(ValueError):
            kernels.fill_missing(np.zeros((4, 4)), np.zeros((4, 4), dtype=bool))

    def test_no_missing_returns_copy(self):
        vals = np.ones((4, 4))
        out = kernels.fill_missing(vals, np.ones((4, 4), dtype=bool))
        np.testing.assert_array_equal(out, vals)
        assert out is not vals


class TestBackendSelection:
    def test_default_backend_is_numba(self):
        assert kernels.BACKEND == "numba"

    def test_env_flag_forces_numpy(self):
        code = "from graspgen import kernels; print(kernels.BACKEND)"
        env = dict(os.environ, GRASPGEN_NO_NUMBA="1")
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == "numpy"
