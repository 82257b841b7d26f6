import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lumenrl import metrics

from conftest import constant_image


class TestYCbCr:
    def test_white(self):
        y, cb, cr = metrics.rgb_to_ycbcr(constant_image(1.0))
        assert np.allclose(y, 1.0)
        assert np.allclose(cb, 0.5)
        assert np.allclose(cr, 0.5)

    def test_black(self):
        y, cb, cr = metrics.rgb_to_ycbcr(constant_image(0.0))
        assert np.allclose(y, 0.0)
        assert np.allclose(cb, 0.5)
        assert np.allclose(cr, 0.5)

    def test_pure_red(self):
        img = np.zeros((8, 8, 3))
        img[:, :, 0] = 1.0
        y, _, _ = metrics.rgb_to_ycbcr(img)
        assert np.allclose(y, 0.299)

    def test_channels_in_unit_range(self, rng):
        img = rng.random((16, 16, 3))
        y, cb, cr = metrics.rgb_to_ycbcr(img)
        for plane in (y, cb, cr):
            assert plane.min() >= 0.0 and plane.max() <= 1.0


class TestPsnr:
    def test_identical_capped(self, random_image):
        assert metrics.psnr(random_image, random_image) == 100.0

    def test_constant_offset_tenth(self):
        a = constant_image(0.4)
        b = constant_image(0.5)
        assert metrics.psnr(a, b) == pytest.approx(20.0, abs=1e-9)

    def test_constant_offset_half(self):
        assert metrics.psnr(constant_image(0.0), constant_image(0.5)) == pytest.approx(
            6.0206, abs=1e-3
        )

    def test_symmetry(self, rng):
        a, b = rng.random((8, 8, 3)), rng.random((8, 8, 3))
        assert metrics.psnr(a, b) == metrics.psnr(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            metrics.psnr(np.zeros((4, 4)), np.zeros((4, 5)))

    def test_grayscale_psnr_y_equals_rgb(self, rng):
        plane_a, plane_b = rng.random((12, 12)), rng.random((12, 12))
        a = np.repeat(plane_a[:, :, None], 3, axis=2)
        b = np.repeat(plane_b[:, :, None], 3, axis=2)
        assert metrics.psnr_y(a, b) == pytest.approx(metrics.psnr(a, b), abs=1e-9)


class TestSsim:
    def test_identical(self, rng):
        img = rng.random((16, 16, 3))
        assert metrics.ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    def test_constant_pair_closed_form(self):
        a = constant_image(0.5)
        b = constant_image(0.7)
        c1 = 0.01**2
        closed_form = (2 * 0.5 * 0.7 + c1) / (0.5**2 + 0.7**2 + c1)
        assert metrics.ssim(a, b) == pytest.approx(closed_form, abs=1e-4)

    def test_single_flipped_pixel_lowers_score(self, rng):
        a = rng.random((16, 16, 3))
        b = a.copy()
        b[8, 8] = 1.0 - b[8, 8]
        assert metrics.ssim(a, b) < 1.0

    def test_symmetry(self, rng):
        a, b = rng.random((16, 16, 3)), rng.random((16, 16, 3))
        assert metrics.ssim(a, b) == pytest.approx(metrics.ssim(b, a), abs=1e-12)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            metrics.ssim(np.zeros((8, 8)), np.zeros((8, 8)))


class TestHistogram:
    def test_constant_half_single_bin(self):
        counts = metrics.luminance_histogram(constant_image(0.5, 10, 10), 10)
        assert counts[5] == 100
        assert counts.sum() == 100

    def test_black_in_first_bin(self):
        counts = metrics.luminance_histogram(constant_image(0.0, 8, 8), 16)
        assert counts[0] == 64

    def test_white_lands_in_final_bin(self):
        counts = metrics.luminance_histogram(constant_image(1.0, 8, 8), 16)
        assert counts[-1] == 64

    @given(bins=st.integers(2, 64), seed=st.integers(0, 1000))
    @settings(max_examples=20, deadline=None)
    def test_mass_conservation(self, bins, seed):
        img = np.random.default_rng(seed).random((9, 11, 3))
        counts = metrics.luminance_histogram(img, bins)
        assert counts.sum() == 9 * 11

    def test_too_few_bins(self):
        with pytest.raises(ValueError):
            metrics.luminance_histogram(constant_image(0.5), 1)


class TestReport:
    def test_aggregate_means(self, rng):
        rows = [
            metrics.evaluate_pair(rng.random((16, 16, 3)), rng.random((16, 16, 3)),
                                  name=f"img{i}")
            for i in range(3)
        ]
        report = metrics.MetricReport(rows)
        assert report.mean_psnr_rgb == pytest.approx(
            np.mean([r["psnr_rgb"] for r in rows])
        )
        agg = report.aggregate()
        assert agg["count"] == 3
