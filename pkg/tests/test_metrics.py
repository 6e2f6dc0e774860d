import math

import numpy as np
import pytest

from stegodoc import psnr, rates, ssim_global

from synthimages import textured_host


def test_psnr_identical_is_infinite():
    img = textured_host(32, 32, 0)
    assert psnr(img, img) == math.inf


def test_psnr_single_gray_level_difference():
    a = np.full((64, 64), 255, np.uint8)
    b = np.full((64, 64), 254, np.uint8)
    assert psnr(a, b) == pytest.approx(10 * math.log10(255**2), abs=1e-9)
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-4)


def test_psnr_peak_comes_from_first_image():
    a = textured_host(32, 32, 1)
    b = (a // 2).astype(np.uint8)
    mse = float(np.mean((a.astype(float) - b.astype(float)) ** 2))
    assert psnr(a, b) == pytest.approx(10 * math.log10(int(a.max()) ** 2 / mse))
    assert psnr(b, a) == pytest.approx(10 * math.log10(int(b.max()) ** 2 / mse))
    assert psnr(a, b) != psnr(b, a)


def test_psnr_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4), np.uint8), np.zeros((4, 5), np.uint8))


def test_ssim_identical_is_one():
    img = textured_host(40, 40, 2)
    assert ssim_global(img, img) == pytest.approx(1.0, abs=1e-12)


def test_ssim_anticorrelated_pattern():
    # symmetric two-level pattern: means match, variances match, correlation -1
    a = np.full((20, 20), 100, np.uint8)
    a[:, 10:] = 155
    b = (255 - a.astype(int)).astype(np.uint8)
    assert ssim_global(a, b) == pytest.approx(-1.0, abs=1e-12)


def test_ssim_undefined_for_constant_images():
    flat = np.full((16, 16), 7, np.uint8)
    tex = textured_host(16, 16, 3)
    assert ssim_global(flat, tex) is None
    assert ssim_global(tex, flat) is None
    assert ssim_global(flat, flat) is None


def test_ssim_bounded():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a = rng.integers(0, 256, (18, 22)).astype(np.uint8)
        b = rng.integers(0, 256, (18, 22)).astype(np.uint8)
        assert abs(ssim_global(a, b)) <= 1 + 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_uniform_lsb_noise_lands_near_38db(seed):
    rng = np.random.default_rng(seed)
    host = textured_host(256, 256, 10 + seed)
    noisy = (host & 0xF8) | rng.integers(0, 8, host.shape).astype(np.uint8)
    assert 36.5 <= psnr(host, noisy) <= 39.5


def test_rates_page_scale():
    rate, physical = rates((512, 512), (1774, 1288), 43000)
    assert rate == pytest.approx(8.716, abs=1e-3)
    assert physical == pytest.approx(12 * 43000 / 512 / 512)


def test_rates_zero_words_and_validation():
    rate, physical = rates((100, 100), (10, 10), 0)
    assert rate == pytest.approx(0.01)
    assert physical == 0.0
    with pytest.raises(ValueError):
        rates((0, 100), (10, 10), 1)
    with pytest.raises(ValueError):
        rates((100, 100), (10, 10), -1)
