from __future__ import annotations

import math
from unittest import TestCase

import numpy as np

from heritage.revive.exceptions import DimensionError
from heritage.revive.imagecore import RgbImage
from heritage.revive.metrics import (
    apply_mask_policy,
    colorfulness,
    delta_colorfulness,
    psnr,
    ssim,
    ssim_luminance,
)
from heritage.revive.prior import PriorMask

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2


def random_image(rng: np.random.Generator, size: int = 16) -> RgbImage:
    return RgbImage(rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8))


def psnr_oracle(a: RgbImage, b: RgbImage) -> float:
    total = 0.0
    height, width = a.shape
    for row in range(height):
        for col in range(width):
            for channel in range(3):
                total += (float(a.pixels[row, col, channel]) - float(b.pixels[row, col, channel])) ** 2
    return 10 * math.log10(255.0**2 / (total / (height * width * 3)))


def colorfulness_oracle(img: RgbImage) -> float:
    rg, yb = [], []
    for red, green, blue in img.pixels.reshape(-1, 3).astype(float):
        rg.append(red - green)
        yb.append(0.5 * (red + green) - blue)
    n = len(rg)
    mean_rg, mean_yb = sum(rg) / n, sum(yb) / n
    var_rg = sum((v - mean_rg) ** 2 for v in rg) / n
    var_yb = sum((v - mean_yb) ** 2 for v in yb) / n
    return math.sqrt(var_rg + var_yb) + 0.3 * math.sqrt(mean_rg**2 + mean_yb**2)


class TestPsnr(TestCase):
    def test_identical_is_infinite(self):
        img = random_image(np.random.default_rng(0))
        assert psnr(img, img) == math.inf

    def test_black_white(self):
        assert psnr(RgbImage.uniform((0, 0, 0), 8, 8), RgbImage.uniform((255, 255, 255), 8, 8)) == 0.0

    def test_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a, b = random_image(rng), random_image(rng)
            self.assertAlmostEqual(psnr(a, b), psnr_oracle(a, b), delta=1e-9)
            assert psnr(a, b) == psnr(b, a)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            psnr(RgbImage.uniform((0, 0, 0), 8, 8), RgbImage.uniform((0, 0, 0), 8, 9))


class TestSsim(TestCase):
    def test_self_similarity(self):
        img = random_image(np.random.default_rng(0), 24)
        self.assertAlmostEqual(ssim(img, img), 1.0, delta=1e-12)

    def test_constant_images(self):
        black = RgbImage.uniform((0, 0, 0), 16, 16)
        white = RgbImage.uniform((255, 255, 255), 16, 16)
        mu_a = float(ssim_luminance(black).mean())
        mu_b = float(ssim_luminance(white).mean())
        expected = (2 * mu_a * mu_b + C1) * C2 / ((mu_a**2 + mu_b**2 + C1) * C2)
        self.assertAlmostEqual(ssim(black, white), expected, delta=1e-8)
        assert ssim(black, white) < 1e-3

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            a, b = random_image(rng), random_image(rng)
            self.assertAlmostEqual(ssim(a, b), ssim(b, a), delta=1e-12)
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_smaller_than_window(self):
        img = RgbImage.uniform((10, 20, 30), 8, 8)
        with self.assertRaises(DimensionError):
            ssim(img, img)


class TestColorfulness(TestCase):
    def test_grayscale_is_zero(self):
        rng = np.random.default_rng(0)
        gray = rng.integers(0, 256, size=(16, 16, 1), dtype=np.uint8).repeat(3, axis=2)
        assert colorfulness(RgbImage(gray)) == 0.0

    def test_pure_red(self):
        expected = 0.3 * math.sqrt(255.0**2 + 127.5**2)
        self.assertAlmostEqual(colorfulness(RgbImage.uniform((255, 0, 0), 4, 4)), expected, delta=1e-9)
        self.assertAlmostEqual(expected, 85.53, delta=0.01)

    def test_matches_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            img = random_image(rng, 8)
            self.assertAlmostEqual(colorfulness(img), colorfulness_oracle(img), delta=1e-9)

    def test_permutation_invariant(self):
        rng = np.random.default_rng(4)
        img = random_image(rng)
        flat = img.pixels.reshape(-1, 3)
        shuffled = RgbImage(flat[rng.permutation(len(flat))].reshape(img.pixels.shape))
        self.assertAlmostEqual(colorfulness(img), colorfulness(shuffled), delta=1e-9)

    def test_delta(self):
        rng = np.random.default_rng(5)
        a, b = random_image(rng), random_image(rng, 12)
        assert delta_colorfulness(a, a) == 0.0
        gray = RgbImage.uniform((90, 90, 90), 4, 4)
        assert delta_colorfulness(gray, RgbImage.uniform((10, 10, 10), 6, 6)) == 0.0
        assert delta_colorfulness(a, b) == delta_colorfulness(b, a)


class TestMaskPolicy(TestCase):
    def setUp(self):
        self.img = random_image(np.random.default_rng(0), 8)

    def test_full_mask_is_identity(self):
        assert np.array_equal(apply_mask_policy(self.img, PriorMask.full(8, 8)).pixels, self.img.pixels)

    def test_empty_mask_is_black(self):
        assert not apply_mask_policy(self.img, PriorMask.full(8, 8, False)).pixels.any()

    def test_idempotent(self):
        mask = PriorMask(np.random.default_rng(1).random((8, 8)) > 0.5)
        once = apply_mask_policy(self.img, mask)
        assert np.array_equal(apply_mask_policy(once, mask).pixels, once.pixels)
        assert not once.pixels[~mask.mask].any()

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            apply_mask_policy(self.img, PriorMask.full(4, 4))
