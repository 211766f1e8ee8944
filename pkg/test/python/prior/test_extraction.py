from __future__ import annotations

import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np

from heritage.revive.exceptions import DimensionError, NoSilkFoundError, RangeError
from heritage.revive.imagecore import LabImage
from heritage.revive.prior import (
    PriorConfig,
    PriorMask,
    SilkBox,
    SilkCandidates,
    SilkEstimate,
    background_mask,
    compute_prior_mask,
    estimate_silk_color,
    extract_color_prior,
    extract_prior,
    filter_silk_candidates,
)


def lab_from_chroma(a: np.ndarray, b: np.ndarray, lightness: float = 60.0) -> LabImage:
    return LabImage(np.full(a.shape, lightness), a, b)


def uniform(a: float, b: float, size: int = 8) -> LabImage:
    return lab_from_chroma(np.full((size, size), a), np.full((size, size), b))


def brute_force_gradient(a: np.ndarray, b: np.ndarray, row: int, col: int) -> float:
    height, width = a.shape
    total = 0.0
    for plane in (a, b):
        if height > 1:
            r0, r1 = (row, row + 1) if row + 1 < height else (row - 1, row)
            total += (plane[r1, col] - plane[r0, col]) ** 2
        if width > 1:
            c0, c1 = (col, col + 1) if col + 1 < width else (col - 1, col)
            total += (plane[row, c1] - plane[row, c0]) ** 2
    return float(np.sqrt(total))


class TestBackgroundMask(TestCase):
    def test_external_mask_passthrough(self):
        external = PriorMask(np.eye(8, dtype=bool))
        assert background_mask(uniform(10.0, 20.0), PriorConfig(), external) is external

    def test_external_mask_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            background_mask(uniform(10.0, 20.0), PriorConfig(), PriorMask(np.ones((4, 4), dtype=bool)))

    def test_heuristic(self):
        assert background_mask(uniform(10.0, 20.0)).mask.all()
        assert not background_mask(uniform(60.0, -40.0)).mask.any()

    def test_box_bounds_are_inclusive(self):
        corners = lab_from_chroma(np.array([[-5.0, 25.0, 25.01]]), np.array([[0.0, 40.0, 40.0]]))
        assert background_mask(corners).mask.tolist() == [[True, True, False]]


class TestFilterSilkCandidates(TestCase):
    def test_uniform_silk_image(self):
        img = uniform(10.0, 20.0)
        candidates = filter_silk_candidates(img, background_mask(img), PriorConfig())
        assert candidates.mask.all()
        assert len(candidates.coordinates) == 64

    def test_checkerboard_has_no_candidates(self):
        pattern = (np.indices((8, 8)).sum(axis=0) % 2).astype(bool)
        img = lab_from_chroma(np.where(pattern, 10.0, 60.0), np.where(pattern, 20.0, -40.0))
        bg = PriorMask.full(8, 8)
        for threshold in (0.0, 2.0, 50.0):
            cfg = PriorConfig(gradient_threshold=threshold)
            assert len(filter_silk_candidates(img, bg, cfg)) == 0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        a = np.full((16, 16), 12.0) + rng.normal(0, 0.3, (16, 16))
        b = np.full((16, 16), 22.0) + rng.normal(0, 0.3, (16, 16))
        a[:, 8:] = rng.uniform(-60, 60, (16, 8))
        b[:, 8:] = rng.uniform(-60, 60, (16, 8))
        img = lab_from_chroma(a, b)
        cfg = PriorConfig()
        bg = background_mask(img, cfg)
        candidates = filter_silk_candidates(img, bg, cfg)

        expected = set()
        for row in range(16):
            for col in range(16):
                in_box = -5.0 <= a[row, col] <= 25.0 and 0.0 <= b[row, col] <= 40.0
                smooth = brute_force_gradient(a, b, row, col) <= cfg.gradient_threshold
                if in_box and smooth:
                    expected.add((row, col))
        assert candidates.coordinates == expected
        assert len(expected) > 0


class TestEstimateSilkColor(TestCase):
    def test_single_colour(self):
        img = uniform(10.0, 20.0)
        candidates = SilkCandidates(np.ones((8, 8), dtype=bool), np.zeros((8, 8)))
        silk = estimate_silk_color(img, candidates, PriorConfig())
        assert np.allclose(silk.c_silk, (10.0, 20.0))
        assert silk.support_fraction == 1.0

    def test_majority_blob_wins(self):
        rng = np.random.default_rng(11)
        count = 20 * 20
        major = rng.permutation(count) < int(0.7 * count)
        a = np.where(major, 10.0, -40.0) + rng.normal(0, 0.5, count)
        b = np.where(major, 20.0, -30.0) + rng.normal(0, 0.5, count)
        img = lab_from_chroma(a.reshape(20, 20), b.reshape(20, 20))
        candidates = SilkCandidates(np.ones((20, 20), dtype=bool), np.zeros((20, 20)))
        silk = estimate_silk_color(img, candidates, PriorConfig(k=2))
        expected = (a[major].mean(), b[major].mean())
        assert np.hypot(silk.c_silk[0] - expected[0], silk.c_silk[1] - expected[1]) < 0.5
        assert np.isclose(silk.support_fraction, 0.7)

    def test_single_cluster_is_the_mean(self):
        rng = np.random.default_rng(3)
        img = lab_from_chroma(rng.uniform(0, 20, (6, 6)), rng.uniform(5, 30, (6, 6)))
        candidates = SilkCandidates(np.ones((6, 6), dtype=bool), np.zeros((6, 6)))
        silk = estimate_silk_color(img, candidates, PriorConfig(k=1))
        assert np.allclose(silk.c_silk, (img.a.mean(), img.b.mean()))

    def test_equal_clusters_prefer_smooth(self):
        a = np.array([[0.0, 0.0, 20.0, 20.0]])
        b = np.array([[10.0, 10.0, 30.0, 30.0]])
        gradient = np.array([[1.0, 1.0, 0.1, 0.1]])
        candidates = SilkCandidates(np.ones((1, 4), dtype=bool), gradient)
        silk = estimate_silk_color(lab_from_chroma(a, b), candidates, PriorConfig(k=2))
        assert np.allclose(silk.c_silk, (20.0, 30.0))
        assert silk.support_fraction == 0.5

    def test_no_candidates(self):
        candidates = SilkCandidates(np.zeros((8, 8), dtype=bool), np.zeros((8, 8)))
        with self.assertRaises(NoSilkFoundError) as ctx:
            estimate_silk_color(uniform(10.0, 20.0), candidates, PriorConfig())
        message = str(ctx.exception)
        assert "0 of 64 pixels" in message
        assert "a=(-5.0, 25.0), b=(0.0, 40.0)" in message


class TestPriorMask(TestCase):
    def test_uniform_silk_gives_empty_mask(self):
        assert not compute_prior_mask(uniform(10.0, 20.0), (10.0, 20.0), 20.0).mask.any()

    def test_strict_threshold(self):
        img = lab_from_chroma(np.array([[30.0, 30.1]]), np.array([[20.0, 20.0]]))
        assert compute_prior_mask(img, (10.0, 20.0), 20.0).mask.tolist() == [[False, True]]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(8)
        img = lab_from_chroma(rng.uniform(-128, 127, (32, 32)), rng.uniform(-128, 127, (32, 32)))
        mask = compute_prior_mask(img, (10.0, 20.0), 20.0).mask
        for row in range(32):
            for col in range(32):
                distance = np.sqrt((img.a[row, col] - 10.0) ** 2 + (img.b[row, col] - 20.0) ** 2)
                assert mask[row, col] == (distance > 20.0)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(-50, 50, (10, 10))
        b = rng.uniform(-50, 50, (10, 10))
        first = compute_prior_mask(lab_from_chroma(a, b), (5.0, 8.0), 20.0).mask
        second = compute_prior_mask(lab_from_chroma(a + 16.0, b - 32.0), (21.0, -24.0), 20.0).mask
        assert np.array_equal(first, second)

    def test_rejects_non_binary(self):
        with self.assertRaises(RangeError):
            PriorMask(np.array([[0, 2]]))

    def test_file(self):
        mask = PriorMask(np.eye(5, dtype=bool))
        with tempfile.TemporaryDirectory() as tmp:
            loaded = PriorMask.load(mask.save(Path(tmp) / "mask.png"))
        assert np.array_equal(loaded.mask, mask.mask)


class TestExtractPrior(TestCase):
    def setUp(self):
        rng = np.random.default_rng(6)
        self.img = lab_from_chroma(rng.uniform(-100, 100, (6, 6)), rng.uniform(-100, 100, (6, 6)))

    def test_identity_and_empty_masks(self):
        full = extract_prior(self.img, PriorMask.full(6, 6))
        assert np.array_equal(full.a, self.img.a)
        assert np.array_equal(full.b, self.img.b)
        empty = extract_prior(self.img, PriorMask.full(6, 6, value=False))
        assert not empty.stack().any()

    def test_single_pixel(self):
        mask = np.zeros((6, 6), dtype=bool)
        mask[2, 3] = True
        prior = extract_prior(self.img, PriorMask(mask))
        assert prior.a[2, 3] == self.img.a[2, 3]
        assert prior.b[2, 3] == self.img.b[2, 3]
        assert np.count_nonzero(prior.stack()) == 2

    def test_idempotent(self):
        mask = compute_prior_mask(self.img, (0.0, 0.0), 40.0)
        once = extract_prior(self.img, mask)
        twice = extract_prior(self.img.with_chroma(once), mask)
        assert np.array_equal(once.stack(), twice.stack())

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            extract_prior(self.img, PriorMask.full(5, 6))


class TestExtractColorPrior(TestCase):
    def test_painting_like_image(self):
        a = np.full((16, 16), 10.0)
        b = np.full((16, 16), 20.0)
        a[4:8, 4:8] = 60.0
        b[4:8, 4:8] = -20.0
        img = lab_from_chroma(a, b)
        prior = extract_color_prior(img)
        assert np.allclose(prior.silk.c_silk, (10.0, 20.0))
        expected = np.zeros((16, 16), dtype=bool)
        expected[4:8, 4:8] = True
        assert np.array_equal(prior.mask.mask, expected)
        assert not prior.fallback

    def test_deterministic(self):
        rng = np.random.default_rng(12)
        img = lab_from_chroma(rng.uniform(0, 20, (12, 12)), rng.uniform(5, 35, (12, 12)))
        cfg = PriorConfig(gradient_threshold=40.0)
        first = extract_color_prior(img, cfg)
        second = extract_color_prior(img, cfg)
        assert first.silk == second.silk
        assert np.array_equal(first.mask.mask, second.mask.mask)

    def test_fallback(self):
        img = uniform(60.0, -40.0)
        with self.assertLogs("heritage.revive.prior", level="WARNING"):
            prior = extract_color_prior(img)
        assert prior.fallback
        assert prior.silk.c_silk == (0.0, 0.0)
        assert prior.mask.mask.all()
        with self.assertRaises(NoSilkFoundError):
            extract_color_prior(img, fallback=False)

    def test_custom_silk_box(self):
        img = uniform(-20.0, -20.0)
        prior = extract_color_prior(img, PriorConfig(silk_box=SilkBox(a=(-30.0, -10.0), b=(-30.0, -10.0))))
        assert np.allclose(prior.silk.c_silk, (-20.0, -20.0))
        assert not prior.mask.mask.any()
        with self.assertRaises(RangeError):
            SilkBox(a=(5.0, 0.0))

    def test_silk_estimate_json(self):
        silk = SilkEstimate((3.5, 12.0), 0.75)
        with tempfile.TemporaryDirectory() as tmp:
            assert SilkEstimate.load(silk.save(Path(tmp) / "silk.json")) == silk
        with self.assertRaises(RangeError):
            SilkEstimate((0.0, 0.0), 1.5)
