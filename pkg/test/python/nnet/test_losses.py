from __future__ import annotations

import math
from unittest import TestCase

import torch

from heritage.revive.exceptions import DimensionError
from heritage.revive.nnet import (
    DTYPE,
    FeaturePyramid,
    IdentityExtractor,
    PatchDiscriminator,
    adversarial_losses,
    check_gradients,
    colorful_loss,
    kl_loss,
    masked_pixel_loss,
    perceptual_loss,
    pixel_loss,
)


def rand(*shape: int, seed: int, scale: float = 1.0) -> torch.Tensor:
    gen = torch.Generator().manual_seed(seed)
    return (scale * torch.randn(*shape, generator=gen, dtype=DTYPE)).requires_grad_(True)


def constant_discriminator(x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
    return x.new_zeros(x.shape[0], 1, 1, 1) * x.mean(), [x]


class TestPixelLoss(TestCase):
    def test_values(self):
        target = torch.zeros(2, 1, 4, 4, dtype=DTYPE)
        assert pixel_loss(target, target).item() == 0.0
        assert math.isclose(pixel_loss(target + 0.5, target).item(), 0.125)
        assert math.isclose(pixel_loss(target + 2.0, target).item(), 1.5)
        assert math.isclose(pixel_loss(target - 2.0, target, smooth=False).item(), 2.0)

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            pixel_loss(torch.zeros(1, 1, 4, 4, dtype=DTYPE), torch.zeros(1, 1, 4, 5, dtype=DTYPE))

    def test_gradient(self):
        for seed in (0, 1, 2):
            target = rand(1, 1, 8, 8, seed=seed + 10, scale=3.0).detach()
            assert check_gradients(lambda p, t=target: pixel_loss(p, t), [rand(1, 1, 8, 8, seed=seed, scale=3.0)])
            assert check_gradients(
                lambda p, t=target: pixel_loss(p, t, smooth=False), [rand(1, 1, 8, 8, seed=seed, scale=3.0)]
            )


class TestAdversarialLosses(TestCase):
    def test_identical_inputs_match_features(self):
        disc = PatchDiscriminator(1, base_channels=4)
        x = rand(2, 1, 16, 16, seed=0).detach()
        assert adversarial_losses(disc, x, x.clone()).feature_match.item() == 0.0

    def test_constant_discriminator(self):
        x = torch.ones(1, 1, 4, 4, dtype=DTYPE)
        losses = adversarial_losses(constant_discriminator, x, 2 * x)
        assert losses.gen.item() == 0.0
        assert losses.disc.item() == 2.0

    def test_generator_gradient(self):
        for seed in (0, 1, 2):
            torch.manual_seed(seed)
            disc = PatchDiscriminator(1, base_channels=4)
            real = rand(1, 1, 8, 8, seed=seed + 20).detach()
            assert check_gradients(
                lambda f, d=disc, r=real: adversarial_losses(d, r, f).gen, [rand(1, 1, 8, 8, seed=seed)]
            )
            assert check_gradients(
                lambda f, d=disc, r=real: adversarial_losses(d, r, f).feature_match, [rand(1, 1, 8, 8, seed=seed)]
            )

    def test_disc_loss_does_not_reach_the_generator(self):
        disc = PatchDiscriminator(1, base_channels=4)
        fake = rand(1, 1, 8, 8, seed=1)
        adversarial_losses(disc, rand(1, 1, 8, 8, seed=2).detach(), fake).disc.backward()
        assert fake.grad is None


class TestKlLoss(TestCase):
    def test_values(self):
        zeros = torch.zeros(3, dtype=DTYPE)
        assert kl_loss(zeros, zeros).item() == 0.0
        assert math.isclose(kl_loss(torch.ones(3, dtype=DTYPE), zeros).item(), 0.5)
        logvar = torch.full((3,), math.log(4.0), dtype=DTYPE)
        assert math.isclose(kl_loss(zeros, logvar).item(), 0.5 * (4.0 - 1.0 - math.log(4.0)), rel_tol=1e-12)

    def test_gradient(self):
        for seed in (0, 1, 2):
            assert check_gradients(kl_loss, [rand(2, 4, seed=seed), rand(2, 4, seed=seed + 5)])


class TestPerceptualLoss(TestCase):
    def test_identical(self):
        x = rand(1, 3, 16, 16, seed=0).detach()
        assert perceptual_loss(x, x, FeaturePyramid(3)).item() == 0.0

    def test_identity_extractor_is_l1(self):
        a = rand(1, 2, 8, 8, seed=0).detach()
        b = rand(1, 2, 8, 8, seed=1).detach()
        assert torch.isclose(perceptual_loss(a, b, IdentityExtractor()), pixel_loss(a, b, smooth=False))

    def test_non_negative(self):
        pyramid = FeaturePyramid(1, widths=(4, 4, 4), seed=3)
        for seed in range(100):
            a = rand(1, 1, 8, 8, seed=seed).detach()
            b = rand(1, 1, 8, 8, seed=seed + 1000).detach()
            assert perceptual_loss(a, b, pyramid).item() >= 0.0

    def test_gradient(self):
        pyramid = FeaturePyramid(1, widths=(2, 2, 2), seed=1)
        target = rand(1, 1, 8, 8, seed=7).detach()
        for seed in (0, 1, 2):
            assert check_gradients(lambda p: perceptual_loss(p, target, pyramid), [rand(1, 1, 8, 8, seed=seed)])


class TestColorfulLoss(TestCase):
    def test_zero_chroma_is_dull(self):
        assert colorful_loss(torch.zeros(2, 2, 4, 4, dtype=DTYPE)).item() == 1.0

    def test_vivid_chroma_is_clamped(self):
        ab = torch.zeros(1, 2, 4, 4, dtype=DTYPE)
        ab[:, 0, :, :2] = 60.0
        ab[:, 0, :, 2:] = -60.0
        assert colorful_loss(ab).item() == 0.0

    def test_statistic(self):
        ab = torch.zeros(1, 2, 2, 2, dtype=DTYPE)
        ab[0, 0] = 10.0
        ab[0, 1] = torch.tensor([[0.0, 20.0], [0.0, 20.0]], dtype=DTYPE)
        # std(a)=0, std(b)=10, |mean|=|(10, 10)|
        expected = 1.0 - (10.0 + 0.3 * math.hypot(10.0, 10.0)) / 40.0
        assert math.isclose(colorful_loss(ab).item(), expected, rel_tol=1e-6)

    def test_gradient(self):
        for seed in (0, 1, 2):
            assert check_gradients(colorful_loss, [rand(1, 2, 8, 8, seed=seed, scale=5.0)])


class TestMaskedPixelLoss(TestCase):
    def test_values(self):
        pred = torch.zeros(1, 2, 4, 4, dtype=DTYPE)
        target = torch.full((1, 2, 4, 4), 100.0, dtype=DTYPE)
        target[..., :2] = 2.0
        mask = torch.zeros(1, 1, 4, 4, dtype=DTYPE)
        assert masked_pixel_loss(pred, target, mask).item() == 0.0
        mask[..., :2] = 1.0
        assert masked_pixel_loss(pred, target, mask).item() == 2.0
        assert torch.isclose(masked_pixel_loss(pred, target, torch.ones_like(mask)), pixel_loss(pred, target, False))

    def test_identical_inputs(self):
        x = rand(1, 2, 4, 4, seed=0).detach()
        mask = (rand(1, 1, 4, 4, seed=1).detach() > 0).to(DTYPE)
        assert masked_pixel_loss(x, x, mask).item() == 0.0

    def test_unmasked_target_is_ignored(self):
        pred = rand(1, 2, 4, 4, seed=0).detach()
        target = rand(1, 2, 4, 4, seed=1).detach()
        mask = torch.zeros(1, 1, 4, 4, dtype=DTYPE)
        mask[..., 0, :] = 1.0
        before = masked_pixel_loss(pred, target, mask)
        target[..., 3, 3] += 50.0
        assert masked_pixel_loss(pred, target, mask).item() == before.item()

    def test_gradient(self):
        mask = torch.zeros(1, 1, 8, 8, dtype=DTYPE)
        mask[..., 2:6, 2:6] = 1.0
        target = rand(1, 2, 8, 8, seed=3).detach()
        for seed in (0, 1, 2):
            assert check_gradients(lambda p: masked_pixel_loss(p, target, mask), [rand(1, 2, 8, 8, seed=seed)])
