from __future__ import annotations

import math
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np
import torch

from heritage.revive.exceptions import ConfigurationError, DimensionError, DomainTagError
from heritage.revive.imagecore import DomainTag, LuminancePlane
from heritage.revive.lumen import (
    LatentMapping,
    LumenArchitecture,
    LumenBundle,
    LumenTrainConfig,
    LuminanceVae,
    VaeDomain,
    load_lumen_bundle,
    mapping_latent_loss,
    restore_luminance,
    save_lumen_bundle,
    vae_forward,
)
from heritage.revive.nnet import DTYPE, kl_loss, pixel_loss, seeded

TINY = LumenArchitecture(
    latent_channels=4, base_channels=8, depth=3, mapping_blocks=2,
    feature_dim=16, disc_channels=8, latent_disc_hidden=16,
)


def plane(size: int, seed: int, tag: DomainTag = DomainTag.REAL_DEGRADED) -> LuminancePlane:
    rng = np.random.default_rng(seed)
    return LuminancePlane(rng.uniform(0, 255, size=(size, size)), tag)


def bundle(seed: int = 0, resolution: int = 32) -> LumenBundle:
    with seeded(seed):
        shared = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
        nd = LuminanceVae(TINY, VaeDomain.NON_DEGRADED)
        mapping = LatentMapping(TINY)
    return LumenBundle(shared, nd, mapping, resolution)


class TestConfig(TestCase):
    def test_defaults(self):
        arch = LumenArchitecture()
        assert arch.mapping_blocks == 6
        assert arch.feature_dim == 512
        assert arch.downsampling == 8
        assert arch.channels == (32, 64, 128, 128)
        cfg = LumenTrainConfig()
        assert cfg.resolution == 64
        assert cfg.weights.feat_l1 == 60.0
        assert cfg.rd_probability == 0.5

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            LumenTrainConfig(resolution=48)
        with self.assertRaises(ConfigurationError):
            LumenTrainConfig(resolution=16)
        with self.assertRaises(ConfigurationError):
            LumenTrainConfig(batch_size=0)
        with self.assertRaises(ConfigurationError):
            LumenArchitecture(depth=0)
        with self.assertRaises(ConfigurationError):
            LumenTrainConfig(resolution=32).check_architecture(LumenArchitecture(depth=6))

    def test_architecture_json(self):
        assert LumenArchitecture.from_json(TINY.to_json()) == TINY


class TestVae(TestCase):
    def test_shape_contract(self):
        with seeded(0):
            vae = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
        for size in (32, 64):
            out = vae_forward(vae, plane(size, 1))
            assert out.reconstruction.shape == (1, 1, size, size)
            assert out.mu.shape == (1, 4, size // 8, size // 8)
            assert out.latent.shape == out.mu.shape
            assert out.reconstruction.min() >= 0.0
            assert out.reconstruction.max() <= 255.0

    def test_posterior_mean_is_deterministic(self):
        with seeded(0):
            vae = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
        first = vae_forward(vae, plane(32, 2))
        second = vae_forward(vae, plane(32, 2))
        assert torch.equal(first.reconstruction, second.reconstruction)
        assert torch.equal(first.latent, first.mu)

    def test_reparameterisation_uses_noise(self):
        with seeded(0):
            vae = LuminanceVae(TINY, VaeDomain.NON_DEGRADED)
        a = vae_forward(vae, plane(32, 3), torch.Generator().manual_seed(1))
        b = vae_forward(vae, plane(32, 3), torch.Generator().manual_seed(1))
        c = vae_forward(vae, plane(32, 3), torch.Generator().manual_seed(2))
        assert torch.equal(a.latent, b.latent)
        assert not torch.equal(a.latent, c.latent)

    def test_untrained_losses_finite(self):
        for seed in range(5):
            with seeded(seed):
                vae = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
            x = torch.as_tensor(plane(32, seed).values, dtype=DTYPE)[None, None]
            out = vae(x, torch.Generator().manual_seed(seed))
            assert torch.isfinite(out.reconstruction).all()
            assert math.isfinite(pixel_loss(out.reconstruction, x).item())
            assert math.isfinite(kl_loss(out.mu, out.logvar).item())

    def test_dimension_mismatch(self):
        with seeded(0):
            vae = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
        with self.assertRaises(DimensionError):
            vae_forward(vae, plane(30, 0))
        with self.assertRaises(DimensionError):
            vae_forward(vae, plane(64, 0), resolution=32)


class TestMapping(TestCase):
    def test_identity_at_initialisation(self):
        with seeded(0):
            mapping = LatentMapping(TINY)
        z = torch.randn(2, 4, 4, 4, generator=torch.Generator().manual_seed(0), dtype=DTYPE)
        assert torch.equal(mapping(z), z)

    def test_latent_term_zero_for_identical_encoders(self):
        with seeded(0):
            shared = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
            mapping = LatentMapping(TINY)
        nd = LuminanceVae(TINY, VaeDomain.NON_DEGRADED)
        nd.load_state_dict(shared.state_dict())
        x = torch.as_tensor(plane(32, 4).values, dtype=DTYPE)[None, None]
        z_shared, _ = shared.encode(x)
        z_nd, _ = nd.encode(x)
        assert mapping_latent_loss(mapping, z_shared, z_nd).item() == 0.0

    def test_latent_shape_mismatch(self):
        with seeded(0):
            mapping = LatentMapping(TINY)
        with self.assertRaises(DimensionError):
            mapping_latent_loss(mapping, torch.zeros(1, 4, 4, 4, dtype=DTYPE), torch.zeros(1, 4, 2, 2, dtype=DTYPE))


class TestRestoreLuminance(TestCase):
    def test_shape_tag_and_range(self):
        restored = restore_luminance(plane(32, 5), bundle())
        assert restored.shape == (32, 32)
        assert restored.domain_tag is DomainTag.RESTORED
        assert restored.values.min() >= 0.0
        assert restored.values.max() <= 255.0

    def test_deterministic(self):
        b = bundle()
        first = restore_luminance(plane(32, 6, DomainTag.SYNTHETIC_DEGRADED), b)
        second = restore_luminance(plane(32, 6, DomainTag.SYNTHETIC_DEGRADED), b)
        assert np.array_equal(first.values, second.values)

    def test_rejects_non_degraded_input(self):
        with self.assertRaises(DomainTagError):
            restore_luminance(plane(32, 0, DomainTag.NON_DEGRADED), bundle())

    def test_resolution_mismatch(self):
        with self.assertRaises(DimensionError):
            restore_luminance(plane(64, 0), bundle())

    def test_bundle_refuses_wrong_decoder(self):
        with seeded(0):
            shared = LuminanceVae(TINY, VaeDomain.SHARED_DEGRADED)
            mapping = LatentMapping(TINY)
        with self.assertRaises(DomainTagError):
            LumenBundle(shared, shared, mapping, 32)

    def test_bundle_round_trip(self):
        original = bundle(seed=3)
        with tempfile.TemporaryDirectory() as tmp:
            path = save_lumen_bundle(Path(tmp) / "lumen.h5", original, config_hash="abc")
            loaded = load_lumen_bundle(path)
        assert loaded.resolution == 32
        assert loaded.architecture == TINY
        assert np.array_equal(
            restore_luminance(plane(32, 7), original).values, restore_luminance(plane(32, 7), loaded).values
        )
