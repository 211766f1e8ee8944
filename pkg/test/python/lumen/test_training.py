from __future__ import annotations

import math
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np
import pytest

from heritage.revive.degrade import LinearCurveParams, apply_linear_degradation
from heritage.revive.exceptions import ConfigurationError, DomainTagError, TrainingStateError
from heritage.revive.imagecore import DomainTag, LuminancePlane
from heritage.revive.lumen import (
    LumenArchitecture,
    LumenBundle,
    LumenTrainConfig,
    LuminanceCorpus,
    latent_adversary_accuracy,
    restore_luminance,
    shared_batch,
    train_mapping,
    train_vae_nd,
    train_vae_shared,
)
from heritage.revive.nnet import LrSchedule, as_tensor, freeze, parameter_checksum, read_training_log

TINY = LumenArchitecture(
    latent_channels=4, base_channels=8, depth=3, mapping_blocks=2,
    feature_dim=16, disc_channels=8, latent_disc_hidden=16,
)


def textured_plane(size: int, seed: int, tag: DomainTag) -> LuminancePlane:
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / size
    fx, fy, phase = rng.uniform(1, 4), rng.uniform(1, 4), rng.uniform(0, 2 * np.pi)
    values = 150 + 80 * np.sin(2 * np.pi * (fx * x + fy * y) + phase) + rng.normal(0, 4, size=(size, size))
    return LuminancePlane(np.clip(values, 0, 255), tag)


def corpus(n: int = 6, size: int = 48, real: bool = True) -> LuminanceCorpus:
    clean = tuple(textured_plane(size, i, DomainTag.NON_DEGRADED) for i in range(n))
    degraded = ()
    if real:
        params = LinearCurveParams(0.35, 20.0)
        sources = [textured_plane(size, 100 + i, DomainTag.NON_DEGRADED) for i in range(n)]
        degraded = tuple(
            LuminancePlane(apply_linear_degradation(p, params).values, DomainTag.REAL_DEGRADED) for p in sources
        )
    return LuminanceCorpus(clean, degraded)


def config(**overrides) -> LumenTrainConfig:
    base = {"batch_size": 2, "resolution": 32, "iterations": 3, "log_every": 1, "seed": 0}
    base.update(overrides)
    return LumenTrainConfig(**base)


class TestCorpus(TestCase):
    def test_empty_corpus(self):
        with self.assertRaises(ConfigurationError):
            LuminanceCorpus(())

    def test_wrong_tags(self):
        with self.assertRaises(DomainTagError):
            LuminanceCorpus((textured_plane(32, 0, DomainTag.REAL_DEGRADED),))

    def test_shared_batch_mixes_domains(self):
        rng = np.random.default_rng(0)
        batch, is_real = shared_batch(corpus(), 64, 32, config().sampler, 0.5, rng)
        assert batch.shape == (64, 1, 32, 32)
        assert 0 < is_real.sum() < 64

    def test_shared_batch_without_real_images(self):
        rng = np.random.default_rng(0)
        _, is_real = shared_batch(corpus(real=False), 8, 32, config().sampler, 0.5, rng)
        assert not is_real.any()


class TestTrainers(TestCase):
    def test_shared_terms(self):
        result = train_vae_shared(config(), corpus(), TINY)
        first = result.history[0]
        assert {"pix", "adv", "feat", "latent_adv", "kl"} <= set(first)
        assert math.isfinite(first["total"])
        assert first["total"] > 0
        assert set(result.modules) == {"vae_shared", "image_disc", "latent_disc"}
        assert len(result.history) == 3

    def test_nd_has_four_terms(self):
        result = train_vae_nd(config(), corpus(), TINY)
        terms = set(result.history[0]) - {"stage", "iteration", "lr", "total", "discriminator"}
        assert terms == {"pix", "adv", "feat", "kl"}

    def test_bit_reproducible(self):
        first = train_vae_nd(config(), corpus(), TINY)
        second = train_vae_nd(config(), corpus(), TINY)
        assert parameter_checksum(first["vae_nd"]) == parameter_checksum(second["vae_nd"])
        assert first.history == second.history

    def test_mapping_leaves_frozen_vaes_untouched(self):
        shared = freeze(train_vae_shared(config(iterations=2), corpus(), TINY)["vae_shared"])
        nd = freeze(train_vae_nd(config(iterations=2), corpus(), TINY)["vae_nd"])
        before = (parameter_checksum(shared), parameter_checksum(nd))
        result = train_mapping(config(), corpus(), shared, nd)
        assert (parameter_checksum(shared), parameter_checksum(nd)) == before
        terms = set(result.history[0]) - {"stage", "iteration", "lr", "total", "discriminator"}
        assert terms == {"pix", "adv", "feat", "feat_l1"}

    def test_mapping_requires_frozen_vaes(self):
        shared = train_vae_shared(config(iterations=1), corpus(), TINY)["vae_shared"]
        nd = freeze(train_vae_nd(config(iterations=1), corpus(), TINY)["vae_nd"])
        with self.assertRaises(TrainingStateError):
            train_mapping(config(), corpus(), shared, nd)

    def test_mapping_rejects_swapped_vaes(self):
        shared = freeze(train_vae_shared(config(iterations=1), corpus(), TINY)["vae_shared"])
        nd = freeze(train_vae_nd(config(iterations=1), corpus(), TINY)["vae_nd"])
        with self.assertRaises(DomainTagError):
            train_mapping(config(), corpus(), nd, shared)

    def test_latent_adversary_accuracy(self):
        result = train_vae_shared(config(iterations=1), corpus(), TINY)
        rng = np.random.default_rng(3)
        real, _ = shared_batch(corpus(), 4, 32, config().sampler, 1.0, rng)
        synthetic, _ = shared_batch(corpus(), 4, 32, config().sampler, 0.0, rng)
        accuracy = latent_adversary_accuracy(
            result["vae_shared"], result["latent_disc"], as_tensor(real), as_tensor(synthetic)
        )
        assert accuracy in {k / 8 for k in range(9)}

    def test_resume_matches_uninterrupted_run(self):
        with tempfile.TemporaryDirectory() as tmp:
            straight = train_vae_nd(config(iterations=4), corpus(), TINY, config_hash="h")
            log = Path(tmp) / "nd.jsonl"
            partial = train_vae_nd(
                config(iterations=2, checkpoint_every=2), corpus(), TINY,
                config_hash="h", log_path=log, checkpoint_dir=tmp,
            )
            assert [p.name for p in partial.checkpoints] == ["lumen_nd_000002.h5"]
            resumed = train_vae_nd(
                config(iterations=4, checkpoint_every=2), corpus(), TINY,
                config_hash="h", log_path=log, checkpoint_dir=tmp, resume_from=partial.checkpoints[0],
            )
            entries = read_training_log(log)
        assert [e["iteration"] for e in entries] == [0, 1, 2, 3]
        assert parameter_checksum(resumed["vae_nd"]) == parameter_checksum(straight["vae_nd"])

    def test_resume_refuses_other_configuration(self):
        with tempfile.TemporaryDirectory() as tmp:
            partial = train_vae_nd(config(iterations=1), corpus(), TINY, config_hash="a", checkpoint_dir=tmp)
            with self.assertRaises(TrainingStateError):
                train_vae_nd(config(), corpus(), TINY, config_hash="b", resume_from=partial.checkpoints[0])
            with self.assertRaises(TrainingStateError):
                train_vae_shared(config(), corpus(), TINY, config_hash="a", resume_from=partial.checkpoints[0])


def held_out(n: int, size: int = 32) -> tuple[list[LuminancePlane], list[LuminancePlane]]:
    params = LinearCurveParams(0.35, 20.0)
    clean = [textured_plane(size, 500 + i, DomainTag.NON_DEGRADED) for i in range(n)]
    return clean, [apply_linear_degradation(p, params) for p in clean]


@pytest.mark.slow
class TestLuminanceAcceptance(TestCase):
    """200-iteration runs at 64 x 64."""

    def setUp(self):
        self.corpus = corpus(n=20, size=96)
        self.cfg = LumenTrainConfig(
            batch_size=4, resolution=64, iterations=200, schedule=LrSchedule().scaled(200), log_every=50, seed=0
        )

    @staticmethod
    def window_means(history, key: str = "total") -> tuple[float, float]:
        values = [entry[key] for entry in history]
        return float(np.mean(values[:50])), float(np.mean(values[-50:]))

    def test_training_reduces_loss_and_restores(self):
        shared_run = train_vae_shared(self.cfg, self.corpus)
        nd_run = train_vae_nd(self.cfg, self.corpus)
        for run in (shared_run, nd_run):
            first, last = self.window_means(run.history)
            assert last < first, run.stage

        shared = freeze(shared_run["vae_shared"])
        nd = freeze(nd_run["vae_nd"])
        mapping_run = train_mapping(self.cfg, self.corpus, shared, nd)
        first, last = self.window_means(mapping_run.history, "feat_l1")
        assert last < first

        lumen = LumenBundle(shared, nd, mapping_run["mapping"], self.cfg.resolution)
        clean, degraded = held_out(20, 64)
        restored = [restore_luminance(d, lumen) for d in degraded]
        restored_err = np.mean([np.abs(r.values - c.values).mean() for r, c in zip(restored, clean)])
        degraded_err = np.mean([np.abs(d.values - c.values).mean() for d, c in zip(degraded, clean)])
        assert restored_err < degraded_err
