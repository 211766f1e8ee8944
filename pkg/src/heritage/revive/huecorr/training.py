from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import numpy as np
import torch

from ..degrade import sample_degradation
from ..exceptions import ConfigurationError
from ..imagecore import L_RANGE, LUMINANCE_8BIT_RANGE, DomainTag, LuminancePlane
from ..lumen import load_lumen_bundle
from ..nnet import (
    AdversarialTrainer,
    FeaturePyramid,
    PatchDiscriminator,
    adversarial_losses,
    as_tensor,
    colorful_loss,
    masked_pixel_loss,
    perceptual_loss,
    pixel_loss,
    seeded,
    to_numpy,
)
from .config import HueArchitecture, HueTrainConfig, LuminanceSource
from .networks import HueNetwork, normalize_lab
from .pairs import stack_pairs

if TYPE_CHECKING:
    from pathlib import Path

    from numpy.random import Generator

    from ..degrade import DegradationSamplerConfig
    from ..lumen import LumenBundle
    from ..nnet import TrainingResult
    from .pairs import HueCorpus

logger = logging.getLogger(__name__)

HUE_STAGE = "hue"
ENCODER_NAME = "conv-pyramid"


def hue_metadata(arch: HueArchitecture, resolution: int, **extra: Any) -> dict[str, Any]:
    return {"architecture": arch.to_json(), "resolution": resolution, "encoder": ENCODER_NAME, **extra}


def restored_lightness(
    lightness: torch.Tensor, lumen: LumenBundle, sampler: DegradationSamplerConfig, rng: Generator
) -> torch.Tensor:
    """Degrade a B x 1 x H x W lightness batch (L in [0, 100]) and enhance it with ``lumen``."""
    scale = LUMINANCE_8BIT_RANGE[1] / L_RANGE[1]
    degraded = []
    for plane in to_numpy(lightness[:, 0]):
        clean = LuminancePlane(np.clip(plane * scale, *LUMINANCE_8BIT_RANGE), DomainTag.NON_DEGRADED)
        degraded.append(sample_degradation(clean, sampler, rng)[0].values)
    restored = lumen.restore_batch(as_tensor(np.stack(degraded)[:, None]))
    return restored / scale


def _resolve_lumen(cfg: HueTrainConfig, lumen: LumenBundle | None) -> LumenBundle | None:
    if cfg.luminance_source is not LuminanceSource.RESTORED:
        return None
    if lumen is None:
        lumen = load_lumen_bundle(cfg.lumen_checkpoint)  # type: ignore[arg-type]
    if lumen.resolution != cfg.resolution:
        msg = f"Luminance bundle works at {lumen.resolution}, hue training at {cfg.resolution}"
        raise ConfigurationError(msg)
    return lumen


def train_hue(
    cfg: HueTrainConfig,
    corpus: HueCorpus,
    arch: HueArchitecture | None = None,
    *,
    lumen: LumenBundle | None = None,
    config_hash: str = "",
    log_path: str | Path | None = None,
    checkpoint_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainingResult:
    """Train the hue network on attenuated-prior pairs.

    Generator terms, in ab units: ``pix`` (L1 over all pixels), ``mask`` (L1 over prior
    pixels), ``per`` (fixed feature pyramid on normalised Lab), ``adv`` (hinge loss of a
    patch discriminator on normalised Lab) and ``col`` (colourfulness shortfall).

    Args:
        lumen: luminance bundle for ``luminance_source = "restored"``; loaded from
            ``cfg.lumen_checkpoint`` when omitted.

    Returns:
        A result whose modules are ``hue`` and ``hue_disc``.

    Raises:
        DimensionError: if a painting is smaller than the training crop.
        ConfigurationError: if the luminance bundle works at another resolution.
    """
    arch = arch or HueArchitecture()
    corpus.check_size(cfg.resolution)
    lumen = _resolve_lumen(cfg, lumen)
    with seeded(cfg.seed):
        net = HueNetwork(arch)
        disc = PatchDiscriminator(3, arch.disc_channels)
    extractor = FeaturePyramid(3, cfg.perceptual_widths, cfg.perceptual_seed)
    rng = np.random.default_rng(cfg.seed)
    trainer = AdversarialTrainer(
        HUE_STAGE,
        {"hue": net},
        {"hue_disc": disc},
        cfg.schedule,
        rng=rng,
        config_hash=config_hash,
        metadata=hue_metadata(arch, cfg.resolution, luminance_source=str(cfg.luminance_source), seed=cfg.seed),
        log_path=log_path,
        log_every=cfg.log_every,
        checkpoint_dir=checkpoint_dir,
        checkpoint_every=cfg.checkpoint_every,
        resume_from=resume_from,
    )
    weights = cfg.weights

    def step() -> tuple[torch.Tensor, torch.Tensor, dict[str, torch.Tensor]]:
        pairs = [corpus.sample(cfg.resolution, cfg.attenuation, rng) for _ in range(cfg.batch_size)]
        lightness, prior_ab, target_ab, mask = (as_tensor(a) for a in stack_pairs(pairs))
        if lumen is not None:
            lightness = restored_lightness(lightness, lumen, cfg.sampler, rng)
        out = net(normalize_lab(lightness, prior_ab), mask)
        pred = out.ab
        real = normalize_lab(lightness, target_ab)
        fake = normalize_lab(lightness, pred)
        image = adversarial_losses(disc, real, fake)
        terms = {
            "pix": pixel_loss(pred, target_ab, smooth=False),
            "mask": masked_pixel_loss(pred, target_ab, mask),
            "per": perceptual_loss(fake, real, extractor),
            "adv": image.gen,
            "col": colorful_loss(pred),
        }
        total = (
            weights.pix * terms["pix"]
            + weights.mask * terms["mask"]
            + weights.per * terms["per"]
            + weights.adv * terms["adv"]
            + weights.col * terms["col"]
        )
        return total, image.disc, terms

    return trainer.run(cfg.iterations, step)
