"""The three luminance-stage trainers.

``train_vae_shared`` learns one latent space for real and synthetic degraded luminance,
``train_vae_nd`` learns the non-degraded latent space, and ``train_mapping`` learns the
translation between the two with both VAEs frozen.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import numpy as np
import torch

from ..exceptions import DomainTagError, TrainingStateError
from ..nnet import (
    AdversarialTrainer,
    LatentDiscriminator,
    PatchDiscriminator,
    adversarial_losses,
    as_tensor,
    is_frozen,
    kl_loss,
    pixel_loss,
    seeded,
)
from .config import LumenArchitecture, LumenTrainConfig
from .data import non_degraded_batch, paired_batch, shared_batch
from .networks import LatentMapping, LuminanceVae, VaeDomain, mapping_latent_loss, normalize

if TYPE_CHECKING:
    from pathlib import Path

    from torch import nn

    from ..nnet import TrainingResult
    from .data import LuminanceCorpus

logger = logging.getLogger(__name__)

SHARED_STAGE = "lumen_shared"
ND_STAGE = "lumen_nd"
MAPPING_STAGE = "lumen_mapping"


def _metadata(cfg: LumenTrainConfig, arch: LumenArchitecture) -> dict[str, Any]:
    return {"architecture": arch.to_json(), "resolution": cfg.resolution, "seed": cfg.seed}


def _make_trainer(
    stage: str,
    cfg: LumenTrainConfig,
    arch: LumenArchitecture,
    generators: dict[str, nn.Module],
    discriminators: dict[str, nn.Module],
    *,
    frozen: dict[str, nn.Module] | None = None,
    noise: torch.Generator | None = None,
    config_hash: str,
    log_path: str | Path | None,
    checkpoint_dir: str | Path | None,
    resume_from: str | Path | None,
) -> tuple[AdversarialTrainer, np.random.Generator]:
    rng = np.random.default_rng(cfg.seed)
    trainer = AdversarialTrainer(
        stage,
        generators,
        discriminators,
        cfg.schedule,
        frozen=frozen,
        rng=rng,
        noise={"noise": noise} if noise is not None else None,
        config_hash=config_hash,
        metadata=_metadata(cfg, arch),
        log_path=log_path,
        log_every=cfg.log_every,
        checkpoint_dir=checkpoint_dir,
        checkpoint_every=cfg.checkpoint_every,
        resume_from=resume_from,
    )
    return trainer, rng


def _weighted(cfg: LumenTrainConfig, terms: dict[str, torch.Tensor]) -> torch.Tensor:
    return sum(getattr(cfg.weights, name) * value for name, value in terms.items())  # type: ignore[return-value]


def train_vae_shared(
    cfg: LumenTrainConfig,
    corpus: LuminanceCorpus,
    arch: LumenArchitecture | None = None,
    *,
    config_hash: str = "",
    log_path: str | Path | None = None,
    checkpoint_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainingResult:
    """Train the VAE shared by real and synthetic degraded luminance.

    Generator terms: smooth pixel reconstruction, image hinge loss, discriminator feature
    matching, the latent adversary (real degraded latents are "real", synthetic ones
    "fake") and the KL divergence. The latent term is zero for batches holding only one
    of the two kinds.

    Returns:
        A result whose modules are ``vae_shared``, ``image_disc`` and ``latent_disc``.
    """
    arch = arch or LumenArchitecture()
    cfg.check_architecture(arch)
    if not corpus.real_degraded:
        logger.warning("No real degraded luminance in the corpus; the shared VAE sees synthetic samples only")
    with seeded(cfg.seed):
        vae = LuminanceVae(arch, VaeDomain.SHARED_DEGRADED)
        image_disc = PatchDiscriminator(1, arch.disc_channels)
        latent_disc = LatentDiscriminator(arch.latent_channels, arch.latent_disc_hidden)
    noise = torch.Generator().manual_seed(cfg.seed)
    trainer, rng = _make_trainer(
        SHARED_STAGE,
        cfg,
        arch,
        {"vae_shared": vae},
        {"image_disc": image_disc, "latent_disc": latent_disc},
        noise=noise,
        config_hash=config_hash,
        log_path=log_path,
        checkpoint_dir=checkpoint_dir,
        resume_from=resume_from,
    )

    def step() -> tuple[torch.Tensor, torch.Tensor, dict[str, torch.Tensor]]:
        batch, is_real = shared_batch(
            corpus, cfg.batch_size, cfg.resolution, cfg.sampler, cfg.rd_probability, rng
        )
        x = as_tensor(batch)
        out = vae(x, noise)
        image = adversarial_losses(image_disc, normalize(x), normalize(out.reconstruction))
        real = torch.as_tensor(is_real)
        if real.any() and (~real).any():
            latent = adversarial_losses(latent_disc, out.latent[real].detach(), out.latent[~real])
            latent_gen, latent_disc_loss = latent.gen, latent.disc
        else:
            latent_gen = latent_disc_loss = x.new_zeros(())
        terms = {
            "pix": pixel_loss(out.reconstruction, x),
            "adv": image.gen,
            "feat": image.feature_match,
            "latent_adv": latent_gen,
            "kl": kl_loss(out.mu, out.logvar),
        }
        return _weighted(cfg, terms), image.disc + latent_disc_loss, terms

    return trainer.run(cfg.iterations, step)


def train_vae_nd(
    cfg: LumenTrainConfig,
    corpus: LuminanceCorpus,
    arch: LumenArchitecture | None = None,
    *,
    config_hash: str = "",
    log_path: str | Path | None = None,
    checkpoint_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainingResult:
    """Train the non-degraded VAE: the shared-VAE objective without the latent adversary.

    Returns:
        A result whose modules are ``vae_nd`` and ``image_disc``.
    """
    arch = arch or LumenArchitecture()
    cfg.check_architecture(arch)
    with seeded(cfg.seed):
        vae = LuminanceVae(arch, VaeDomain.NON_DEGRADED)
        image_disc = PatchDiscriminator(1, arch.disc_channels)
    noise = torch.Generator().manual_seed(cfg.seed)
    trainer, rng = _make_trainer(
        ND_STAGE,
        cfg,
        arch,
        {"vae_nd": vae},
        {"image_disc": image_disc},
        noise=noise,
        config_hash=config_hash,
        log_path=log_path,
        checkpoint_dir=checkpoint_dir,
        resume_from=resume_from,
    )

    def step() -> tuple[torch.Tensor, torch.Tensor, dict[str, torch.Tensor]]:
        x = as_tensor(non_degraded_batch(corpus, cfg.batch_size, cfg.resolution, rng))
        out = vae(x, noise)
        image = adversarial_losses(image_disc, normalize(x), normalize(out.reconstruction))
        terms = {
            "pix": pixel_loss(out.reconstruction, x),
            "adv": image.gen,
            "feat": image.feature_match,
            "kl": kl_loss(out.mu, out.logvar),
        }
        return _weighted(cfg, terms), image.disc, terms

    return trainer.run(cfg.iterations, step)


def check_mapping_inputs(vae_shared: LuminanceVae, vae_nd: LuminanceVae) -> None:
    """Raise unless the two VAEs have the right domains and are frozen."""
    if vae_shared.domain is not VaeDomain.SHARED_DEGRADED:
        msg = f"The mapping source VAE must be shared_degraded, got {vae_shared.domain}"
        raise DomainTagError(msg)
    if vae_nd.domain is not VaeDomain.NON_DEGRADED:
        msg = f"The mapping target VAE must be non_degraded, got {vae_nd.domain}"
        raise DomainTagError(msg)
    for name, vae in (("shared", vae_shared), ("non-degraded", vae_nd)):
        if not is_frozen(vae):
            msg = f"The {name} VAE must be frozen before the mapping network is trained"
            raise TrainingStateError(msg)


def train_mapping(
    cfg: LumenTrainConfig,
    corpus: LuminanceCorpus,
    vae_shared: LuminanceVae,
    vae_nd: LuminanceVae,
    *,
    config_hash: str = "",
    log_path: str | Path | None = None,
    checkpoint_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> TrainingResult:
    """Train the latent mapping on synthetic (degraded, non-degraded) pairs.

    Generator terms: smooth pixel loss of the decoded mapping against the clean crop, image
    hinge loss, feature matching and ``feat_l1``, the L1 distance between mapped
    shared-domain posterior means and non-degraded posterior means.

    Raises:
        TrainingStateError: if either VAE still has trainable parameters.
        DomainTagError: if the VAEs are passed in the wrong roles.
    """
    check_mapping_inputs(vae_shared, vae_nd)
    arch = vae_shared.arch
    cfg.check_architecture(arch)
    with seeded(cfg.seed):
        mapping = LatentMapping(arch)
        image_disc = PatchDiscriminator(1, arch.disc_channels)
    trainer, rng = _make_trainer(
        MAPPING_STAGE,
        cfg,
        arch,
        {"mapping": mapping},
        {"image_disc": image_disc},
        frozen={"vae_shared": vae_shared, "vae_nd": vae_nd},
        config_hash=config_hash,
        log_path=log_path,
        checkpoint_dir=checkpoint_dir,
        resume_from=resume_from,
    )

    def step() -> tuple[torch.Tensor, torch.Tensor, dict[str, torch.Tensor]]:
        degraded, clean = paired_batch(corpus, cfg.batch_size, cfg.resolution, cfg.sampler, rng)
        x_sd, x_nd = as_tensor(degraded), as_tensor(clean)
        z_shared, _ = vae_shared.encode(x_sd)
        z_nd, _ = vae_nd.encode(x_nd)
        restored = vae_nd.decode(mapping(z_shared))
        image = adversarial_losses(image_disc, normalize(x_nd), normalize(restored))
        terms = {
            "pix": pixel_loss(restored, x_nd),
            "adv": image.gen,
            "feat": image.feature_match,
            "feat_l1": mapping_latent_loss(mapping, z_shared, z_nd),
        }
        return _weighted(cfg, terms), image.disc, terms

    return trainer.run(cfg.iterations, step)


def latent_adversary_accuracy(
    vae: LuminanceVae, latent_disc: LatentDiscriminator, real_degraded: torch.Tensor, synthetic: torch.Tensor
) -> float:
    """Fraction of posterior-mean latents the latent adversary labels correctly.

    A latent is called real degraded when its mean logit is positive. 0.5 means the two
    kinds are indistinguishable.
    """
    with torch.no_grad():
        real_logits = latent_disc(vae.encode(real_degraded)[0])[0].mean(dim=(1, 2, 3))
        fake_logits = latent_disc(vae.encode(synthetic)[0])[0].mean(dim=(1, 2, 3))
    correct = int((real_logits > 0).sum()) + int((fake_logits <= 0).sum())
    return correct / (len(real_logits) + len(fake_logits))
