"""Luminance enhancement: two VAEs and a latent mapping between their latent spaces."""

from __future__ import annotations

from .config import LumenArchitecture, LumenTrainConfig
from .data import LuminanceCorpus, non_degraded_batch, paired_batch, random_crop, shared_batch, synthetic_pair
from .inference import LumenBundle, load_lumen_bundle, restore_luminance, save_lumen_bundle
from .networks import (
    LatentMapping,
    LuminanceVae,
    VaeDomain,
    VaeOutput,
    denormalize,
    mapping_latent_loss,
    normalize,
    vae_forward,
)
from .training import (
    MAPPING_STAGE,
    ND_STAGE,
    SHARED_STAGE,
    check_mapping_inputs,
    latent_adversary_accuracy,
    train_mapping,
    train_vae_nd,
    train_vae_shared,
)

__all__ = [
    "MAPPING_STAGE",
    "ND_STAGE",
    "SHARED_STAGE",
    "LatentMapping",
    "LumenArchitecture",
    "LumenBundle",
    "LumenTrainConfig",
    "LuminanceCorpus",
    "LuminanceVae",
    "VaeDomain",
    "VaeOutput",
    "check_mapping_inputs",
    "denormalize",
    "latent_adversary_accuracy",
    "load_lumen_bundle",
    "mapping_latent_loss",
    "non_degraded_batch",
    "normalize",
    "paired_batch",
    "random_crop",
    "restore_luminance",
    "save_lumen_bundle",
    "shared_batch",
    "synthetic_pair",
    "train_mapping",
    "train_vae_nd",
    "train_vae_shared",
    "vae_forward",
]
