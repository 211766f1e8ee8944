"""Hue correction: colour queries over multiscale Lab features, fused into ab planes."""

from __future__ import annotations

from .config import DEFAULT_LAYER_ORDER, HueArchitecture, HueTrainConfig, LuminanceSource
from .inference import (
    HueBundle,
    RestoredPainting,
    correct_hue,
    load_hue_bundle,
    restore_painting,
    save_hue_bundle,
    tiled,
)
from .networks import (
    ColorDecoderBlock,
    ColorFusion,
    ColorQueryDecoder,
    DecodedColors,
    HueEncoder,
    HueFeatures,
    HueNetwork,
    HueOutput,
    PixelDecoder,
    decode_colors,
    encode_features,
    normalize_lab,
    prior_attention_mask,
)
from .pairs import HueCorpus, HueTrainingPair, make_hue_training_pair, stack_pairs
from .training import HUE_STAGE, restored_lightness, train_hue

__all__ = [
    "DEFAULT_LAYER_ORDER",
    "HUE_STAGE",
    "ColorDecoderBlock",
    "ColorFusion",
    "ColorQueryDecoder",
    "DecodedColors",
    "HueArchitecture",
    "HueBundle",
    "HueCorpus",
    "HueEncoder",
    "HueFeatures",
    "HueNetwork",
    "HueOutput",
    "HueTrainConfig",
    "HueTrainingPair",
    "LuminanceSource",
    "PixelDecoder",
    "RestoredPainting",
    "correct_hue",
    "decode_colors",
    "encode_features",
    "load_hue_bundle",
    "make_hue_training_pair",
    "normalize_lab",
    "prior_attention_mask",
    "restore_painting",
    "restored_lightness",
    "save_hue_bundle",
    "stack_pairs",
    "tiled",
    "train_hue",
]
