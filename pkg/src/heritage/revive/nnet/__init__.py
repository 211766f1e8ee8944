"""Neural substrate shared by the luminance and hue stages (torch, double precision)."""

from __future__ import annotations

from .autograd import (
    DTYPE,
    as_tensor,
    backward,
    check_gradients,
    freeze,
    generator,
    is_frozen,
    parameter_checksum,
    seeded,
    to_numpy,
)
from .checkpoint import CheckpointArchive, load_checkpoint, save_checkpoint
from .layers import (
    ConvBlock,
    CrossAttentionLayer,
    FeaturePyramid,
    FeedForwardLayer,
    IdentityExtractor,
    LatentDiscriminator,
    PatchDiscriminator,
    ResidualBlock,
    SelfAttentionLayer,
    UpBlock,
    sine_positional_embedding,
)
from .loop import AdversarialTrainer, TrainingResult
from .losses import (
    COLORFUL_REFERENCE,
    AdversarialLosses,
    adversarial_losses,
    chroma_colorfulness,
    colorful_loss,
    kl_loss,
    masked_pixel_loss,
    perceptual_loss,
    pixel_loss,
)
from .optim import LossWeights, LrSchedule, OptimizerState, optimizer_step
from .training_log import TrainingLog, check_finite, read_training_log

__all__ = [
    "COLORFUL_REFERENCE",
    "DTYPE",
    "AdversarialLosses",
    "AdversarialTrainer",
    "CheckpointArchive",
    "ConvBlock",
    "CrossAttentionLayer",
    "FeaturePyramid",
    "FeedForwardLayer",
    "IdentityExtractor",
    "LatentDiscriminator",
    "LossWeights",
    "LrSchedule",
    "OptimizerState",
    "PatchDiscriminator",
    "ResidualBlock",
    "SelfAttentionLayer",
    "TrainingLog",
    "TrainingResult",
    "UpBlock",
    "adversarial_losses",
    "as_tensor",
    "backward",
    "check_finite",
    "check_gradients",
    "chroma_colorfulness",
    "colorful_loss",
    "freeze",
    "generator",
    "is_frozen",
    "kl_loss",
    "load_checkpoint",
    "masked_pixel_loss",
    "optimizer_step",
    "parameter_checksum",
    "perceptual_loss",
    "pixel_loss",
    "read_training_log",
    "save_checkpoint",
    "seeded",
    "sine_positional_embedding",
    "to_numpy",
]
