from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Any

from ..degrade import AttenuationRanges, DegradationSamplerConfig
from ..exceptions import ConfigurationError
from ..nnet import LossWeights, LrSchedule
from ..prior import PriorConfig

DEFAULT_LAYER_ORDER = ("cross", "self", "mlp")
ENCODER_STRIDE = 32


class LuminanceSource(str, enum.Enum):
    """Luminance fed to the hue network during training."""

    NON_DEGRADED = "non_degraded"
    RESTORED = "restored"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class HueArchitecture:
    """Sizes of the hue-correction network.

    Attributes:
        num_queries: number of learnable colour queries.
        dim: width of queries, attention layers and pixel embeddings.
        blocks: decoder blocks; block ``i`` attends to feature scale ``i % 3``.
        heads: attention heads per layer.
        layer_order: order of the sub-layers inside a block.
        prior_queries: leading queries whose cross-attention is restricted to locations
            covered by the prior mask; 0 disables the prior-guided branch.
        encoder_widths: channels of the four encoder stages (1/4 to 1/32 resolution).
        disc_channels: base width of the patch discriminator.
    """

    num_queries: int = 32
    dim: int = 64
    blocks: int = 3
    heads: int = 4
    layer_order: tuple[str, ...] = DEFAULT_LAYER_ORDER
    prior_queries: int = 0
    encoder_widths: tuple[int, ...] = (32, 64, 96, 128)
    disc_channels: int = 32

    def __post_init__(self) -> None:
        object.__setattr__(self, "layer_order", tuple(str(kind) for kind in self.layer_order))
        object.__setattr__(self, "encoder_widths", tuple(int(w) for w in self.encoder_widths))
        for name in ("num_queries", "dim", "blocks", "heads", "disc_channels"):
            if getattr(self, name) < 1:
                msg = f"HueArchitecture.{name} must be >= 1, got {getattr(self, name)}"
                raise ConfigurationError(msg)
        if self.dim % self.heads:
            msg = f"dim {self.dim} is not divisible by {self.heads} heads"
            raise ConfigurationError(msg)
        if self.dim % 4:
            msg = f"dim must be divisible by 4 for the positional embedding, got {self.dim}"
            raise ConfigurationError(msg)
        if sorted(self.layer_order) != sorted(DEFAULT_LAYER_ORDER):
            msg = f"layer_order must be a permutation of {DEFAULT_LAYER_ORDER}, got {self.layer_order}"
            raise ConfigurationError(msg)
        if not 0 <= self.prior_queries <= self.num_queries:
            msg = f"prior_queries must lie in [0, {self.num_queries}], got {self.prior_queries}"
            raise ConfigurationError(msg)
        if len(self.encoder_widths) != 4 or min(self.encoder_widths) < 1:
            msg = f"encoder_widths must hold four positive widths, got {self.encoder_widths}"
            raise ConfigurationError(msg)

    def to_json(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> HueArchitecture:
        return cls(**data)

    @classmethod
    def full_scale(cls) -> HueArchitecture:
        return cls(num_queries=100, dim=256, blocks=9, heads=8, encoder_widths=(96, 192, 384, 768))


@dataclass(frozen=True)
class HueTrainConfig:
    """Training parameters of the hue-correction stage.

    ``luminance_source = "restored"`` degrades each training crop and enhances it with the
    luminance bundle at ``lumen_checkpoint`` before it reaches the hue network.
    """

    batch_size: int = 4
    resolution: int = 64
    iterations: int = 200
    weights: LossWeights = field(default_factory=LossWeights)
    schedule: LrSchedule = field(default_factory=LrSchedule)
    prior: PriorConfig = field(default_factory=PriorConfig)
    attenuation: AttenuationRanges = field(default_factory=AttenuationRanges)
    sampler: DegradationSamplerConfig = field(default_factory=lambda: DegradationSamplerConfig(mode_probability=0.0))
    luminance_source: LuminanceSource = LuminanceSource.NON_DEGRADED
    lumen_checkpoint: str | None = None
    perceptual_widths: tuple[int, ...] = (16, 32, 64)
    perceptual_seed: int = 0
    checkpoint_every: int = 0
    log_every: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "luminance_source", LuminanceSource(self.luminance_source))
        object.__setattr__(self, "perceptual_widths", tuple(int(w) for w in self.perceptual_widths))
        for name in ("batch_size", "iterations", "log_every"):
            if getattr(self, name) < 1:
                msg = f"HueTrainConfig.{name} must be >= 1, got {getattr(self, name)}"
                raise ConfigurationError(msg)
        if self.checkpoint_every < 0:
            msg = f"checkpoint_every must be >= 0, got {self.checkpoint_every}"
            raise ConfigurationError(msg)
        if self.resolution < ENCODER_STRIDE or self.resolution & (self.resolution - 1):
            msg = f"resolution must be a power of two >= {ENCODER_STRIDE}, got {self.resolution}"
            raise ConfigurationError(msg)
        if self.luminance_source is LuminanceSource.RESTORED and not self.lumen_checkpoint:
            msg = "luminance_source = 'restored' requires lumen_checkpoint"
            raise ConfigurationError(msg)
