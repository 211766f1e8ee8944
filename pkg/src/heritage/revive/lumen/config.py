from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

from ..degrade import DegradationSamplerConfig
from ..exceptions import ConfigurationError
from ..nnet import LossWeights, LrSchedule


def _check_positive(obj: object, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if value < 1:
            msg = f"{type(obj).__name__}.{name} must be >= 1, got {value}"
            raise ConfigurationError(msg)


@dataclass(frozen=True)
class LumenArchitecture:
    """Sizes of the luminance VAEs, the mapping network and their discriminators.

    The encoder halves the resolution ``depth`` times, so the latent grid is
    ``resolution / 2**depth`` on a side.
    """

    latent_channels: int = 8
    base_channels: int = 32
    depth: int = 3
    mapping_blocks: int = 6
    feature_dim: int = 512
    disc_channels: int = 32
    latent_disc_hidden: int = 64

    def __post_init__(self) -> None:
        _check_positive(
            self,
            "latent_channels",
            "base_channels",
            "depth",
            "mapping_blocks",
            "feature_dim",
            "disc_channels",
            "latent_disc_hidden",
        )

    @property
    def channels(self) -> tuple[int, ...]:
        """Encoder widths from full resolution down to the latent grid."""
        return tuple(self.base_channels * min(2**i, 4) for i in range(self.depth + 1))

    @property
    def downsampling(self) -> int:
        return int(2**self.depth)

    def to_json(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> LumenArchitecture:
        return cls(**data)


@dataclass(frozen=True)
class LumenTrainConfig:
    """Training parameters shared by the three luminance trainers.

    Attributes:
        rd_probability: chance that a shared-VAE sample is a real degraded crop rather
            than a synthetically degraded one.
        sampler: degradation curves used to synthesise degraded luminance.
    """

    batch_size: int = 8
    resolution: int = 64
    iterations: int = 200
    rd_probability: float = 0.5
    sampler: DegradationSamplerConfig = field(default_factory=lambda: DegradationSamplerConfig(mode_probability=0.0))
    weights: LossWeights = field(default_factory=LossWeights.luminance)
    schedule: LrSchedule = field(default_factory=LrSchedule)
    checkpoint_every: int = 0
    log_every: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        _check_positive(self, "batch_size", "iterations", "log_every")
        if self.resolution < 32 or self.resolution & (self.resolution - 1):
            msg = f"resolution must be a power of two >= 32, got {self.resolution}"
            raise ConfigurationError(msg)
        if not 0.0 <= self.rd_probability <= 1.0:
            msg = f"rd_probability must lie in [0, 1], got {self.rd_probability}"
            raise ConfigurationError(msg)
        if self.checkpoint_every < 0:
            msg = f"checkpoint_every must be >= 0, got {self.checkpoint_every}"
            raise ConfigurationError(msg)

    def check_architecture(self, arch: LumenArchitecture) -> None:
        if self.resolution % arch.downsampling:
            msg = f"resolution {self.resolution} is not divisible by 2**depth = {arch.downsampling}"
            raise ConfigurationError(msg)
