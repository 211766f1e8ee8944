"""Luminance VAEs and the latent mapping network."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

import torch
from torch import nn

from ..exceptions import DimensionError
from ..imagecore import LUMINANCE_8BIT_RANGE
from ..nnet import DTYPE, ConvBlock, ResidualBlock, UpBlock, as_tensor

if TYPE_CHECKING:
    from ..imagecore import LuminancePlane
    from .config import LumenArchitecture

LOGVAR_BOUND = 10.0
HALF_RANGE = LUMINANCE_8BIT_RANGE[1] / 2


class VaeDomain(str, enum.Enum):
    """Which luminance domain a VAE was trained on."""

    SHARED_DEGRADED = "shared_degraded"
    NON_DEGRADED = "non_degraded"

    def __str__(self) -> str:
        return self.value


def normalize(x: torch.Tensor) -> torch.Tensor:
    """Map 8-bit luminance to [-1, 1]."""
    return x / HALF_RANGE - 1.0


def denormalize(y: torch.Tensor) -> torch.Tensor:
    return (y + 1.0) * HALF_RANGE


@dataclass(frozen=True)
class VaeOutput:
    reconstruction: torch.Tensor
    mu: torch.Tensor
    logvar: torch.Tensor
    latent: torch.Tensor


class LuminanceVae(nn.Module):
    """Convolutional VAE over a B x 1 x H x W batch of 8-bit luminance.

    The encoder is a stem convolution followed by ``depth`` stride-2 blocks and two 1 x 1
    heads for the posterior mean and log-variance. The decoder mirrors it with transposed
    convolutions and ends in ``tanh``, so reconstructions stay inside [0, 255].
    """

    def __init__(self, arch: LumenArchitecture, domain: VaeDomain) -> None:
        super().__init__()
        self.arch = arch
        self.domain = VaeDomain(domain)
        channels = arch.channels
        self.stem = ConvBlock(1, channels[0])
        self.down = nn.ModuleList(ConvBlock(channels[i], channels[i + 1], stride=2) for i in range(arch.depth))
        self.mu_head = nn.Conv2d(channels[-1], arch.latent_channels, kernel_size=1)
        self.logvar_head = nn.Conv2d(channels[-1], arch.latent_channels, kernel_size=1)
        self.expand = nn.Sequential(nn.Conv2d(arch.latent_channels, channels[-1], kernel_size=1), nn.LeakyReLU(0.2))
        self.up = nn.ModuleList(UpBlock(channels[i + 1], channels[i]) for i in reversed(range(arch.depth)))
        self.out = nn.Conv2d(channels[0], 1, kernel_size=3, padding=1)
        self.to(DTYPE)

    def check_input(self, x: torch.Tensor) -> None:
        if x.dim() != 4 or x.shape[1] != 1:
            msg = f"Expected a B x 1 x H x W luminance batch, got shape {tuple(x.shape)}"
            raise DimensionError(msg)
        step = self.arch.downsampling
        if x.shape[2] % step or x.shape[3] % step:
            msg = f"Luminance size {tuple(x.shape[2:])} is not divisible by {step}"
            raise DimensionError(msg)

    def encode(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Return the posterior mean and (clamped) log-variance of an 8-bit batch."""
        self.check_input(x)
        h = self.stem(normalize(x))
        for block in self.down:
            h = block(h)
        return self.mu_head(h), self.logvar_head(h).clamp(-LOGVAR_BOUND, LOGVAR_BOUND)

    def decode(self, z: torch.Tensor) -> torch.Tensor:
        h = self.expand(z)
        for block in self.up:
            h = block(h)
        return denormalize(torch.tanh(self.out(h)))

    def forward(self, x: torch.Tensor, noise: torch.Generator | None = None) -> VaeOutput:
        """Encode, sample and decode.

        Args:
            x: B x 1 x H x W luminance on the 8-bit scale.
            noise: generator for the reparameterisation noise; ``None`` decodes the
                posterior mean.
        """
        mu, logvar = self.encode(x)
        if noise is None:
            latent = mu
        else:
            eps = torch.randn(mu.shape, generator=noise, dtype=mu.dtype)
            latent = mu + torch.exp(0.5 * logvar) * eps
        return VaeOutput(self.decode(latent), mu, logvar, latent)


class LatentMapping(nn.Module):
    """Residual network translating shared-degraded latents into the non-degraded latent space.

    The output projection starts at zero, so the mapping is the identity at initialisation.
    """

    def __init__(self, arch: LumenArchitecture) -> None:
        super().__init__()
        self.arch = arch
        self.project_in = nn.Conv2d(arch.latent_channels, arch.feature_dim, kernel_size=1)
        self.blocks = nn.Sequential(
            *(ResidualBlock(arch.feature_dim, zero_init=False) for _ in range(arch.mapping_blocks))
        )
        self.project_out = nn.Conv2d(arch.feature_dim, arch.latent_channels, kernel_size=1)
        nn.init.zeros_(self.project_out.weight)
        nn.init.zeros_(self.project_out.bias)
        self.to(DTYPE)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        if z.dim() != 4 or z.shape[1] != self.arch.latent_channels:
            msg = f"Expected B x {self.arch.latent_channels} x h x w latents, got {tuple(z.shape)}"
            raise DimensionError(msg)
        return z + self.project_out(self.blocks(self.project_in(z)))


def vae_forward(
    vae: LuminanceVae, plane: LuminancePlane, noise: torch.Generator | None = None, resolution: int | None = None
) -> VaeOutput:
    """Run one luminance plane through ``vae`` as a batch of one.

    Raises:
        DimensionError: if ``resolution`` is given and the plane is not that size, or the
            plane size is not divisible by the encoder's downsampling factor.
    """
    if resolution is not None and plane.shape != (resolution, resolution):
        msg = f"Luminance plane is {plane.shape}, the network was configured for {resolution} x {resolution}"
        raise DimensionError(msg)
    x = as_tensor(plane.values)[None, None]
    return vae(x, noise)


def mapping_latent_loss(mapping: LatentMapping, z_shared: torch.Tensor, z_nd: torch.Tensor) -> torch.Tensor:
    """Mean absolute distance between mapped shared-domain latents and non-degraded latents."""
    if z_shared.shape != z_nd.shape:
        msg = f"Latent shapes differ: {tuple(z_shared.shape)} vs {tuple(z_nd.shape)}"
        raise DimensionError(msg)
    return torch.nn.functional.l1_loss(mapping(z_shared), z_nd)
