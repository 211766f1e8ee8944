"""Building blocks shared by the luminance and hue networks.

Every module is cast to double precision on construction so that finite-difference
gradient checks are meaningful.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import torch
from torch import nn

from ..exceptions import ConfigurationError, DimensionError
from .autograd import DTYPE, seeded

if TYPE_CHECKING:
    from collections.abc import Sequence

NEGATIVE_SLOPE = 0.2


class ConvBlock(nn.Module):
    """3 x 3 convolution followed by a leaky ReLU; ``stride=2`` halves the resolution."""

    def __init__(self, in_channels: int, out_channels: int, stride: int = 1) -> None:
        super().__init__()
        self.conv = nn.Conv2d(in_channels, out_channels, kernel_size=3, stride=stride, padding=1)
        self.act = nn.LeakyReLU(NEGATIVE_SLOPE)
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.act(self.conv(x))


class UpBlock(nn.Module):
    """Transposed convolution doubling the resolution."""

    def __init__(self, in_channels: int, out_channels: int) -> None:
        super().__init__()
        self.conv = nn.ConvTranspose2d(in_channels, out_channels, kernel_size=2, stride=2)
        self.act = nn.LeakyReLU(NEGATIVE_SLOPE)
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.act(self.conv(x))


class ResidualBlock(nn.Module):
    """``x + f(x)``; the second convolution starts at zero so the block is the identity at init."""

    def __init__(self, channels: int, hidden: int | None = None, zero_init: bool = True) -> None:
        super().__init__()
        hidden = hidden or channels
        self.inner = nn.Conv2d(channels, hidden, kernel_size=3, padding=1)
        self.act = nn.LeakyReLU(NEGATIVE_SLOPE)
        self.outer = nn.Conv2d(hidden, channels, kernel_size=3, padding=1)
        if zero_init:
            nn.init.zeros_(self.outer.weight)
            nn.init.zeros_(self.outer.bias)
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.outer(self.act(self.inner(x)))


class FeaturePyramid(nn.Module):
    """Fixed, randomly initialised strided convolutions used as a perceptual feature extractor.

    The weights are drawn from ``seed`` and never trained, so two pyramids with the same
    arguments compute the same features.
    """

    def __init__(self, in_channels: int, widths: Sequence[int] = (16, 32, 64), seed: int = 0) -> None:
        super().__init__()
        self.seed = seed
        self.widths = tuple(widths)
        with seeded(seed):
            channels = [in_channels, *self.widths]
            self.levels = nn.ModuleList(
                ConvBlock(channels[i], channels[i + 1], stride=2) for i in range(len(self.widths))
            )
        self.requires_grad_(False)
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        features = []
        for level in self.levels:
            x = level(x)
            features.append(x)
        return features


class IdentityExtractor(nn.Module):
    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        return [x]


def _check_heads(dim: int, heads: int) -> None:
    if heads < 1 or dim % heads != 0:
        msg = f"Attention dimension {dim} is not divisible by {heads} heads"
        raise ConfigurationError(msg)


class CrossAttentionLayer(nn.Module):
    """Pre-normalised cross-attention from queries onto a flattened feature map."""

    def __init__(self, dim: int, heads: int) -> None:
        super().__init__()
        _check_heads(dim, heads)
        self.heads = heads
        self.norm = nn.LayerNorm(dim)
        self.attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.to(DTYPE)

    def attend(
        self,
        queries: torch.Tensor,
        memory: torch.Tensor,
        pos: torch.Tensor | None = None,
        mask: torch.Tensor | None = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Return the attention output (without the residual) and per-head weights.

        Args:
            queries: ``B x K x d``.
            memory: ``B x S x d`` feature tokens.
            pos: ``S x d`` positional embedding added to the keys.
            mask: ``B x K x S`` boolean, True where attention is forbidden.
        """
        keys = memory if pos is None else memory + pos
        attn_mask = None
        if mask is not None:
            attn_mask = mask.repeat_interleave(self.heads, dim=0)
        out, weights = self.attn(
            self.norm(queries), keys, memory, attn_mask=attn_mask, need_weights=True, average_attn_weights=False
        )
        return out, weights

    def forward(
        self,
        queries: torch.Tensor,
        memory: torch.Tensor,
        pos: torch.Tensor | None = None,
        mask: torch.Tensor | None = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        out, weights = self.attend(queries, memory, pos, mask)
        return queries + out, weights


class SelfAttentionLayer(nn.Module):
    def __init__(self, dim: int, heads: int) -> None:
        super().__init__()
        _check_heads(dim, heads)
        self.norm = nn.LayerNorm(dim)
        self.attn = nn.MultiheadAttention(dim, heads, batch_first=True)
        self.to(DTYPE)

    def attend(self, queries: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        normed = self.norm(queries)
        return self.attn(normed, normed, normed, need_weights=True, average_attn_weights=False)

    def forward(self, queries: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        out, weights = self.attend(queries)
        return queries + out, weights


class FeedForwardLayer(nn.Module):
    def __init__(self, dim: int, hidden: int | None = None) -> None:
        super().__init__()
        hidden = hidden or 4 * dim
        self.norm = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(nn.Linear(dim, hidden), nn.GELU(), nn.Linear(hidden, dim))
        self.to(DTYPE)

    def forward(self, queries: torch.Tensor) -> torch.Tensor:
        return queries + self.mlp(self.norm(queries))


def sine_positional_embedding(height: int, width: int, dim: int, temperature: float = 10000.0) -> torch.Tensor:
    """2D sine/cosine embedding of a ``height x width`` grid, flattened row-major to ``(H*W) x dim``."""
    if dim % 4 != 0:
        msg = f"Positional embedding dimension must be divisible by 4, got {dim}"
        raise DimensionError(msg)
    quarter = dim // 4
    freqs = temperature ** (-torch.arange(quarter, dtype=DTYPE) / quarter)
    rows = torch.arange(height, dtype=DTYPE)[:, None] * freqs * (2 * math.pi / max(height, 1))
    cols = torch.arange(width, dtype=DTYPE)[:, None] * freqs * (2 * math.pi / max(width, 1))
    row_emb = torch.cat([rows.sin(), rows.cos()], dim=1)[:, None, :].expand(height, width, 2 * quarter)
    col_emb = torch.cat([cols.sin(), cols.cos()], dim=1)[None, :, :].expand(height, width, 2 * quarter)
    return torch.cat([row_emb, col_emb], dim=2).reshape(height * width, dim)


class PatchDiscriminator(nn.Module):
    """Four strided convolutions producing a map of real/fake logits.

    ``forward`` returns the logits and the activations of every hidden layer, the latter
    feeding the feature-matching loss.
    """

    def __init__(self, in_channels: int, base_channels: int = 32, depth: int = 4) -> None:
        super().__init__()
        channels = [in_channels] + [base_channels * 2**i for i in range(depth - 1)]
        self.hidden = nn.ModuleList(ConvBlock(channels[i], channels[i + 1], stride=2) for i in range(depth - 1))
        self.head = nn.Conv2d(channels[-1], 1, kernel_size=3, padding=1)
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        features = []
        for layer in self.hidden:
            x = layer(x)
            features.append(x)
        return self.head(x), features


class LatentDiscriminator(nn.Module):
    """Three-layer MLP applied at every latent location (1 x 1 convolutions)."""

    def __init__(self, channels: int, hidden: int = 64) -> None:
        super().__init__()
        self.hidden = nn.ModuleList([
            nn.Sequential(nn.Conv2d(channels, hidden, 1), nn.LeakyReLU(NEGATIVE_SLOPE)),
            nn.Sequential(nn.Conv2d(hidden, hidden, 1), nn.LeakyReLU(NEGATIVE_SLOPE)),
        ])
        self.head = nn.Conv2d(hidden, 1, 1)
        self.to(DTYPE)

    def forward(self, z: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        features = []
        for layer in self.hidden:
            z = layer(z)
            features.append(z)
        return self.head(z), features
