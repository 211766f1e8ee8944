"""Hue-correction network.

A strided convolutional encoder over the normalised Lab input feeds a U-Net style pixel
decoder. Its three coarse outputs are the memory of the colour-query decoder; its
full-resolution output is the per-pixel embedding. Refined colour queries and pixel
embeddings are fused by a dot product into ab planes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import torch
import torch.nn.functional as F  # noqa: N812
from torch import nn

from ..exceptions import DimensionError
from ..imagecore import L_RANGE
from ..nnet import (
    DTYPE,
    ConvBlock,
    CrossAttentionLayer,
    FeedForwardLayer,
    SelfAttentionLayer,
    UpBlock,
    sine_positional_embedding,
)
from .config import ENCODER_STRIDE

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .config import HueArchitecture

CHROMA_SCALE = 128.0
OUTPUT_BOUND = 127.0
NUM_SCALES = 3


def normalize_lab(L: torch.Tensor, ab: torch.Tensor) -> torch.Tensor:
    """Stack ``L / 100`` and ``ab / 128`` into a B x 3 x H x W tensor."""
    return torch.cat([L / L_RANGE[1], ab / CHROMA_SCALE], dim=1)


class HueEncoder(nn.Module):
    """Four strided stages producing features at 1/4, 1/8, 1/16 and 1/32 resolution."""

    def __init__(self, widths: Sequence[int]) -> None:
        super().__init__()
        w = list(widths)
        self.stem = nn.Sequential(ConvBlock(3, w[0], stride=2), ConvBlock(w[0], w[0], stride=2))
        self.stages = nn.ModuleList(ConvBlock(w[i], w[i + 1], stride=2) for i in range(3))
        self.to(DTYPE)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        features = [self.stem(x)]
        for stage in self.stages:
            features.append(stage(features[-1]))
        return features


class PixelDecoder(nn.Module):
    """Top-down path with lateral skip connections.

    Returns features at 1/16, 1/8 and 1/4 resolution and a full-resolution embedding that
    also sees the raw input.
    """

    def __init__(self, widths: Sequence[int], dim: int) -> None:
        super().__init__()
        self.lateral = nn.ModuleList(nn.Conv2d(w, dim, kernel_size=1) for w in widths)
        self.smooth = nn.ModuleList(ConvBlock(dim, dim) for _ in range(NUM_SCALES))
        self.upsample = nn.Sequential(UpBlock(dim, dim), UpBlock(dim, dim))
        self.embed = nn.Sequential(ConvBlock(dim + 3, dim), nn.Conv2d(dim, dim, kernel_size=1))
        self.to(DTYPE)

    def forward(self, x: torch.Tensor, features: Sequence[torch.Tensor]) -> tuple[list[torch.Tensor], torch.Tensor]:
        top = self.lateral[3](features[3])
        scales = []
        for level, smooth in zip((2, 1, 0), self.smooth):
            top = smooth(self.lateral[level](features[level]) + F.interpolate(top, scale_factor=2.0, mode="nearest"))
            scales.append(top)
        embedding = self.embed(torch.cat([self.upsample(top), x], dim=1))
        return scales, embedding


@dataclass
class HueFeatures:
    """Memory scales (coarse to fine: 1/16, 1/8, 1/4) and the full-resolution pixel embedding."""

    scales: list[torch.Tensor]
    embedding: torch.Tensor


@dataclass
class DecodedColors:
    """Refined queries with the attention weights of every block (B x heads x K x S / K x K)."""

    queries: torch.Tensor
    cross_weights: list[torch.Tensor] = field(default_factory=list)
    self_weights: list[torch.Tensor] = field(default_factory=list)


class ColorDecoderBlock(nn.Module):
    def __init__(self, dim: int, heads: int, order: Sequence[str]) -> None:
        super().__init__()
        self.order = tuple(order)
        self.cross = CrossAttentionLayer(dim, heads)
        self.self_attn = SelfAttentionLayer(dim, heads)
        self.mlp = FeedForwardLayer(dim)

    def forward(
        self,
        queries: torch.Tensor,
        memory: torch.Tensor,
        pos: torch.Tensor,
        mask: torch.Tensor | None,
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        cross_weights = self_weights = None
        for kind in self.order:
            if kind == "cross":
                queries, cross_weights = self.cross(queries, memory, pos, mask)
            elif kind == "self":
                queries, self_weights = self.self_attn(queries)
            else:
                queries = self.mlp(queries)
        return queries, cross_weights, self_weights  # type: ignore[return-value]


def prior_attention_mask(
    prior_mask: torch.Tensor, height: int, width: int, num_queries: int, prior_queries: int
) -> torch.Tensor | None:
    """Forbid the first ``prior_queries`` queries from attending outside the prior mask.

    ``prior_mask`` (B x 1 x H x W) is max-pooled to the feature grid. Samples with no
    covered location keep unrestricted attention.

    Returns:
        A B x K x (height * width) boolean mask, True where attention is forbidden, or
        None if nothing is restricted.
    """
    if prior_queries == 0:
        return None
    covered = F.adaptive_max_pool2d(prior_mask.to(DTYPE), (height, width)).flatten(1) > 0
    forbidden = ~covered & covered.any(dim=1, keepdim=True)
    mask = torch.zeros(prior_mask.shape[0], num_queries, height * width, dtype=torch.bool)
    mask[:, :prior_queries] = forbidden[:, None, :]
    return mask


class ColorQueryDecoder(nn.Module):
    """Learnable colour queries refined block by block, cycling over the three memory scales."""

    def __init__(self, arch: HueArchitecture) -> None:
        super().__init__()
        self.arch = arch
        self.color_queries = nn.Embedding(arch.num_queries, arch.dim)
        self.level_embed = nn.Embedding(NUM_SCALES, arch.dim)
        self.blocks = nn.ModuleList(
            ColorDecoderBlock(arch.dim, arch.heads, arch.layer_order) for _ in range(arch.blocks)
        )
        self.norm = nn.LayerNorm(arch.dim)
        self.to(DTYPE)

    def forward(self, features: HueFeatures, prior_mask: torch.Tensor | None = None) -> DecodedColors:
        batch = features.embedding.shape[0]
        queries = self.color_queries.weight[None].expand(batch, -1, -1)
        decoded = DecodedColors(queries)
        for index, block in enumerate(self.blocks):
            level = index % NUM_SCALES
            scale = features.scales[level]
            _, dim, height, width = scale.shape
            memory = scale.flatten(2).transpose(1, 2) + self.level_embed.weight[level]
            pos = sine_positional_embedding(height, width, dim)
            mask = None
            if prior_mask is not None:
                mask = prior_attention_mask(prior_mask, height, width, self.arch.num_queries, self.arch.prior_queries)
            queries, cross_weights, self_weights = block(queries, memory, pos, mask)
            decoded.cross_weights.append(cross_weights)
            decoded.self_weights.append(self_weights)
        decoded.queries = self.norm(queries)
        return decoded


class ColorFusion(nn.Module):
    """``tanh(conv1x1(<pixel embedding, query>)) * 127``: ab bounded inside the chroma range."""

    def __init__(self, arch: HueArchitecture) -> None:
        super().__init__()
        self.scale = 1.0 / math.sqrt(arch.dim)
        self.head = nn.Conv2d(arch.num_queries, 2, kernel_size=1)
        self.to(DTYPE)

    def forward(self, queries: torch.Tensor, embedding: torch.Tensor) -> torch.Tensor:
        scores = torch.einsum("bkd,bdhw->bkhw", queries, embedding) * self.scale
        return torch.tanh(self.head(scores)) * OUTPUT_BOUND


@dataclass
class HueOutput:
    ab: torch.Tensor
    colors: DecodedColors


class HueNetwork(nn.Module):
    def __init__(self, arch: HueArchitecture) -> None:
        super().__init__()
        self.arch = arch
        self.encoder = HueEncoder(arch.encoder_widths)
        self.pixel_decoder = PixelDecoder(arch.encoder_widths, arch.dim)
        self.color_decoder = ColorQueryDecoder(arch)
        self.fusion = ColorFusion(arch)

    def check_input(self, x: torch.Tensor) -> None:
        if x.dim() != 4 or x.shape[1] != 3:
            msg = f"The hue network takes a B x 3 x H x W Lab tensor, got shape {tuple(x.shape)}"
            raise DimensionError(msg)
        if x.shape[2] % ENCODER_STRIDE or x.shape[3] % ENCODER_STRIDE:
            msg = f"Input size {tuple(x.shape[2:])} is not divisible by {ENCODER_STRIDE}"
            raise DimensionError(msg)

    def encode(self, x: torch.Tensor) -> HueFeatures:
        self.check_input(x)
        scales, embedding = self.pixel_decoder(x, self.encoder(x))
        return HueFeatures(scales, embedding)

    def forward(self, x: torch.Tensor, prior_mask: torch.Tensor | None = None) -> HueOutput:
        """Predict ab planes for a normalised Lab batch.

        Args:
            x: B x 3 x H x W holding ``L / 100`` and the masked prior ``ab / 128``.
            prior_mask: B x 1 x H x W mask, used only by the prior-guided query branch.
        """
        features = self.encode(x)
        colors = self.color_decoder(features, prior_mask)
        return HueOutput(self.fusion(colors.queries, features.embedding), colors)


def encode_features(net: HueNetwork, x: torch.Tensor) -> HueFeatures:
    """Multiscale features of a normalised Lab batch.

    Raises:
        DimensionError: if ``x`` does not have exactly three channels.
    """
    return net.encode(x)


def decode_colors(net: HueNetwork, features: HueFeatures, prior_mask: torch.Tensor | None = None) -> DecodedColors:
    return net.color_decoder(features, prior_mask)
