"""Silk-background colour prior."""

from __future__ import annotations

from .config import PriorConfig, SilkBox
from .extraction import (
    DEFAULT_SILK,
    ColorPrior,
    background_mask,
    chroma_gradient,
    compute_prior_mask,
    estimate_silk_color,
    extract_color_prior,
    extract_prior,
    filter_silk_candidates,
)
from .types import PriorMask, SilkCandidates, SilkEstimate

__all__ = [
    "DEFAULT_SILK",
    "ColorPrior",
    "PriorConfig",
    "PriorMask",
    "SilkBox",
    "SilkCandidates",
    "SilkEstimate",
    "background_mask",
    "chroma_gradient",
    "compute_prior_mask",
    "estimate_silk_color",
    "extract_color_prior",
    "extract_prior",
    "filter_silk_candidates",
]
