"""Image quality metrics, FID and evaluation reports."""

from __future__ import annotations

from .fid import (
    PYRAMID,
    FeatureExtractorSpec,
    FidScore,
    GaussianStats,
    compare_fid,
    fid,
    fid_from_embeddings,
    frechet_distance,
    gaussian_stats,
    load_embeddings,
)
from .quality import MaskPolicy, apply_mask_policy, colorfulness, delta_colorfulness, psnr, ssim, ssim_luminance
from .report import (
    UNAVAILABLE,
    EvaluateConfig,
    EvaluationMode,
    MetricReport,
    MetricRow,
    evaluate_paired,
    evaluate_unpaired,
    set_delta_colorfulness,
)

__all__ = [
    "PYRAMID",
    "UNAVAILABLE",
    "EvaluateConfig",
    "EvaluationMode",
    "FeatureExtractorSpec",
    "FidScore",
    "GaussianStats",
    "MaskPolicy",
    "MetricReport",
    "MetricRow",
    "apply_mask_policy",
    "colorfulness",
    "compare_fid",
    "delta_colorfulness",
    "evaluate_paired",
    "evaluate_unpaired",
    "fid",
    "fid_from_embeddings",
    "frechet_distance",
    "gaussian_stats",
    "load_embeddings",
    "psnr",
    "set_delta_colorfulness",
    "ssim",
    "ssim_luminance",
]
