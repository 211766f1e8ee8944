"""Synthetic luminance degradation and chroma attenuation."""

from __future__ import annotations

from .attenuation import AttenuationParams, AttenuationRanges, attenuate_chroma
from .curves import (
    DEFAULT_BINS,
    EmpiricalCurve,
    LinearCurveBounds,
    LinearCurveParams,
    apply_empirical_curve,
    apply_linear_degradation,
    fit_empirical_curve,
)
from .sampler import DegradationChoice, DegradationMode, DegradationSamplerConfig, sample_degradation

__all__ = [
    "DEFAULT_BINS",
    "AttenuationParams",
    "AttenuationRanges",
    "DegradationChoice",
    "DegradationMode",
    "DegradationSamplerConfig",
    "EmpiricalCurve",
    "LinearCurveBounds",
    "LinearCurveParams",
    "apply_empirical_curve",
    "apply_linear_degradation",
    "attenuate_chroma",
    "fit_empirical_curve",
    "sample_degradation",
]
