"""Exceptions module."""

from __future__ import annotations

from .configerror import ConfigurationError
from .imageerror import DimensionError, DomainTagError, EmptyInputError, RangeError, ShapeError
from .manifesterror import ManifestError, ManifestFormatError, ManifestNotFoundError, PairingError
from .metricerror import IncomparableMetricsError
from .priorerror import NoSilkFoundError
from .reviveerror import ReviveError
from .trainingerror import NonFiniteLossError, StageError, TrainingStateError

__all__ = [
    "ConfigurationError",
    "DimensionError",
    "DomainTagError",
    "EmptyInputError",
    "IncomparableMetricsError",
    "ManifestError",
    "ManifestFormatError",
    "ManifestNotFoundError",
    "NoSilkFoundError",
    "NonFiniteLossError",
    "PairingError",
    "RangeError",
    "ReviveError",
    "ShapeError",
    "StageError",
    "TrainingStateError",
]
