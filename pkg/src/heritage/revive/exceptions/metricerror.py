from __future__ import annotations

from .reviveerror import ReviveError


class IncomparableMetricsError(ReviveError, ValueError):
    """Raised when two FIDs were produced by different feature extractors."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
