from __future__ import annotations

from .reviveerror import ReviveError


class ConfigurationError(ReviveError, ValueError):
    """Raised for invalid, inconsistent or unknown configuration values."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
