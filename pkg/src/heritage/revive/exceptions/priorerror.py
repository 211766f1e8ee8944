from __future__ import annotations

from .reviveerror import ReviveError


class NoSilkFoundError(ReviveError, RuntimeError):
    """Raised when no pixel qualifies as a silk candidate."""

    def __init__(self, message: str = "No silk candidate pixels found") -> None:
        super().__init__(message)
