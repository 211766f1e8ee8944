from __future__ import annotations


class ReviveError(Exception):
    """Base class for every error raised on purpose by the package."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
