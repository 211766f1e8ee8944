from __future__ import annotations

from .reviveerror import ReviveError


class ManifestError(ReviveError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class ManifestNotFoundError(ManifestError, FileNotFoundError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class ManifestFormatError(ManifestError, ValueError):
    """Raised for a malformed manifest line; ``line`` is 1-based."""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class PairingError(ManifestError, ValueError):
    def __init__(self, message: str) -> None:
        super().__init__(message)
