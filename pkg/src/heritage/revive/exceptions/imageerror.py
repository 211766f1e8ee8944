from __future__ import annotations

from .reviveerror import ReviveError


class DimensionError(ReviveError, ValueError):
    """Raised when image planes, masks or grids do not fit together."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class ShapeError(DimensionError):
    """Raised when a tensor has the wrong rank, e.g. a non-scalar loss."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class RangeError(ReviveError, ValueError):
    """Raised when values leave the range a type promises."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class DomainTagError(ReviveError, ValueError):
    """Raised when a luminance plane or a model is used in the wrong domain."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class EmptyInputError(ReviveError, ValueError):
    def __init__(self, message: str) -> None:
        super().__init__(message)
