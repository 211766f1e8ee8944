from __future__ import annotations

from typing import TYPE_CHECKING

from .reviveerror import ReviveError

if TYPE_CHECKING:
    from collections.abc import Mapping


class TrainingStateError(ReviveError, RuntimeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)


class NonFiniteLossError(TrainingStateError):
    """Raised when a loss term turns NaN or infinite.

    The failing iteration and every term of that iteration are kept for diagnostics.
    """

    def __init__(self, stage: str, iteration: int, terms: Mapping[str, float]) -> None:
        self.stage = stage
        self.iteration = iteration
        self.terms = dict(terms)
        formatted = ", ".join(f"{name}={value:.6g}" for name, value in self.terms.items())
        super().__init__(f"Non-finite loss in stage '{stage}' at iteration {iteration}: {formatted}")


class StageError(ReviveError, RuntimeError):
    """Raised by the restoration pipeline, naming the stage that failed."""

    def __init__(self, stage: str, message: str) -> None:
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
