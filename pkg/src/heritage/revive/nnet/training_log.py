from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

from ..exceptions import NonFiniteLossError

if TYPE_CHECKING:
    from collections.abc import Mapping

logger = logging.getLogger(__name__)


def check_finite(stage: str, iteration: int, terms: Mapping[str, float]) -> None:
    """Raise :class:`NonFiniteLossError` if any loss term is NaN or infinite."""
    if not all(math.isfinite(value) for value in terms.values()):
        raise NonFiniteLossError(stage, iteration, terms)


class TrainingLog:
    """JSON-lines training log, one object per iteration.

    Each record holds ``stage``, ``iteration``, ``lr``, every loss term and ``total``. Opening
    with ``resume=True`` appends, so a resumed run continues the same file. The file is only
    open while a record is written.
    """

    def __init__(self, path: str | Path | None, stage: str, log_every: int = 10, resume: bool = False) -> None:
        self.path = Path(path) if path is not None else None
        self.stage = stage
        self.log_every = max(1, log_every)
        self.history: list[dict[str, Any]] = []
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if not resume:
                self.path.write_text("", encoding="utf-8")

    def record(
        self,
        iteration: int,
        lr: float,
        terms: Mapping[str, float],
        total: float,
        extra: Mapping[str, float] | None = None,
    ) -> dict[str, Any]:
        """Append one iteration; ``extra`` holds values that are not generator terms."""
        entry: dict[str, Any] = {"stage": self.stage, "iteration": iteration, "lr": lr}
        entry.update({name: float(value) for name, value in terms.items()})
        entry["total"] = float(total)
        entry.update({name: float(value) for name, value in (extra or {}).items()})
        check_finite(self.stage, iteration, {**terms, "total": total, **(extra or {})})
        self.history.append(entry)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry) + "\n")
        if iteration % self.log_every == 0:
            formatted = " ".join(f"{name}={value:.4f}" for name, value in terms.items())
            logger.info("[%s] iter %d lr=%.2e total=%.4f %s", self.stage, iteration, lr, total, formatted)
        return entry


def read_training_log(path: str | Path) -> list[dict[str, Any]]:
    with Path(path).open(encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
