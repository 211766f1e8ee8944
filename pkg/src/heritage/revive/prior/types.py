from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import DimensionError, RangeError
from ..imagecore import CHROMA_RANGE, read_binary_png, write_binary_png

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray


@dataclass(frozen=True, eq=False)
class PriorMask:
    """A binary H x W mask; stored as a read-only ``bool`` array."""

    mask: NDArray[np.bool_]

    def __post_init__(self) -> None:
        raw = np.asarray(self.mask)
        if raw.ndim != 2 or raw.shape[0] < 1 or raw.shape[1] < 1:
            msg = f"A mask must be a non-empty H x W array, got shape {raw.shape}"
            raise DimensionError(msg)
        if raw.dtype != np.bool_ and not np.isin(raw, (0, 1)).all():
            msg = "A mask may only hold the values 0 and 1"
            raise RangeError(msg)
        mask = np.array(raw, dtype=bool, copy=True)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.mask.shape[0]), int(self.mask.shape[1]))

    @property
    def coverage(self) -> float:
        return float(self.mask.mean())

    def check_shape(self, shape: tuple[int, int], what: str = "image") -> None:
        if self.shape != tuple(shape):
            msg = f"Mask of shape {self.shape} does not match the {what} of shape {tuple(shape)}"
            raise DimensionError(msg)

    @classmethod
    def full(cls, height: int, width: int, value: bool = True) -> PriorMask:
        return cls(np.full((height, width), value, dtype=bool))

    def save(self, path: str | Path) -> Path:
        return write_binary_png(self.mask, path)

    @classmethod
    def load(cls, path: str | Path) -> PriorMask:
        return cls(read_binary_png(path))


@dataclass(frozen=True)
class SilkEstimate:
    """Representative silk chroma and the share of candidates that voted for it."""

    c_silk: tuple[float, float]
    support_fraction: float

    def __post_init__(self) -> None:
        a, b = (float(v) for v in self.c_silk)
        object.__setattr__(self, "c_silk", (a, b))
        low, high = CHROMA_RANGE
        if not (low <= a <= high and low <= b <= high):
            msg = f"c_silk {self.c_silk} lies outside [{low}, {high}]^2"
            raise RangeError(msg)
        if not (0.0 <= self.support_fraction <= 1.0) or math.isnan(self.support_fraction):
            msg = f"support_fraction must lie in [0, 1], got {self.support_fraction}"
            raise RangeError(msg)

    def to_json(self) -> dict[str, float]:
        return {"a": self.c_silk[0], "b": self.c_silk[1], "support_fraction": float(self.support_fraction)}

    @classmethod
    def from_json(cls, data: dict[str, float]) -> SilkEstimate:
        return cls((data["a"], data["b"]), data["support_fraction"])

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> SilkEstimate:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True, eq=False)
class SilkCandidates:
    """Pixels that look like smooth, silk-coloured background.

    Attributes:
        mask: H x W selection of candidate pixels.
        gradient: H x W ab-gradient magnitude the selection was filtered on.
    """

    mask: NDArray[np.bool_]
    gradient: NDArray[np.float64]

    @property
    def coordinates(self) -> set[tuple[int, int]]:
        return {(int(r), int(c)) for r, c in np.argwhere(self.mask)}

    def __len__(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def from_coordinates(
        cls, coordinates: ArrayLike, gradient: NDArray[np.float64]
    ) -> SilkCandidates:
        mask = np.zeros(gradient.shape, dtype=bool)
        points = np.asarray(list(coordinates), dtype=np.int64).reshape(-1, 2)
        mask[points[:, 0], points[:, 1]] = True
        return cls(mask, gradient)
