from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import RangeError

if TYPE_CHECKING:
    from numpy.typing import NDArray


@dataclass(frozen=True)
class SilkBox:
    """Axis-aligned (a, b) rectangle of plausible silk chroma, bounds inclusive."""

    a: tuple[float, float] = (-5.0, 25.0)
    b: tuple[float, float] = (0.0, 40.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if self.a[0] > self.a[1] or self.b[0] > self.b[1]:
            msg = f"Silk box is empty: a={self.a}, b={self.b}"
            raise RangeError(msg)

    def contains(self, a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.bool_]:
        return (a >= self.a[0]) & (a <= self.a[1]) & (b >= self.b[0]) & (b <= self.b[1])


@dataclass(frozen=True)
class PriorConfig:
    """Parameters of the colour-prior extraction.

    Attributes:
        tau: ab distance above which a pixel counts as pigment rather than silk.
        k: number of K-means clusters over candidate chroma.
        gradient_threshold: largest ab-gradient magnitude of a smooth pixel.
        silk_box: chroma region that silk is expected to occupy.
        kmeans_max_iters: iteration cap for K-means.
        kmeans_seed: seed of the K-means initialisation.
    """

    tau: float = 20.0
    k: int = 3
    gradient_threshold: float = 2.0
    silk_box: SilkBox = field(default_factory=SilkBox)
    kmeans_max_iters: int = 100
    kmeans_seed: int = 0

    def __post_init__(self) -> None:
        if not self.tau > 0:
            msg = f"tau must be positive, got {self.tau}"
            raise RangeError(msg)
        if self.k < 1:
            msg = f"k must be >= 1, got {self.k}"
            raise RangeError(msg)
        if self.gradient_threshold < 0:
            msg = f"gradient_threshold must be non-negative, got {self.gradient_threshold}"
            raise RangeError(msg)
        if self.kmeans_max_iters < 1:
            msg = f"kmeans_max_iters must be >= 1, got {self.kmeans_max_iters}"
            raise RangeError(msg)
