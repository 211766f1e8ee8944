"""Sign-dependent linear attenuation of chroma priors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import RangeError
from ..imagecore import ChromaPlanes
from .curves import _check_interval

if TYPE_CHECKING:
    from numpy.random import Generator
    from numpy.typing import NDArray


@dataclass(frozen=True)
class AttenuationRanges:
    neg: tuple[float, float] = (0.2, 0.5)
    pos: tuple[float, float] = (0.5, 0.9)

    def __post_init__(self) -> None:
        object.__setattr__(self, "neg", tuple(float(v) for v in self.neg))
        object.__setattr__(self, "pos", tuple(float(v) for v in self.pos))
        _check_interval("gamma_neg", self.neg, (0.0, 1.0))
        _check_interval("gamma_pos", self.pos, (0.0, 1.0))

    def sample(self, rng: Generator) -> AttenuationParams:
        """Draw one gamma per sign; the pair applies to the whole image."""
        return AttenuationParams(float(rng.uniform(*self.neg)), float(rng.uniform(*self.pos)), ranges=self)


@dataclass(frozen=True)
class AttenuationParams:
    gamma_neg: float
    gamma_pos: float
    ranges: AttenuationRanges = field(default_factory=AttenuationRanges, compare=False)

    def __post_init__(self) -> None:
        for name, value, (low, high) in (
            ("gamma_neg", self.gamma_neg, self.ranges.neg),
            ("gamma_pos", self.gamma_pos, self.ranges.pos),
        ):
            if not low <= value <= high:
                msg = f"{name}={value} outside [{low}, {high}]"
                raise RangeError(msg)


def _attenuate(plane: NDArray[np.float64], params: AttenuationParams) -> NDArray[np.float64]:
    return np.where(plane < 0, plane * params.gamma_neg, np.where(plane > 0, plane * params.gamma_pos, plane))


def attenuate_chroma(prior: ChromaPlanes, params: AttenuationParams) -> ChromaPlanes:
    """Shrink negative values by ``gamma_neg`` and positive values by ``gamma_pos``, per plane."""
    return ChromaPlanes(_attenuate(prior.a, params), _attenuate(prior.b, params))
