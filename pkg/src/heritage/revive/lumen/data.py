from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from ..degrade import sample_degradation
from ..exceptions import ConfigurationError, DimensionError, DomainTagError
from ..imagecore import DomainTag, LuminancePlane

if TYPE_CHECKING:
    from numpy.random import Generator
    from numpy.typing import NDArray

    from ..degrade import DegradationSamplerConfig


def random_crop(values: NDArray[np.float64], size: int, rng: Generator) -> NDArray[np.float64]:
    """A ``size`` x ``size`` window at a uniformly drawn position."""
    height, width = values.shape
    if height < size or width < size:
        msg = f"Cannot crop {size} x {size} from a {height} x {width} plane"
        raise DimensionError(msg)
    row = int(rng.integers(height - size + 1))
    col = int(rng.integers(width - size + 1))
    return values[row : row + size, col : col + size]


@dataclass(frozen=True)
class LuminanceCorpus:
    """Unpaired luminance planes used by the luminance trainers.

    Attributes:
        real_degraded: planes tagged ``real_degraded``; may be empty, in which case every
            shared-domain sample is synthesised.
        non_degraded: planes tagged ``non_degraded``.
    """

    non_degraded: tuple[LuminancePlane, ...]
    real_degraded: tuple[LuminancePlane, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "non_degraded", tuple(self.non_degraded))
        object.__setattr__(self, "real_degraded", tuple(self.real_degraded))
        if not self.non_degraded:
            msg = "The luminance corpus holds no non-degraded images"
            raise ConfigurationError(msg)
        for plane in self.non_degraded:
            if plane.domain_tag is not DomainTag.NON_DEGRADED:
                msg = f"Non-degraded corpus entry is tagged {plane.domain_tag}"
                raise DomainTagError(msg)
        for plane in self.real_degraded:
            if plane.domain_tag is not DomainTag.REAL_DEGRADED:
                msg = f"Real-degraded corpus entry is tagged {plane.domain_tag}"
                raise DomainTagError(msg)

    def non_degraded_crop(self, size: int, rng: Generator) -> NDArray[np.float64]:
        plane = self.non_degraded[int(rng.integers(len(self.non_degraded)))]
        return random_crop(plane.values, size, rng)

    def real_degraded_crop(self, size: int, rng: Generator) -> NDArray[np.float64]:
        plane = self.real_degraded[int(rng.integers(len(self.real_degraded)))]
        return random_crop(plane.values, size, rng)


def synthetic_pair(
    corpus: LuminanceCorpus, size: int, sampler: DegradationSamplerConfig, rng: Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """A non-degraded crop and its synthetically degraded counterpart."""
    clean = corpus.non_degraded_crop(size, rng)
    degraded, _ = sample_degradation(LuminancePlane(clean, DomainTag.NON_DEGRADED), sampler, rng)
    return degraded.values, clean


def shared_batch(
    corpus: LuminanceCorpus,
    batch_size: int,
    size: int,
    sampler: DegradationSamplerConfig,
    rd_probability: float,
    rng: Generator,
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """A batch for the shared-degraded VAE.

    Each sample is a real degraded crop with probability ``rd_probability`` (when the
    corpus has any), otherwise a synthetically degraded non-degraded crop.

    Returns:
        The B x 1 x size x size batch and a boolean vector marking the real degraded samples.
    """
    samples = []
    is_real = np.zeros(batch_size, dtype=bool)
    for i in range(batch_size):
        if corpus.real_degraded and rng.random() < rd_probability:
            samples.append(corpus.real_degraded_crop(size, rng))
            is_real[i] = True
        else:
            samples.append(synthetic_pair(corpus, size, sampler, rng)[0])
    return np.stack(samples)[:, None], is_real


def non_degraded_batch(corpus: LuminanceCorpus, batch_size: int, size: int, rng: Generator) -> NDArray[np.float64]:
    return np.stack([corpus.non_degraded_crop(size, rng) for _ in range(batch_size)])[:, None]


def paired_batch(
    corpus: LuminanceCorpus, batch_size: int, size: int, sampler: DegradationSamplerConfig, rng: Generator
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Aligned (synthetic degraded, non-degraded) batches for the mapping network."""
    pairs = [synthetic_pair(corpus, size, sampler, rng) for _ in range(batch_size)]
    degraded = np.stack([p[0] for p in pairs])[:, None]
    clean = np.stack([p[1] for p in pairs])[:, None]
    return degraded, clean
