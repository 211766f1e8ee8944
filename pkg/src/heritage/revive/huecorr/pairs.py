"""Training inputs for the hue network built from non-degraded paintings."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..degrade import AttenuationRanges, attenuate_chroma
from ..exceptions import ConfigurationError, DimensionError, EmptyInputError, NoSilkFoundError
from ..imagecore import ChromaPlanes, LabImage
from ..prior import PriorConfig, PriorMask, extract_color_prior

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.random import Generator
    from numpy.typing import NDArray

    from ..degrade import AttenuationParams
    from ..prior import ColorPrior

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HueTrainingPair:
    """Network input (lightness plus attenuated, masked prior), target chroma and mask."""

    input: LabImage
    target: ChromaPlanes
    mask: PriorMask
    attenuation: AttenuationParams

    @property
    def shape(self) -> tuple[int, int]:
        return self.input.shape

    def crop(self, row: int, col: int, size: int) -> HueTrainingPair:
        window = (slice(row, row + size), slice(col, col + size))
        return HueTrainingPair(
            self.input.crop(row, col, size, size),
            ChromaPlanes(self.target.a[window], self.target.b[window]),
            PriorMask(self.mask.mask[window]),
            self.attenuation,
        )


def make_hue_training_pair(
    nd_image: LabImage,
    prior_cfg: PriorConfig | None,
    rng: Generator,
    ranges: AttenuationRanges | None = None,
    prior: ColorPrior | None = None,
) -> HueTrainingPair | None:
    """Simulate faded pigment on a non-degraded painting.

    The colour prior of ``nd_image`` is attenuated with one freshly drawn pair of gammas;
    pixels outside the prior mask carry zero chroma in the input. ``prior`` skips the
    extraction when it was already computed for this image.

    Returns:
        The pair, or None (logged) if no silk colour can be estimated.
    """
    if prior is None:
        try:
            prior = extract_color_prior(nd_image, prior_cfg, fallback=False)
        except NoSilkFoundError as err:
            logger.warning("Skipping training image: %s", err)
            return None
    params = (ranges or AttenuationRanges()).sample(rng)
    faded = attenuate_chroma(prior.chroma, params)
    keep = prior.mask.mask
    masked = ChromaPlanes(np.where(keep, faded.a, 0.0), np.where(keep, faded.b, 0.0))
    return HueTrainingPair(nd_image.with_chroma(masked), nd_image.chroma, prior.mask, params)


@dataclass(frozen=True, eq=False)
class HueCorpus:
    """Non-degraded paintings with their colour priors extracted once.

    Paintings whose silk colour cannot be estimated are dropped with a warning.
    """

    images: tuple[LabImage, ...]
    priors: tuple[ColorPrior, ...]

    @classmethod
    def from_images(cls, images: Sequence[LabImage], prior_cfg: PriorConfig | None = None) -> HueCorpus:
        if not images:
            msg = "The hue corpus holds no non-degraded images"
            raise ConfigurationError(msg)
        kept, priors = [], []
        for index, image in enumerate(images):
            try:
                priors.append(extract_color_prior(image, prior_cfg or PriorConfig(), fallback=False))
            except NoSilkFoundError as err:
                logger.warning("Dropping painting %d from the hue corpus: %s", index, err)
                continue
            kept.append(image)
        if not kept:
            msg = "No painting in the hue corpus has an estimable silk colour"
            raise EmptyInputError(msg)
        logger.info("Hue corpus: %d of %d paintings usable", len(kept), len(images))
        return cls(tuple(kept), tuple(priors))

    def __len__(self) -> int:
        return len(self.images)

    def check_size(self, size: int) -> None:
        small = [img.shape for img in self.images if min(img.shape) < size]
        if small:
            msg = f"{len(small)} painting(s) are smaller than the {size} x {size} training crop, e.g. {small[0]}"
            raise DimensionError(msg)

    def sample(self, size: int, ranges: AttenuationRanges, rng: Generator) -> HueTrainingPair:
        """A random ``size`` x ``size`` window of a freshly attenuated pair."""
        index = int(rng.integers(len(self.images)))
        pair = make_hue_training_pair(self.images[index], None, rng, ranges, self.priors[index])
        height, width = pair.shape  # type: ignore[union-attr]
        row = int(rng.integers(height - size + 1))
        col = int(rng.integers(width - size + 1))
        return pair.crop(row, col, size)  # type: ignore[union-attr]


def stack_pairs(
    pairs: Sequence[HueTrainingPair],
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Batch arrays: L (B x 1 x H x W), input ab, target ab (B x 2 x H x W) and mask (B x 1 x H x W)."""
    lightness = np.stack([p.input.L for p in pairs])[:, None]
    prior_ab = np.stack([np.stack([p.input.a, p.input.b]) for p in pairs])
    target_ab = np.stack([p.target.stack() for p in pairs])
    mask = np.stack([p.mask.mask for p in pairs])[:, None].astype(np.float64)
    return lightness, prior_ab, target_ab, mask
