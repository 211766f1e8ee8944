"""Colour-prior extraction.

The prior keeps the chroma of pixels that differ clearly from the silk background:

1. isolate the background (external mask, or pixels whose chroma lies in the silk box),
2. keep the smooth, silk-coloured background pixels as candidates,
3. cluster candidate chroma with K-means and take the largest cluster as the silk colour,
4. mask pixels farther than ``tau`` from the silk colour and keep their chroma.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from sklearn.cluster import KMeans  # type: ignore[import-not-found]

from ..exceptions import DimensionError, NoSilkFoundError
from ..imagecore import ChromaPlanes
from .config import PriorConfig
from .types import PriorMask, SilkCandidates, SilkEstimate

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from ..imagecore import LabImage

logger = logging.getLogger(__name__)

DEFAULT_SILK = (0.0, 0.0)


def _difference(plane: NDArray[np.float64], axis: int) -> NDArray[np.float64]:
    """Forward difference along ``axis``; the trailing row or column reuses the backward one."""
    if plane.shape[axis] < 2:
        return np.zeros_like(plane)
    forward = np.diff(plane, axis=axis)
    return np.concatenate([forward, forward.take([-1], axis=axis)], axis=axis)


def chroma_gradient(img: LabImage) -> NDArray[np.float64]:
    """L2 norm over the four partial derivatives of the a and b planes."""
    partials = [_difference(plane, axis) for plane in (img.a, img.b) for axis in (0, 1)]
    return np.sqrt(sum(d * d for d in partials))


def background_mask(img: LabImage, cfg: PriorConfig | None = None, external: PriorMask | None = None) -> PriorMask:
    """Return ``external`` unchanged if given, else the pixels whose chroma lies in the silk box.

    Raises:
        DimensionError: if ``external`` does not match the image.
    """
    if external is not None:
        external.check_shape(img.shape)
        return external
    cfg = cfg or PriorConfig()
    return PriorMask(cfg.silk_box.contains(img.a, img.b))


def filter_silk_candidates(img: LabImage, bg: PriorMask, cfg: PriorConfig) -> SilkCandidates:
    bg.check_shape(img.shape)
    gradient = chroma_gradient(img)
    mask = bg.mask & cfg.silk_box.contains(img.a, img.b) & (gradient <= cfg.gradient_threshold)
    return SilkCandidates(mask, gradient)


def estimate_silk_color(img: LabImage, candidates: SilkCandidates, cfg: PriorConfig) -> SilkEstimate:
    """Cluster candidate chroma and return the mean of the largest cluster.

    Equal-sized clusters are ranked by their mean gradient, then by the norm of their centroid.

    Raises:
        NoSilkFoundError: if there are no candidates.
    """
    if candidates.mask.shape != img.shape:
        msg = f"Candidates of shape {candidates.mask.shape} do not match the image of shape {img.shape}"
        raise DimensionError(msg)
    if not candidates.mask.any():
        box = cfg.silk_box
        msg = f"No silk candidates (0 of {candidates.mask.size} pixels) in the silk box a={box.a}, b={box.b}"
        raise NoSilkFoundError(msg)

    points = np.stack([img.a[candidates.mask], img.b[candidates.mask]], axis=1)
    gradients = candidates.gradient[candidates.mask]
    n_clusters = min(cfg.k, len(np.unique(points, axis=0)))
    kmeans = KMeans(
        n_clusters=n_clusters,
        init="k-means++",
        n_init=1,
        max_iter=cfg.kmeans_max_iters,
        random_state=cfg.kmeans_seed,
    ).fit(points)

    labels = np.asarray(kmeans.labels_)
    ranking = []
    for label in np.unique(labels):
        members = labels == label
        centroid = points[members].mean(axis=0)
        ranking.append((-int(members.sum()), float(gradients[members].mean()), float(np.hypot(*centroid)), centroid))
    ranking.sort(key=lambda entry: entry[:3])
    size, _, _, centroid = ranking[0]
    return SilkEstimate((float(centroid[0]), float(centroid[1])), -size / len(points))


def compute_prior_mask(img: LabImage, c_silk: tuple[float, float], tau: float) -> PriorMask:
    """Mark pixels whose ab distance to ``c_silk`` strictly exceeds ``tau``."""
    da = img.a - c_silk[0]
    db = img.b - c_silk[1]
    return PriorMask(np.sqrt(da * da + db * db) > tau)


def extract_prior(img: LabImage, mask: PriorMask) -> ChromaPlanes:
    mask.check_shape(img.shape)
    keep = mask.mask
    return ChromaPlanes(np.where(keep, img.a, 0.0), np.where(keep, img.b, 0.0))


@dataclass(frozen=True, eq=False)
class ColorPrior:
    """Everything the four extraction steps produced for one image."""

    background: PriorMask
    candidates: SilkCandidates
    silk: SilkEstimate
    mask: PriorMask
    chroma: ChromaPlanes
    fallback: bool = False


def extract_color_prior(
    img: LabImage,
    cfg: PriorConfig | None = None,
    external: PriorMask | None = None,
    fallback: bool = True,
) -> ColorPrior:
    """Run the four extraction steps on ``img``.

    Args:
        img: the painting in Lab.
        cfg: extraction parameters, defaults if omitted.
        external: background mask from an outside segmenter, used verbatim.
        fallback: if no silk candidates exist, use ``(0, 0)`` as silk colour instead of raising.

    Raises:
        NoSilkFoundError: if no silk candidates exist and ``fallback`` is false.
    """
    cfg = cfg or PriorConfig()
    bg = background_mask(img, cfg, external)
    candidates = filter_silk_candidates(img, bg, cfg)
    used_fallback = False
    try:
        silk = estimate_silk_color(img, candidates, cfg)
    except NoSilkFoundError:
        if not fallback:
            raise
        logger.warning("No silk candidates found, falling back to c_silk=%s", DEFAULT_SILK)
        silk = SilkEstimate(DEFAULT_SILK, 0.0)
        used_fallback = True
    mask = compute_prior_mask(img, silk.c_silk, cfg.tau)
    logger.debug(
        "Silk colour %s (support %.3f), prior coverage %.3f", silk.c_silk, silk.support_fraction, mask.coverage
    )
    return ColorPrior(bg, candidates, silk, mask, extract_prior(img, mask), used_fallback)
