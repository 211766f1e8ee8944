"""Hue correction at inference time and the two-stage restoration pipeline."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import torch

from ..exceptions import DimensionError, ReviveError, StageError
from ..imagecore import (
    CHROMA_RANGE,
    ChromaPlanes,
    DomainTag,
    LabImage,
    LuminancePlane,
    PatchGrid,
    lab_to_rgb,
    lightness_from_8bit,
    luminance_8bit,
)
from ..lumen import restore_luminance
from ..nnet import as_tensor, freeze, load_checkpoint, save_checkpoint, to_numpy
from ..prior import PriorMask, extract_color_prior
from .config import HueArchitecture
from .networks import HueNetwork, normalize_lab
from .training import HUE_STAGE, hue_metadata

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping
    from pathlib import Path

    from numpy.typing import NDArray

    from ..imagecore import RgbImage
    from ..lumen import LumenBundle
    from ..prior import ColorPrior, PriorConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HueBundle:
    """A trained, frozen hue network and the crop size it was trained at."""

    net: HueNetwork
    resolution: int

    def __post_init__(self) -> None:
        freeze(self.net)

    @property
    def architecture(self) -> HueArchitecture:
        return self.net.arch


def save_hue_bundle(
    path: str | Path, bundle: HueBundle, *, config_hash: str = "", metadata: Mapping[str, Any] | None = None
) -> Path:
    return save_checkpoint(
        path,
        stage=HUE_STAGE,
        modules={"hue": bundle.net},
        config_hash=config_hash,
        metadata=hue_metadata(bundle.architecture, bundle.resolution, **(metadata or {})),
    )


def load_hue_bundle(path: str | Path) -> HueBundle:
    """Load a hue bundle or the latest state of a hue training checkpoint."""
    archive = load_checkpoint(path)
    archive.check_stage(HUE_STAGE)
    arch = HueArchitecture.from_json(archive.metadata["architecture"])
    net = archive.load_module("hue", HueNetwork(arch))
    logger.info("Loaded hue network (%s encoder) from %s", archive.metadata.get("encoder", "?"), path)
    return HueBundle(net, int(archive.metadata["resolution"]))  # type: ignore[arg-type]


def correct_hue(L_hat: LuminancePlane, prior: ChromaPlanes, mask: PriorMask, net: HueNetwork) -> ChromaPlanes:
    """Predict restored chroma from enhanced luminance and the masked colour prior.

    Prior chroma outside ``mask`` is zeroed before it reaches the network.

    Raises:
        DimensionError: if luminance, prior and mask sizes differ, or the size is not a
            multiple of the encoder stride.
    """
    if not L_hat.shape == prior.shape == mask.shape:
        msg = f"Luminance {L_hat.shape}, prior {prior.shape} and mask {mask.shape} must share dimensions"
        raise DimensionError(msg)
    keep = mask.mask
    lightness = as_tensor(lightness_from_8bit(L_hat))[None, None]
    prior_ab = as_tensor(np.stack([np.where(keep, prior.a, 0.0), np.where(keep, prior.b, 0.0)]))[None]
    mask_t = as_tensor(keep.astype(np.float64))[None, None]
    with torch.no_grad():
        ab = to_numpy(net(normalize_lab(lightness, prior_ab), mask_t).ab[0])
    ab = np.clip(ab, *CHROMA_RANGE)
    return ChromaPlanes(ab[0], ab[1])


def tiled(
    shape: tuple[int, int], size: int, channels: int, fn: Callable[[int, int], NDArray[np.float64]]
) -> NDArray[np.float64]:
    """Evaluate ``fn(row, col)`` on half-overlapping ``size`` windows and average the overlaps.

    Returns:
        A ``channels`` x H x W array.
    """
    height, width = shape
    grid = PatchGrid.covering(height, width, size, max(1, size // 2))
    total = np.zeros((channels, height, width))
    count = np.zeros((height, width))
    for row, col in grid.origins:
        total[:, row : row + size, col : col + size] += fn(row, col)
        count[row : row + size, col : col + size] += 1.0
    return total / count


@dataclass(frozen=True, eq=False)
class RestoredPainting:
    lab: LabImage
    rgb: RgbImage
    luminance: LuminancePlane
    prior: ColorPrior
    timings: dict[str, float] = field(default_factory=dict)


def _describe(err: Exception) -> str:
    return f"{type(err).__name__}: {err}"


def restore_painting(
    img: LabImage,
    lumen: LumenBundle,
    hue: HueBundle,
    prior_cfg: PriorConfig | None = None,
    external_background: PriorMask | None = None,
) -> RestoredPainting:
    """Restore a degraded painting: enhance luminance, then correct hue.

    Both stages run on half-overlapping tiles of their trained size; overlapping outputs
    are averaged. The colour prior comes from the original degraded chroma of the whole
    painting.

    Wall-clock seconds per stage are returned in ``timings``.

    Raises:
        StageError: naming ``luminance``, ``prior`` or ``hue`` when that stage fails.
    """
    timings: dict[str, float] = {}
    started = time.perf_counter()
    degraded = luminance_8bit(img, DomainTag.REAL_DEGRADED)
    try:
        lumen_size = lumen.resolution

        def enhance(row: int, col: int) -> NDArray[np.float64]:
            window = degraded.values[row : row + lumen_size, col : col + lumen_size]
            return restore_luminance(LuminancePlane(window, DomainTag.REAL_DEGRADED), lumen).values[None]

        restored = LuminancePlane(tiled(img.shape, lumen_size, 1, enhance)[0], DomainTag.RESTORED)
    except (ReviveError, ValueError, RuntimeError) as err:
        raise StageError("luminance", _describe(err)) from err
    timings["luminance"] = time.perf_counter() - started

    started = time.perf_counter()
    try:
        prior = extract_color_prior(img, prior_cfg, external_background)
    except (ReviveError, ValueError, RuntimeError) as err:
        raise StageError("prior", _describe(err)) from err
    timings["prior"] = time.perf_counter() - started

    started = time.perf_counter()
    try:
        hue_size = hue.resolution

        def colorize(row: int, col: int) -> NDArray[np.float64]:
            window = (slice(row, row + hue_size), slice(col, col + hue_size))
            chroma = correct_hue(
                LuminancePlane(restored.values[window], DomainTag.RESTORED),
                ChromaPlanes(prior.chroma.a[window], prior.chroma.b[window]),
                PriorMask(prior.mask.mask[window]),
                hue.net,
            )
            return chroma.stack()

        ab = tiled(img.shape, hue_size, 2, colorize)
    except (ReviveError, ValueError, RuntimeError) as err:
        raise StageError("hue", _describe(err)) from err
    timings["hue"] = time.perf_counter() - started

    lab = LabImage(lightness_from_8bit(restored), ab[0], ab[1])
    logger.info("Restored %d x %d painting (prior coverage %.3f)", *img.shape, prior.mask.coverage)
    return RestoredPainting(lab, lab_to_rgb(lab), restored, prior, timings)
