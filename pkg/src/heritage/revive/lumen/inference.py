from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
import torch

from ..exceptions import DimensionError, DomainTagError
from ..imagecore import LUMINANCE_8BIT_RANGE, DomainTag, LuminancePlane
from ..nnet import as_tensor, freeze, load_checkpoint, save_checkpoint, to_numpy
from .config import LumenArchitecture
from .networks import LatentMapping, LuminanceVae, VaeDomain

if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path

logger = logging.getLogger(__name__)

BUNDLE_STAGE = "lumen"
DEGRADED_TAGS = (DomainTag.REAL_DEGRADED, DomainTag.SYNTHETIC_DEGRADED)


@dataclass(frozen=True, eq=False)
class LumenBundle:
    """Everything needed to restore luminance: encoder side, mapping, decoder side.

    The constructor refuses VAEs in the wrong role, so the restored luminance is always
    decoded by the non-degraded VAE.
    """

    vae_shared: LuminanceVae
    vae_nd: LuminanceVae
    mapping: LatentMapping
    resolution: int

    def __post_init__(self) -> None:
        if self.vae_shared.domain is not VaeDomain.SHARED_DEGRADED:
            msg = f"Bundle encoder VAE must be shared_degraded, got {self.vae_shared.domain}"
            raise DomainTagError(msg)
        if self.vae_nd.domain is not VaeDomain.NON_DEGRADED:
            msg = f"Bundle decoder VAE must be non_degraded, got {self.vae_nd.domain}"
            raise DomainTagError(msg)
        if self.resolution % self.architecture.downsampling:
            msg = f"Resolution {self.resolution} is not divisible by {self.architecture.downsampling}"
            raise DimensionError(msg)
        for module in (self.vae_shared, self.vae_nd, self.mapping):
            freeze(module)

    @property
    def architecture(self) -> LumenArchitecture:
        return self.vae_shared.arch

    def restore_batch(self, x: torch.Tensor) -> torch.Tensor:
        """Restore a B x 1 x H x W batch with posterior means, clamped to [0, 255]."""
        with torch.no_grad():
            mu, _ = self.vae_shared.encode(x)
            restored = self.vae_nd.decode(self.mapping(mu))
        return restored.clamp(*LUMINANCE_8BIT_RANGE)


def restore_luminance(plane: LuminancePlane, bundle: LumenBundle) -> LuminancePlane:
    """Decode the mapped shared-domain latent of ``plane`` with the non-degraded VAE.

    Raises:
        DomainTagError: if ``plane`` is not tagged real or synthetic degraded.
        DimensionError: if ``plane`` is not ``bundle.resolution`` on each side.
    """
    if plane.domain_tag not in DEGRADED_TAGS:
        msg = f"restore_luminance expects degraded luminance, got {plane.domain_tag}"
        raise DomainTagError(msg)
    if plane.shape != (bundle.resolution, bundle.resolution):
        msg = f"Luminance plane is {plane.shape}, the bundle was trained at {bundle.resolution} x {bundle.resolution}"
        raise DimensionError(msg)
    restored = bundle.restore_batch(as_tensor(plane.values)[None, None])[0, 0]
    return LuminancePlane(np.clip(to_numpy(restored), *LUMINANCE_8BIT_RANGE), DomainTag.RESTORED)


def save_lumen_bundle(
    path: str | Path, bundle: LumenBundle, *, config_hash: str = "", metadata: Mapping[str, Any] | None = None
) -> Path:
    header = {"architecture": bundle.architecture.to_json(), "resolution": bundle.resolution, **(metadata or {})}
    return save_checkpoint(
        path,
        stage=BUNDLE_STAGE,
        modules={"vae_shared": bundle.vae_shared, "vae_nd": bundle.vae_nd, "mapping": bundle.mapping},
        config_hash=config_hash,
        metadata=header,
    )


def load_lumen_bundle(path: str | Path) -> LumenBundle:
    """Rebuild a bundle written by :func:`save_lumen_bundle`.

    Raises:
        TrainingStateError: if the file is not a luminance bundle.
    """
    archive = load_checkpoint(path)
    archive.check_stage(BUNDLE_STAGE)
    arch = LumenArchitecture.from_json(archive.metadata["architecture"])
    vae_shared = archive.load_module("vae_shared", LuminanceVae(arch, VaeDomain.SHARED_DEGRADED))
    vae_nd = archive.load_module("vae_nd", LuminanceVae(arch, VaeDomain.NON_DEGRADED))
    mapping = archive.load_module("mapping", LatentMapping(arch))
    logger.info("Loaded luminance bundle from %s", path)
    return LumenBundle(vae_shared, vae_nd, mapping, int(archive.metadata["resolution"]))  # type: ignore[arg-type]
