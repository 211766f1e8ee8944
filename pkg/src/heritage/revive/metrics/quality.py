"""Per-image quality metrics on 8-bit RGB images."""

from __future__ import annotations

import enum
import math
from typing import TYPE_CHECKING

import numpy as np
from skimage.metrics import structural_similarity  # type: ignore[import-untyped]

from ..exceptions import DimensionError
from ..imagecore import DomainTag, RgbImage, luminance_8bit, rgb_to_lab

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from ..prior import PriorMask

PEAK = 255.0
SSIM_SIGMA = 1.5
SSIM_WINDOW = 11
SSIM_K1 = 0.01
SSIM_K2 = 0.03


class MaskPolicy(str, enum.Enum):
    """Which pixels enter an evaluation: all of them, or only those under the prior mask."""

    NONE = "none"
    PRIOR_MASK = "prior_mask"

    def __str__(self) -> str:
        return self.value


def _check_same_size(a: RgbImage, b: RgbImage) -> None:
    if a.shape != b.shape:
        msg = f"Images must share dimensions, got {a.shape} and {b.shape}"
        raise DimensionError(msg)


def psnr(a: RgbImage, b: RgbImage) -> float:
    """``10 log10(255^2 / MSE)`` over all channels; identical images give ``inf``.

    Raises:
        DimensionError: if the images differ in size.
    """
    _check_same_size(a, b)
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def ssim_luminance(img: RgbImage) -> NDArray[np.float64]:
    """The plane SSIM is computed on: Lab lightness on the 8-bit scale."""
    return luminance_8bit(rgb_to_lab(img), DomainTag.NON_DEGRADED).values


def ssim(a: RgbImage, b: RgbImage) -> float:
    """Mean SSIM of the 8-bit luminance planes.

    Uses an 11 x 11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, a dynamic range
    of 255 and population statistics.

    Raises:
        DimensionError: if the images differ in size or are smaller than the window.
    """
    _check_same_size(a, b)
    if min(a.shape) < SSIM_WINDOW:
        msg = f"SSIM needs images of at least {SSIM_WINDOW} x {SSIM_WINDOW}, got {a.shape}"
        raise DimensionError(msg)
    return float(
        structural_similarity(
            ssim_luminance(a),
            ssim_luminance(b),
            data_range=PEAK,
            gaussian_weights=True,
            sigma=SSIM_SIGMA,
            use_sample_covariance=False,
            K1=SSIM_K1,
            K2=SSIM_K2,
        )
    )


def colorfulness(img: RgbImage) -> float:
    """Hasler-Suesstrunk colourfulness of an RGB image.

    With ``rg = R - G`` and ``yb = (R + G) / 2 - B`` this is
    ``sqrt(var(rg) + var(yb)) + 0.3 * sqrt(mean(rg)^2 + mean(yb)^2)``.
    """
    rgb = img.pixels.astype(np.float64)
    red, green, blue = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    rg = red - green
    yb = 0.5 * (red + green) - blue
    spread = math.sqrt(float(rg.std()) ** 2 + float(yb.std()) ** 2)
    offset = math.sqrt(float(rg.mean()) ** 2 + float(yb.mean()) ** 2)
    return spread + 0.3 * offset


def delta_colorfulness(a: RgbImage, b: RgbImage) -> float:
    """``|colorfulness(a) - colorfulness(b)|``; the images may differ in size."""
    return abs(colorfulness(a) - colorfulness(b))


def apply_mask_policy(img: RgbImage, mask: PriorMask) -> RgbImage:
    """Paint every pixel outside ``mask`` black.

    Raises:
        DimensionError: if the mask does not match the image.
    """
    mask.check_shape(img.shape)
    return RgbImage(np.where(mask.mask[..., None], img.pixels, 0).astype(np.uint8))
