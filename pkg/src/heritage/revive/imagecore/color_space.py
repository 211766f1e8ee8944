"""sRGB (D65) <-> CIELAB conversion and the 8-bit luminance bridge."""

from __future__ import annotations

import warnings
from typing import TYPE_CHECKING

import numpy as np
from skimage import color  # type: ignore[import-not-found]

from .planes import CHROMA_RANGE, L_RANGE, DomainTag, LabImage, LuminancePlane, RgbImage

if TYPE_CHECKING:
    from numpy.typing import NDArray


def rgb_array_to_lab(pixels: NDArray) -> NDArray[np.float64]:
    """Convert an H x W x 3 array of 8-bit samples to an H x W x 3 Lab array."""
    lab = color.rgb2lab(np.asarray(pixels, dtype=np.float64) / 255.0, illuminant="D65", observer="2")
    # rounding noise can push L a hair past 0 or 100
    lab[..., 0] = np.clip(lab[..., 0], *L_RANGE)
    lab[..., 1:] = np.clip(lab[..., 1:], *CHROMA_RANGE)
    return np.asarray(lab, dtype=np.float64)


def lab_array_to_rgb(lab: NDArray) -> NDArray[np.uint8]:
    """Convert an H x W x 3 Lab array to 8-bit sRGB, clamping out-of-gamut colours."""
    with warnings.catch_warnings():
        # out-of-gamut colours are clamped below
        warnings.filterwarnings("ignore", message=".*negative Z values.*", category=UserWarning)
        rgb = color.lab2rgb(np.asarray(lab, dtype=np.float64), illuminant="D65", observer="2")
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def rgb_to_lab(img: RgbImage) -> LabImage:
    return LabImage.from_array(rgb_array_to_lab(img.pixels))


def lab_to_rgb(img: LabImage) -> RgbImage:
    return RgbImage(lab_array_to_rgb(img.to_array()))


def luminance_8bit(img: LabImage, domain_tag: DomainTag | str) -> LuminancePlane:
    """Rescale Lab lightness from [0, 100] to the 8-bit range used by the degradation model."""
    return LuminancePlane(np.clip(img.L * 255.0 / 100.0, 0.0, 255.0), DomainTag(domain_tag))


def lightness_from_8bit(plane: LuminancePlane) -> NDArray[np.float64]:
    """Inverse of :func:`luminance_8bit` on the values, returning L in [0, 100]."""
    return np.clip(plane.values * 100.0 / 255.0, *L_RANGE)
