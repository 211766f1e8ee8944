"""Image planes, colour-space conversion and patch extraction shared by every stage."""

from __future__ import annotations

from .color_space import (
    lab_array_to_rgb,
    lab_to_rgb,
    lightness_from_8bit,
    luminance_8bit,
    rgb_array_to_lab,
    rgb_to_lab,
)
from .patches import PatchGrid, extract_patches
from .planes import (
    CHROMA_RANGE,
    L_RANGE,
    LUMINANCE_8BIT_RANGE,
    ChromaPlanes,
    DomainTag,
    LabImage,
    LuminancePlane,
    RgbImage,
)
from .png_io import png_size, read_binary_png, read_png, write_binary_png, write_png

__all__ = [
    "CHROMA_RANGE",
    "LUMINANCE_8BIT_RANGE",
    "L_RANGE",
    "ChromaPlanes",
    "DomainTag",
    "LabImage",
    "LuminancePlane",
    "PatchGrid",
    "RgbImage",
    "extract_patches",
    "lab_array_to_rgb",
    "lab_to_rgb",
    "lightness_from_8bit",
    "luminance_8bit",
    "png_size",
    "read_binary_png",
    "read_png",
    "rgb_array_to_lab",
    "rgb_to_lab",
    "write_binary_png",
    "write_png",
]
