"""PNG reading and writing; 8-bit RGB for images, 1-bit for masks."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from PIL import Image

from .planes import RgbImage

if TYPE_CHECKING:
    from numpy.typing import NDArray


def read_png(path: str | Path) -> RgbImage:
    with Image.open(Path(path)) as image:
        return RgbImage(np.asarray(image.convert("RGB"), dtype=np.uint8))


def write_png(img: RgbImage, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(path, format="PNG")
    return path


def read_binary_png(path: str | Path) -> NDArray[np.bool_]:
    with Image.open(Path(path)) as image:
        return np.asarray(image.convert("L"), dtype=np.uint8) > 0


def write_binary_png(mask: NDArray[np.bool_], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(mask, dtype=bool)).convert("1").save(path, format="PNG")
    return path


def png_size(path: str | Path) -> tuple[int, int]:
    """Return (height, width) without decoding the pixels."""
    with Image.open(Path(path)) as image:
        width, height = image.size
    return height, width
