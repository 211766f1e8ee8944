from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import DimensionError, RangeError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

L_RANGE = (0.0, 100.0)
CHROMA_RANGE = (-128.0, 127.0)
LUMINANCE_8BIT_RANGE = (0.0, 255.0)


class DomainTag(str, enum.Enum):
    """Origin of a luminance plane."""

    REAL_DEGRADED = "real_degraded"
    SYNTHETIC_DEGRADED = "synthetic_degraded"
    NON_DEGRADED = "non_degraded"
    RESTORED = "restored"

    def __str__(self) -> str:
        return self.value


def _readonly(values: ArrayLike, dtype: type = np.float64) -> NDArray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def _check_plane(name: str, plane: NDArray, bounds: tuple[float, float]) -> None:
    if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
        msg = f"{name} must be a non-empty H x W plane, got shape {plane.shape}"
        raise DimensionError(msg)
    low, high = bounds
    inside = (plane >= low) & (plane <= high)
    if not inside.all():
        bad = plane[~inside]
        msg = f"{name} has {bad.size} value(s) outside [{low}, {high}], e.g. {bad.flat[0]!r}"
        raise RangeError(msg)


def _check_same_shape(**planes: NDArray) -> None:
    shapes = {name: plane.shape for name, plane in planes.items()}
    if len(set(shapes.values())) > 1:
        msg = f"Planes must share dimensions, got {shapes}"
        raise DimensionError(msg)


@dataclass(frozen=True, eq=False)
class RgbImage:
    """An 8-bit sRGB image stored as an H x W x 3 ``uint8`` array."""

    pixels: NDArray[np.uint8]

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            msg = f"RGB pixels must have shape H x W x 3 with H, W >= 1, got {pixels.shape}"
            raise DimensionError(msg)
        if not np.issubdtype(pixels.dtype, np.integer):
            if not np.array_equal(pixels, np.round(pixels)):
                msg = "RGB samples must be integers"
                raise RangeError(msg)
        if pixels.min() < 0 or pixels.max() > 255:
            msg = f"RGB samples must lie in [0, 255], got [{pixels.min()}, {pixels.max()}]"
            raise RangeError(msg)
        object.__setattr__(self, "pixels", _readonly(pixels, np.uint8))

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    @classmethod
    def uniform(cls, rgb: tuple[int, int, int], height: int, width: int) -> RgbImage:
        return cls(np.broadcast_to(np.asarray(rgb, dtype=np.uint8), (height, width, 3)))


@dataclass(frozen=True, eq=False)
class ChromaPlanes:
    """The a and b planes of a CIELAB image."""

    a: NDArray[np.float64]
    b: NDArray[np.float64]

    def __post_init__(self) -> None:
        a = _readonly(self.a)
        b = _readonly(self.b)
        _check_plane("a", a, CHROMA_RANGE)
        _check_plane("b", b, CHROMA_RANGE)
        _check_same_shape(a=a, b=b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.a.shape[0]), int(self.a.shape[1]))

    def stack(self) -> NDArray[np.float64]:
        """Return the planes as a 2 x H x W array."""
        return np.stack([self.a, self.b])

    @classmethod
    def zeros(cls, height: int, width: int) -> ChromaPlanes:
        return cls(np.zeros((height, width)), np.zeros((height, width)))


@dataclass(frozen=True, eq=False)
class LabImage:
    """A CIELAB image with L in [0, 100] and a, b in [-128, 127], double precision."""

    L: NDArray[np.float64]
    a: NDArray[np.float64]
    b: NDArray[np.float64]

    def __post_init__(self) -> None:
        lightness = _readonly(self.L)
        a = _readonly(self.a)
        b = _readonly(self.b)
        _check_plane("L", lightness, L_RANGE)
        _check_plane("a", a, CHROMA_RANGE)
        _check_plane("b", b, CHROMA_RANGE)
        _check_same_shape(L=lightness, a=a, b=b)
        object.__setattr__(self, "L", lightness)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.L.shape[0]), int(self.L.shape[1]))

    @property
    def chroma(self) -> ChromaPlanes:
        return ChromaPlanes(self.a, self.b)

    def to_array(self) -> NDArray[np.float64]:
        """Return an H x W x 3 array ordered (L, a, b)."""
        return np.stack([self.L, self.a, self.b], axis=-1)

    @classmethod
    def from_array(cls, lab: ArrayLike) -> LabImage:
        lab = np.asarray(lab, dtype=np.float64)
        if lab.ndim != 3 or lab.shape[2] != 3:
            msg = f"Lab array must have shape H x W x 3, got {lab.shape}"
            raise DimensionError(msg)
        return cls(lab[..., 0], lab[..., 1], lab[..., 2])

    def with_chroma(self, chroma: ChromaPlanes) -> LabImage:
        return LabImage(self.L, chroma.a, chroma.b)

    def crop(self, row: int, col: int, height: int, width: int) -> LabImage:
        window = (slice(row, row + height), slice(col, col + width))
        return LabImage(self.L[window], self.a[window], self.b[window])


@dataclass(frozen=True, eq=False)
class LuminancePlane:
    """Luminance on the 8-bit scale [0, 255], tagged with the domain it came from."""

    values: NDArray[np.float64]
    domain_tag: DomainTag

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        _check_plane("luminance", values, LUMINANCE_8BIT_RANGE)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domain_tag", DomainTag(self.domain_tag))

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))
