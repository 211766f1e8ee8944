"""Procedural silk paintings: a smooth silk ground with opaque pigment shapes."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.ndimage import gaussian_filter  # type: ignore[import-untyped]
from skimage import draw  # type: ignore[import-untyped]

from ..exceptions import ConfigurationError
from ..imagecore import CHROMA_RANGE, L_RANGE, LabImage
from ..prior import SilkBox

if TYPE_CHECKING:
    from numpy.random import Generator
    from numpy.typing import NDArray

# Cinnabar, malachite, azurite, ochre, indigo, rose; all farther than 30 ab units from
# the default silk colour.
DEFAULT_PALETTE = (
    (48.0, 62.0, 45.0),
    (55.0, -45.0, 20.0),
    (40.0, 10.0, -45.0),
    (65.0, 25.0, 62.0),
    (30.0, 15.0, -35.0),
    (60.0, 48.0, 2.0),
)

CHROMA_NOISE_SHARE = 0.1


class ShapeKind(str, enum.Enum):
    ELLIPSE = "ellipse"
    RECTANGLE = "rectangle"
    STROKE = "stroke"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic painting generator.

    Attributes:
        image_size: side length of the square painting in pixels.
        silk_center: mean (a, b) chroma of the silk ground.
        silk_jitter: per-painting uniform offset of the silk chroma, in ab units.
        silk_lightness: mean lightness of the silk ground.
        shape_count: inclusive range of pigment shapes per painting.
        palette: Lab colours the shapes are painted with.
        texture_amplitude: standard deviation of the lightness noise; chroma noise is a
            tenth of it.
        seed: master seed; painting ``i`` uses the generator ``default_rng([seed, i])``.
    """

    image_size: int = 64
    silk_center: tuple[float, float] = (8.0, 18.0)
    silk_jitter: float = 3.0
    silk_lightness: float = 78.0
    shape_count: tuple[int, int] = (5, 9)
    palette: tuple[tuple[float, float, float], ...] = DEFAULT_PALETTE
    texture_amplitude: float = 2.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "silk_center", tuple(float(v) for v in self.silk_center))
        object.__setattr__(self, "shape_count", tuple(int(v) for v in self.shape_count))
        object.__setattr__(self, "palette", tuple(tuple(float(v) for v in color) for color in self.palette))
        if self.image_size < 8:
            msg = f"image_size must be >= 8, got {self.image_size}"
            raise ConfigurationError(msg)
        if not self.palette:
            msg = "The palette must hold at least one colour"
            raise ConfigurationError(msg)
        if any(len(color) != 3 for color in self.palette):
            msg = f"Palette colours must be (L, a, b) triples, got {self.palette}"
            raise ConfigurationError(msg)
        low, high = self.shape_count
        if not 0 <= low <= high:
            msg = f"shape_count must satisfy 0 <= low <= high, got {self.shape_count}"
            raise ConfigurationError(msg)
        if self.silk_jitter < 0 or self.texture_amplitude < 0:
            msg = "silk_jitter and texture_amplitude must be non-negative"
            raise ConfigurationError(msg)
        a, b = self.silk_center
        if not SilkBox().contains(np.array(a), np.array(b)):
            msg = f"silk_center {self.silk_center} lies outside the default silk box"
            raise ConfigurationError(msg)

    def to_json(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> SynthConfig:
        return cls(**data)


def _smooth_field(rng: Generator, shape: tuple[int, int], sigma: float) -> NDArray[np.float64]:
    """Low-frequency noise scaled to [-1, 1]."""
    field = gaussian_filter(rng.standard_normal(shape), sigma, mode="wrap")
    return field / max(float(np.abs(field).max()), 1e-12)


def _rotated_box(
    center: tuple[float, float], half_length: float, half_width: float, angle: float, shape: tuple[int, int]
) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
    along = np.array([np.sin(angle), np.cos(angle)])
    across = np.array([np.cos(angle), -np.sin(angle)])
    corners = np.array([
        np.asarray(center) + sa * half_length * along + sc * half_width * across
        for sa, sc in ((1, 1), (1, -1), (-1, -1), (-1, 1))
    ])
    return draw.polygon(corners[:, 0], corners[:, 1], shape=shape)


def _shape_pixels(kind: ShapeKind, size: int, rng: Generator) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
    shape = (size, size)
    center = (float(rng.uniform(0, size)), float(rng.uniform(0, size)))
    angle = float(rng.uniform(0, np.pi))
    if kind is ShapeKind.ELLIPSE:
        radii = rng.uniform(0.1, 0.25, size=2) * size
        return draw.ellipse(center[0], center[1], radii[0], radii[1], shape=shape, rotation=angle)
    if kind is ShapeKind.RECTANGLE:
        half = rng.uniform(0.08, 0.2, size=2) * size
        return _rotated_box(center, half[0], half[1], angle, shape)
    return _rotated_box(center, rng.uniform(0.15, 0.35) * size, rng.uniform(0.03, 0.06) * size, angle, shape)


def generate_synthetic_painting(cfg: SynthConfig, rng: Generator) -> LabImage:
    """Paint one synthetic silk painting.

    The silk ground has a jittered chroma, a gently varying lightness and mild noise.
    Between ``cfg.shape_count`` shapes (ellipses, rectangles and strokes) are then
    painted opaquely in palette colours, each with its own faint texture.
    """
    size = cfg.image_size
    shape = (size, size)
    noise = cfg.texture_amplitude
    silk_a, silk_b = np.asarray(cfg.silk_center) + rng.uniform(-cfg.silk_jitter, cfg.silk_jitter, size=2)

    L = cfg.silk_lightness + 4.0 * _smooth_field(rng, shape, size / 8) + noise * rng.standard_normal(shape)
    a = silk_a + 0.5 * _smooth_field(rng, shape, size / 4)
    b = silk_b + 0.5 * _smooth_field(rng, shape, size / 4)
    a = a + CHROMA_NOISE_SHARE * noise * rng.standard_normal(shape)
    b = b + CHROMA_NOISE_SHARE * noise * rng.standard_normal(shape)

    kinds = list(ShapeKind)
    count = int(rng.integers(cfg.shape_count[0], cfg.shape_count[1] + 1))
    for _ in range(count):
        kind = kinds[int(rng.integers(len(kinds)))]
        color = cfg.palette[int(rng.integers(len(cfg.palette)))]
        rows, cols = _shape_pixels(kind, size, rng)
        texture = noise * rng.standard_normal((3, rows.size))
        L[rows, cols] = color[0] + texture[0]
        a[rows, cols] = color[1] + CHROMA_NOISE_SHARE * texture[1]
        b[rows, cols] = color[2] + CHROMA_NOISE_SHARE * texture[2]

    return LabImage(np.clip(L, *L_RANGE), np.clip(a, *CHROMA_RANGE), np.clip(b, *CHROMA_RANGE))


def painting_rng(seed: int, index: int) -> Generator:
    """The generator of painting ``index`` under master ``seed``."""
    return np.random.default_rng([seed, index])
