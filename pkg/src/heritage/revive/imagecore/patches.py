from __future__ import annotations

from dataclasses import dataclass, field

from ..exceptions import DimensionError, RangeError
from .planes import LabImage


def _axis_origins(length: int, patch_size: int, stride: int) -> list[int]:
    """Origins along one axis; the last one snaps to the edge so no pixel is dropped."""
    if patch_size > length:
        msg = f"Patch size {patch_size} exceeds image extent {length}"
        raise DimensionError(msg)
    origins = list(range(0, length - patch_size + 1, stride))
    if origins[-1] + patch_size < length:
        origins.append(length - patch_size)
    return origins


@dataclass(frozen=True)
class PatchGrid:
    """Square patches of ``patch_size`` placed at ``origins`` (row, col), row-major."""

    patch_size: int
    stride: int
    origins: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.patch_size < 1 or self.stride < 1:
            msg = f"Patch size and stride must be positive, got {self.patch_size} and {self.stride}"
            raise RangeError(msg)
        if self.stride > self.patch_size:
            msg = f"Stride {self.stride} must not exceed patch size {self.patch_size}"
            raise RangeError(msg)
        object.__setattr__(self, "origins", tuple((int(r), int(c)) for r, c in self.origins))

    @classmethod
    def covering(cls, height: int, width: int, patch_size: int, stride: int) -> PatchGrid:
        """Build a grid covering a ``height`` x ``width`` image with the edge-snap policy."""
        rows = _axis_origins(height, patch_size, stride)
        cols = _axis_origins(width, patch_size, stride)
        return cls(patch_size, stride, tuple((r, c) for r in rows for c in cols))

    def __len__(self) -> int:
        return len(self.origins)

    def check_fits(self, height: int, width: int) -> None:
        for row, col in self.origins:
            if row < 0 or col < 0 or row + self.patch_size > height or col + self.patch_size > width:
                msg = (
                    f"Patch at ({row}, {col}) of size {self.patch_size} "
                    f"exceeds the {height} x {width} image"
                )
                raise DimensionError(msg)


def extract_patches(img: LabImage, grid: PatchGrid) -> list[LabImage]:
    """Cut ``img`` into the windows of ``grid`` without resampling."""
    height, width = img.shape
    grid.check_fits(height, width)
    return [img.crop(row, col, grid.patch_size, grid.patch_size) for row, col in grid.origins]
