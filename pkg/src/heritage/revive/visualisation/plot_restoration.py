from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

from matplotlib.figure import Figure  # type: ignore[import-not-found]

from ..exceptions import DimensionError

if TYPE_CHECKING:
    from ..imagecore import RgbImage
    from ..prior import PriorMask


def restoration_panel(
    degraded: RgbImage, mask: PriorMask, restored: RgbImage, reference: RgbImage | None = None, title: str = ""
) -> Figure:
    """Degraded input, prior mask and restoration side by side, plus the reference if there is one.

    Raises:
        DimensionError: if the panels do not share one size.
    """
    panels = [
        ("Degraded", degraded.pixels, None),
        ("Prior mask", mask.mask.astype(float), "gray"),
        ("Restored", restored.pixels, None),
    ]
    if reference is not None:
        panels.append(("Reference", reference.pixels, None))
    shapes = {tuple(values.shape[:2]) for _, values, _ in panels}
    if len(shapes) != 1:
        msg = f"Panel images differ in size: {sorted(shapes)}"
        raise DimensionError(msg)

    fig = Figure(figsize=(3 * len(panels), 3.3), layout="constrained")
    for index, (label, values, cmap) in enumerate(panels, start=1):
        ax = fig.add_subplot(1, len(panels), index)
        if cmap is None:
            ax.imshow(values, interpolation="nearest")
        else:
            ax.imshow(values, cmap=cmap, vmin=0.0, vmax=1.0, interpolation="nearest")
        ax.set_title(label)
        ax.axis("off")
    if title:
        fig.suptitle(title)
    return fig


def save_restoration_panel(
    path: str | Path,
    degraded: RgbImage,
    mask: PriorMask,
    restored: RgbImage,
    reference: RgbImage | None = None,
    title: str = "",
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    restoration_panel(degraded, mask, restored, reference, title).savefig(path, format="png")
    return path
