"""Evaluation protocols and their reports."""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from ..exceptions import DimensionError, EmptyInputError
from .fid import FeatureExtractorSpec, FidScore, fid
from .quality import MaskPolicy, apply_mask_policy, colorfulness, psnr, ssim

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from ..imagecore import RgbImage
    from ..prior import PriorMask

    LpipsFn = Callable[[RgbImage, RgbImage], float]

logger = logging.getLogger(__name__)

UNAVAILABLE = "unavailable"


class EvaluationMode(str, enum.Enum):
    """``paired``: pixel-aligned prediction/reference pairs. ``unpaired``: two image sets."""

    PAIRED = "paired"
    UNPAIRED = "unpaired"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class EvaluateConfig:
    mode: EvaluationMode = EvaluationMode.PAIRED
    mask_policy: MaskPolicy = MaskPolicy.NONE
    extractor: FeatureExtractorSpec = field(default_factory=FeatureExtractorSpec)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", EvaluationMode(self.mode))
        object.__setattr__(self, "mask_policy", MaskPolicy(self.mask_policy))


def _encode(value: float | None) -> float | str | None:
    if value is None or math.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"


def _decode(value: float | str | None) -> float | None:
    return float(value) if isinstance(value, str) else value


@dataclass(frozen=True)
class MetricRow:
    """Metrics of one prediction against its reference. ``psnr`` is ``inf`` for identical images."""

    name: str
    psnr: float
    ssim: float
    colorfulness: float
    delta_colorfulness: float
    lpips: float | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "psnr": _encode(self.psnr),
            "ssim": self.ssim,
            "colorfulness": self.colorfulness,
            "delta_colorfulness": self.delta_colorfulness,
            "lpips": UNAVAILABLE if self.lpips is None else self.lpips,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> MetricRow:
        lpips = data.get("lpips")
        return cls(
            data["name"],
            _decode(data["psnr"]),  # type: ignore[arg-type]
            data["ssim"],
            data["colorfulness"],
            data["delta_colorfulness"],
            None if lpips == UNAVAILABLE else lpips,
        )


@dataclass(frozen=True)
class MetricReport:
    """Per-image rows and set-level statistics of one evaluation.

    Attributes:
        mean_delta_colorfulness: per-image ``delta_colorfulness`` averaged over the rows.
        set_delta_colorfulness: difference of the two sets' mean colourfulness.
        fid: unpaired mode only.
        lpips: mean LPIPS when a perceptual function was supplied, else None.
    """

    mode: EvaluationMode
    mask_policy: MaskPolicy
    rows: tuple[MetricRow, ...] = ()
    set_delta_colorfulness: float = 0.0
    fid: FidScore | None = None
    lpips: float | None = None
    config_hash: str = ""
    seed: int | None = None

    @property
    def mean_psnr(self) -> float | None:
        return float(np.mean([r.psnr for r in self.rows])) if self.rows else None

    @property
    def mean_ssim(self) -> float | None:
        return float(np.mean([r.ssim for r in self.rows])) if self.rows else None

    @property
    def mean_delta_colorfulness(self) -> float | None:
        return float(np.mean([r.delta_colorfulness for r in self.rows])) if self.rows else None

    def to_json(self) -> dict[str, Any]:
        return {
            "mode": str(self.mode),
            "mask_policy": str(self.mask_policy),
            "rows": [row.to_json() for row in self.rows],
            "summary": {
                "psnr": _encode(self.mean_psnr),
                "ssim": self.mean_ssim,
                "delta_colorfulness": self.mean_delta_colorfulness,
                "set_delta_colorfulness": self.set_delta_colorfulness,
                "fid": None if self.fid is None else self.fid.to_json(),
                "lpips": UNAVAILABLE if self.lpips is None else self.lpips,
            },
            "config_hash": self.config_hash,
            "seed": self.seed,
        }

    def to_table(self) -> str:
        """Aligned text table: one line per image, then the summary line."""
        if self.mode is EvaluationMode.UNPAIRED:
            header = ("set", "FID", "dColorfulness")
            fid_text = "-" if self.fid is None else f"{self.fid.value:.4f}"
            body = [("all", fid_text, f"{self.set_delta_colorfulness:.4f}")]
        else:
            header = ("image", "PSNR", "SSIM", "dColorfulness", "LPIPS")
            body = [
                (r.name, f"{r.psnr:.4f}", f"{r.ssim:.4f}", f"{r.delta_colorfulness:.4f}", _lpips_text(r.lpips))
                for r in self.rows
            ]
            if self.rows:
                body.append((
                    "mean",
                    f"{self.mean_psnr:.4f}",
                    f"{self.mean_ssim:.4f}",
                    f"{self.mean_delta_colorfulness:.4f}",
                    _lpips_text(self.lpips),
                ))
        widths = [max(len(line[i]) for line in (header, *body)) for i in range(len(header))]
        lines = ["  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip() for line in (header, *body)]
        lines.insert(1, "  ".join("-" * width for width in widths))
        return "\n".join(lines) + "\n"

    def save(self, directory: str | Path, stem: str = "report") -> tuple[Path, Path]:
        """Write ``{stem}.json`` and ``{stem}.txt`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        json_path = directory / f"{stem}.json"
        table_path = directory / f"{stem}.txt"
        json_path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        table_path.write_text(self.to_table(), encoding="utf-8")
        return json_path, table_path


def _lpips_text(value: float | None) -> str:
    return UNAVAILABLE if value is None else f"{value:.4f}"


def _masked(images: Sequence[RgbImage], masks: Sequence[PriorMask] | None, policy: MaskPolicy) -> list[RgbImage]:
    if policy is MaskPolicy.NONE:
        return list(images)
    if masks is None or len(masks) != len(images):
        msg = f"Mask policy '{policy}' needs one mask per image"
        raise DimensionError(msg)
    return [apply_mask_policy(img, mask) for img, mask in zip(images, masks)]


def set_delta_colorfulness(set_a: Sequence[RgbImage], set_b: Sequence[RgbImage]) -> float:
    return abs(float(np.mean([colorfulness(i) for i in set_a])) - float(np.mean([colorfulness(i) for i in set_b])))


def evaluate_paired(
    preds: Sequence[RgbImage],
    refs: Sequence[RgbImage],
    names: Sequence[str] | None = None,
    *,
    mask_policy: MaskPolicy = MaskPolicy.NONE,
    masks: Sequence[PriorMask] | None = None,
    lpips: LpipsFn | None = None,
) -> MetricReport:
    """Pixel-aligned evaluation of predictions against their references.

    Under ``prior_mask`` both images of a pair are blackened outside the same mask.

    Raises:
        EmptyInputError: if there are no pairs.
        DimensionError: if the lists differ in length, a pair is misaligned or masks are
            missing.
    """
    if not preds:
        msg = "Paired evaluation needs at least one pair"
        raise EmptyInputError(msg)
    if len(preds) != len(refs):
        msg = f"{len(preds)} predictions but {len(refs)} references"
        raise DimensionError(msg)
    names = list(names) if names is not None else [f"{i:05d}" for i in range(len(preds))]
    preds = _masked(preds, masks, mask_policy)
    refs = _masked(refs, masks, mask_policy)
    rows = []
    for name, pred, ref in zip(names, preds, refs):
        c_pred = colorfulness(pred)
        rows.append(
            MetricRow(
                name,
                psnr(pred, ref),
                ssim(pred, ref),
                c_pred,
                abs(c_pred - colorfulness(ref)),
                None if lpips is None else float(lpips(pred, ref)),
            )
        )
    mean_lpips = None if lpips is None else float(np.mean([r.lpips for r in rows]))
    report = MetricReport(
        EvaluationMode.PAIRED, mask_policy, tuple(rows), set_delta_colorfulness(preds, refs), lpips=mean_lpips
    )
    logger.info(
        "Paired evaluation of %d image(s): mean PSNR %.4f, mean SSIM %.4f",
        len(rows),
        report.mean_psnr,
        report.mean_ssim,
    )
    return report


def evaluate_unpaired(
    preds: Sequence[RgbImage],
    refs: Sequence[RgbImage],
    spec: FeatureExtractorSpec | None = None,
    *,
    mask_policy: MaskPolicy = MaskPolicy.NONE,
    pred_masks: Sequence[PriorMask] | None = None,
    ref_masks: Sequence[PriorMask] | None = None,
) -> MetricReport:
    """Set-level evaluation: FID and the difference in mean colourfulness.

    Raises:
        EmptyInputError: if either set is empty.
    """
    if not preds or not refs:
        msg = f"Unpaired evaluation needs two non-empty sets, got {len(preds)} and {len(refs)}"
        raise EmptyInputError(msg)
    preds = _masked(preds, pred_masks, mask_policy)
    refs = _masked(refs, ref_masks, mask_policy)
    score = fid(preds, refs, spec)
    logger.info("Unpaired evaluation: FID %.4f with %s", score.value, score.spec.identity)
    return MetricReport(
        EvaluationMode.UNPAIRED, mask_policy, set_delta_colorfulness=set_delta_colorfulness(preds, refs), fid=score
    )
