"""Luminance degradation curves.

Two families simulate faded luminance on the 8-bit scale: a linear curve
``L_sd = alpha * L_nd + beta`` with randomly drawn coefficients, and empirical curves
measured bin-by-bin on pairs of degraded paintings and their restored counterparts.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import DimensionError, DomainTagError, EmptyInputError, RangeError
from ..imagecore import DomainTag, LuminancePlane

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.random import Generator
    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

DEFAULT_BINS = 32


def _check_interval(name: str, interval: tuple[float, float], outer: tuple[float, float] | None = None) -> None:
    low, high = interval
    if not low <= high:
        msg = f"{name} interval must satisfy low <= high, got {interval}"
        raise RangeError(msg)
    if outer is not None and (low <= outer[0] or high > outer[1]):
        msg = f"{name} interval {interval} must lie inside ({outer[0]}, {outer[1]}]"
        raise RangeError(msg)


@dataclass(frozen=True)
class LinearCurveBounds:
    """Sampling intervals for the linear curve; alpha stays a contraction."""

    alpha: tuple[float, float] = (0.2, 0.5)
    beta: tuple[float, float] = (15.0, 25.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(float(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        _check_interval("alpha", self.alpha, (0.0, 1.0))
        _check_interval("beta", self.beta)

    def sample(self, rng: Generator) -> LinearCurveParams:
        alpha = float(rng.uniform(*self.alpha))
        beta = float(rng.uniform(*self.beta))
        return LinearCurveParams(alpha, beta, bounds=self)


@dataclass(frozen=True)
class LinearCurveParams:
    alpha: float
    beta: float
    bounds: LinearCurveBounds = field(default_factory=LinearCurveBounds, compare=False)

    def __post_init__(self) -> None:
        low, high = self.bounds.alpha
        if not low <= self.alpha <= high:
            msg = f"alpha={self.alpha} outside [{low}, {high}]"
            raise RangeError(msg)
        low, high = self.bounds.beta
        if not low <= self.beta <= high:
            msg = f"beta={self.beta} outside [{low}, {high}]"
            raise RangeError(msg)


@dataclass(frozen=True, eq=False)
class EmpiricalCurve:
    """Mean luminance change (degraded - restored) per restored-luminance bin.

    Attributes:
        bin_edges: ``B + 1`` strictly ascending edges covering [0, 255].
        mean_delta: ``B`` mean deltas; bins without samples hold interpolated values.
        counts: number of pixels that fell into each bin; zero flags an empty bin.
    """

    bin_edges: NDArray[np.float64]
    mean_delta: NDArray[np.float64]
    counts: NDArray[np.int64]

    def __post_init__(self) -> None:
        edges = np.array(self.bin_edges, dtype=np.float64)
        delta = np.array(self.mean_delta, dtype=np.float64)
        counts = np.array(self.counts, dtype=np.int64)
        if edges.ndim != 1 or edges.size < 2:
            msg = "An empirical curve needs at least two bin edges"
            raise DimensionError(msg)
        if delta.shape != (edges.size - 1,) or counts.shape != delta.shape:
            msg = f"Expected {edges.size - 1} deltas and counts, got {delta.shape} and {counts.shape}"
            raise DimensionError(msg)
        if not np.all(np.diff(edges) > 0):
            msg = "Bin edges must be strictly ascending"
            raise RangeError(msg)
        if edges[0] > 0.0 or edges[-1] < 255.0:
            msg = f"Bin edges must cover [0, 255], got [{edges[0]}, {edges[-1]}]"
            raise RangeError(msg)
        if np.any(counts < 0):
            msg = "Bin counts must be non-negative"
            raise RangeError(msg)
        if not np.all(np.isfinite(delta[counts > 0])):
            msg = "Populated bins must have a finite mean delta"
            raise RangeError(msg)
        for name, array in (("bin_edges", edges), ("mean_delta", delta), ("counts", counts)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def bins(self) -> int:
        return int(self.mean_delta.size)

    @property
    def centers(self) -> NDArray[np.float64]:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def empty_bins(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.counts == 0))

    def delta_at(self, luminance: ArrayLike) -> NDArray[np.float64]:
        """Piecewise-linear delta with bin centres as knots and flat extrapolation."""
        return np.interp(np.asarray(luminance, dtype=np.float64), self.centers, self.mean_delta)

    def to_json(self) -> dict[str, list[float] | list[int]]:
        return {
            "bin_edges": [float(v) for v in self.bin_edges],
            "mean_delta": [float(v) for v in self.mean_delta],
            "counts": [int(v) for v in self.counts],
        }

    @classmethod
    def from_json(cls, data: dict[str, list[float]]) -> EmpiricalCurve:
        return cls(np.asarray(data["bin_edges"]), np.asarray(data["mean_delta"]), np.asarray(data["counts"]))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> EmpiricalCurve:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_empirical_curve(
    pairs: Sequence[tuple[LuminancePlane, LuminancePlane]], bins: int = DEFAULT_BINS
) -> EmpiricalCurve:
    """Fit bin-wise mean luminance deltas from (degraded, restored) pairs.

    Pixels are bucketed by their restored luminance into ``bins`` equal-width bins over
    [0, 255]. Empty bins take values interpolated from the nearest populated bins.

    Raises:
        EmptyInputError: if ``pairs`` is empty.
        DimensionError: if a pair is not pixel aligned.
        RangeError: if ``bins`` is smaller than one.
    """
    if not pairs:
        msg = "Cannot fit a degradation curve without pairs"
        raise EmptyInputError(msg)
    if bins < 1:
        msg = f"bins must be >= 1, got {bins}"
        raise RangeError(msg)
    for index, (degraded, restored) in enumerate(pairs):
        if degraded.shape != restored.shape:
            msg = f"Pair {index} is not aligned: {degraded.shape} vs {restored.shape}"
            raise DimensionError(msg)

    restored_values = np.concatenate([restored.values.ravel() for _, restored in pairs])
    deltas = np.concatenate([(degraded.values - restored.values).ravel() for degraded, restored in pairs])

    edges = np.linspace(0.0, 255.0, bins + 1)
    index = np.clip(np.floor(restored_values * bins / 255.0).astype(np.int64), 0, bins - 1)
    counts = np.bincount(index, minlength=bins)
    sums = np.bincount(index, weights=deltas, minlength=bins)

    populated = counts > 0
    mean_delta = np.full(bins, np.nan)
    mean_delta[populated] = sums[populated] / counts[populated]
    if not populated.all():
        centers = 0.5 * (edges[:-1] + edges[1:])
        mean_delta[~populated] = np.interp(centers[~populated], centers[populated], mean_delta[populated])
        logger.info("Interpolated %d empty bin(s) of %d", int((~populated).sum()), bins)
    return EmpiricalCurve(edges, mean_delta, counts)


def apply_linear_degradation(L_nd: LuminancePlane, params: LinearCurveParams) -> LuminancePlane:
    if L_nd.domain_tag is not DomainTag.NON_DEGRADED:
        msg = f"Linear degradation expects non-degraded luminance, got '{L_nd.domain_tag}'"
        raise DomainTagError(msg)
    degraded = np.clip(params.alpha * L_nd.values + params.beta, 0.0, 255.0)
    return LuminancePlane(degraded, DomainTag.SYNTHETIC_DEGRADED)


def apply_empirical_curve(L_nd: LuminancePlane, curve: EmpiricalCurve) -> LuminancePlane:
    degraded = np.clip(L_nd.values + curve.delta_at(L_nd.values), 0.0, 255.0)
    return LuminancePlane(degraded, DomainTag.SYNTHETIC_DEGRADED)
