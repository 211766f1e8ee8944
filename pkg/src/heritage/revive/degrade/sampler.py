"""Random choice between the linear and the empirical degradation branch."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from ..exceptions import ConfigurationError
from .curves import (
    EmpiricalCurve,
    LinearCurveBounds,
    LinearCurveParams,
    apply_empirical_curve,
    apply_linear_degradation,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.random import Generator

    from ..imagecore import LuminancePlane

logger = logging.getLogger(__name__)


class DegradationMode(str, enum.Enum):
    LINEAR = "linear"
    EMPIRICAL = "empirical"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DegradationSamplerConfig:
    """Parameters of the degradation sampler.

    Attributes:
        linear_bounds: intervals the linear coefficients are drawn from.
        curve_pool: measured curves, picked uniformly when the empirical branch is taken.
        mode_probability: probability of taking the empirical branch.
        seed: seed used by callers that do not pass their own generator.
    """

    linear_bounds: LinearCurveBounds = field(default_factory=LinearCurveBounds)
    curve_pool: tuple[EmpiricalCurve, ...] = ()
    mode_probability: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "curve_pool", tuple(self.curve_pool))
        if not 0.0 <= self.mode_probability <= 1.0:
            msg = f"mode_probability must lie in [0, 1], got {self.mode_probability}"
            raise ConfigurationError(msg)
        if not self.curve_pool and self.mode_probability > 0.0:
            msg = "An empty curve pool requires mode_probability = 0"
            raise ConfigurationError(msg)

    @classmethod
    def from_curve_files(
        cls, paths: Iterable[str | Path], mode_probability: float = 0.5, **kwargs: object
    ) -> DegradationSamplerConfig:
        pool = tuple(EmpiricalCurve.load(path) for path in paths)
        logger.info("Loaded %d empirical curve(s)", len(pool))
        return cls(curve_pool=pool, mode_probability=mode_probability, **kwargs)  # type: ignore[arg-type]


@dataclass(frozen=True)
class DegradationChoice:
    """What :func:`sample_degradation` did, enough to replay it."""

    mode: DegradationMode
    linear: LinearCurveParams | None = None
    curve_index: int | None = None

    def to_json(self) -> dict[str, object]:
        record: dict[str, object] = {"mode": str(self.mode)}
        if self.linear is not None:
            record["alpha"] = self.linear.alpha
            record["beta"] = self.linear.beta
        if self.curve_index is not None:
            record["curve_index"] = self.curve_index
        return record


def sample_degradation(
    L_nd: LuminancePlane, cfg: DegradationSamplerConfig, rng: Generator
) -> tuple[LuminancePlane, DegradationChoice]:
    """Degrade ``L_nd`` with a randomly chosen curve.

    One uniform draw decides the branch; the empirical branch then draws a pool index,
    the linear branch draws ``alpha`` and ``beta``. The result depends only on the
    input, the configuration and the generator state.

    Raises:
        ConfigurationError: if the empirical branch is chosen with an empty pool.
    """
    if rng.random() < cfg.mode_probability:
        if not cfg.curve_pool:
            msg = "Empirical degradation chosen but the curve pool is empty"
            raise ConfigurationError(msg)
        index = int(rng.integers(len(cfg.curve_pool)))
        degraded = apply_empirical_curve(L_nd, cfg.curve_pool[index])
        return degraded, DegradationChoice(DegradationMode.EMPIRICAL, curve_index=index)
    params = cfg.linear_bounds.sample(rng)
    return apply_linear_degradation(L_nd, params), DegradationChoice(DegradationMode.LINEAR, linear=params)
