"""Run configuration loaded from a TOML file.

A run file holds the sections ``[corpus]``, ``[degrade]``, ``[prior]``, ``[lumen]``,
``[hue]`` and ``[evaluate]`` plus the top-level keys ``seed`` and ``output_root``. Every
key is optional and overrides the default of the dataclass it maps onto; nested tables
(``[lumen.weights]``, ``[hue.architecture]``, ...) map onto nested dataclasses. Fields
that are derived from other sections (degradation samplers, the hue stage's prior
parameters and every seed) cannot be set inside a stage section.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

from .corpus import HELDOUT_FRACTION, SynthConfig
from .degrade import AttenuationRanges, DegradationSamplerConfig, LinearCurveBounds
from .exceptions import ConfigurationError
from .huecorr import HueArchitecture, HueTrainConfig
from .lumen import LumenArchitecture, LumenTrainConfig
from .metrics import EvaluateConfig
from .nnet import LossWeights
from .prior import PriorConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

if TYPE_CHECKING:
    from collections.abc import Mapping

    from .degrade import EmpiricalCurve

logger = logging.getLogger(__name__)

SEED_VARIABLE = "PREVIVOR_SEED"
DEFAULT_BINS = 32

T = TypeVar("T")


@dataclass(frozen=True)
class CorpusSection:
    n_images: int = 20
    heldout_fraction: float = HELDOUT_FRACTION
    synth: SynthConfig = field(default_factory=SynthConfig)
    attenuation: AttenuationRanges = field(default_factory=AttenuationRanges)

    def __post_init__(self) -> None:
        if self.n_images < 1:
            msg = f"corpus.n_images must be >= 1, got {self.n_images}"
            raise ConfigurationError(msg)
        if not 0.0 <= self.heldout_fraction < 1.0:
            msg = f"corpus.heldout_fraction must lie in [0, 1), got {self.heldout_fraction}"
            raise ConfigurationError(msg)


@dataclass(frozen=True)
class DegradeSection:
    """Luminance degradation settings.

    Attributes:
        curve_paths: empirical curve JSON files forming the curve pool; relative paths are
            resolved against the directory of the run file.
        mode_probability: chance of the empirical branch; ignored while the pool is empty.
        bins: bin count used when a curve is fitted from paired images.
    """

    linear_bounds: LinearCurveBounds = field(default_factory=LinearCurveBounds)
    curve_paths: tuple[str, ...] = ()
    mode_probability: float = 0.5
    bins: int = DEFAULT_BINS

    def __post_init__(self) -> None:
        object.__setattr__(self, "curve_paths", tuple(str(p) for p in self.curve_paths))
        if not 0.0 <= self.mode_probability <= 1.0:
            msg = f"degrade.mode_probability must lie in [0, 1], got {self.mode_probability}"
            raise ConfigurationError(msg)
        if self.bins < 1:
            msg = f"degrade.bins must be >= 1, got {self.bins}"
            raise ConfigurationError(msg)

    def sampler(self, seed: int, pool: tuple[EmpiricalCurve, ...] | None = None) -> DegradationSamplerConfig:
        """The sampler over ``pool``, or over the curves in ``curve_paths`` when no pool is given."""
        if pool is None and self.curve_paths:
            return DegradationSamplerConfig.from_curve_files(
                self.curve_paths, self.mode_probability, linear_bounds=self.linear_bounds, seed=seed
            )
        pool = pool or ()
        return DegradationSamplerConfig(self.linear_bounds, pool, self.mode_probability if pool else 0.0, seed)


# Fields filled in from other sections; a run file may not set them.
DERIVED_FIELDS: dict[type, frozenset[str]] = {
    SynthConfig: frozenset({"seed"}),
    LumenTrainConfig: frozenset({"sampler", "seed"}),
    HueTrainConfig: frozenset({"sampler", "prior", "seed"}),
}


def _expected(current: object) -> str:
    if isinstance(current, tuple):
        return "an array"
    return type(current).__name__


def _freeze(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _coerce(current: Any, value: Any, key: str) -> Any:
    if dataclasses.is_dataclass(current):
        if not isinstance(value, dict):
            msg = f"'{key}' must be a table"
            raise ConfigurationError(msg)
        return _build(current, value, key)
    if isinstance(current, enum.Enum):
        try:
            return type(current)(value)
        except ValueError:
            choices = ", ".join(str(member.value) for member in type(current))
            msg = f"'{key}' must be one of {choices}, got {value!r}"
            raise ConfigurationError(msg) from None
    if current is None:
        return value
    ok = {
        bool: isinstance(value, bool),
        float: isinstance(value, (int, float)) and not isinstance(value, bool),
        int: isinstance(value, int) and not isinstance(value, bool),
        str: isinstance(value, str),
        tuple: isinstance(value, list),
    }.get(type(current), True)
    if not ok:
        msg = f"'{key}' expects {_expected(current)}, got {value!r}"
        raise ConfigurationError(msg)
    if isinstance(current, float):
        return float(value)
    return _freeze(value)


def _build(default: T, data: Mapping[str, Any], prefix: str) -> T:
    """Return ``default`` with the entries of ``data`` replaced, recursing into nested dataclasses.

    Raises:
        ConfigurationError: for unknown or derived keys, wrongly typed values and values the
            target dataclass rejects.
    """
    names = {item.name for item in dataclasses.fields(default) if item.init}  # type: ignore[arg-type]
    derived = DERIVED_FIELDS.get(type(default), frozenset())
    changes = {}
    for key, value in data.items():
        dotted = f"{prefix}.{key}" if prefix else key
        if key not in names or key in derived:
            msg = f"Unknown configuration key '{dotted}'"
            raise ConfigurationError(msg)
        changes[key] = _coerce(getattr(default, key), value, dotted)
    try:
        return dataclasses.replace(default, **changes)  # type: ignore[type-var]
    except (TypeError, ValueError) as exc:
        msg = f"Invalid value in '{prefix or 'run'}': {exc}"
        raise ConfigurationError(msg) from exc


def _dump(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        skip = DERIVED_FIELDS.get(type(obj), frozenset())
        return {item.name: _dump(getattr(obj, item.name)) for item in dataclasses.fields(obj) if item.name not in skip}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (tuple, list)):
        return [_dump(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def resolve_seed(flag: int | None = None, configured: int | None = None) -> int:
    """Seed precedence: command-line flag, then the run file, then ``PREVIVOR_SEED``, then 0.

    Raises:
        ConfigurationError: if ``PREVIVOR_SEED`` is set but not an integer.
    """
    if flag is not None:
        return flag
    if configured is not None:
        return configured
    raw = os.environ.get(SEED_VARIABLE, "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        msg = f"{SEED_VARIABLE} must be an integer, got {raw!r}"
        raise ConfigurationError(msg) from None


@dataclass(frozen=True)
class RunConfig:
    """Every parameter of a run, from corpus synthesis to evaluation.

    The stage configs returned by :meth:`lumen_config`, :meth:`hue_config` and
    :meth:`synth_config` carry the run seed; the two trainers share the sampler built from
    ``[degrade]`` and the hue stage uses ``[prior]``.
    """

    seed: int = 0
    output_root: str = "runs"
    corpus: CorpusSection = field(default_factory=CorpusSection)
    degrade: DegradeSection = field(default_factory=DegradeSection)
    prior: PriorConfig = field(default_factory=PriorConfig)
    lumen: LumenTrainConfig = field(default_factory=LumenTrainConfig)
    lumen_architecture: LumenArchitecture = field(default_factory=LumenArchitecture)
    hue: HueTrainConfig = field(default_factory=HueTrainConfig)
    hue_architecture: HueArchitecture = field(default_factory=HueArchitecture)
    evaluate: EvaluateConfig = field(default_factory=EvaluateConfig)

    def __post_init__(self) -> None:
        self.lumen.check_architecture(self.lumen_architecture)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], *, seed: int | None = None, base_dir: Path | None = None) -> RunConfig:
        """Build a run config from parsed TOML.

        Args:
            data: the parsed document.
            seed: command-line seed; overrides ``seed`` in ``data``.
            base_dir: directory that relative curve paths are resolved against.

        Raises:
            ConfigurationError: for unknown keys or invalid values.
        """
        data = dict(data)
        default = cls()
        sections: dict[str, Any] = {}
        for name in ("corpus", "degrade", "prior", "evaluate"):
            if name in data:
                sections[name] = _coerce(getattr(default, name), data.pop(name), name)
        for name in ("lumen", "hue"):
            table = data.pop(name, {})
            if not isinstance(table, dict):
                msg = f"'{name}' must be a table"
                raise ConfigurationError(msg)
            table = dict(table)
            arch_key = f"{name}_architecture"
            if "architecture" in table:
                arch_table = table.pop("architecture")
                sections[arch_key] = _coerce(getattr(default, arch_key), arch_table, f"{name}.architecture")
            sections[name] = _build(getattr(default, name), table, name)
        configured = data.pop("seed", None)
        if configured is not None and (not isinstance(configured, int) or isinstance(configured, bool)):
            msg = f"'seed' expects an integer, got {configured!r}"
            raise ConfigurationError(msg)
        if "output_root" in data:
            sections["output_root"] = _coerce(default.output_root, data.pop("output_root"), "output_root")
        if data:
            msg = f"Unknown configuration key '{sorted(data)[0]}'"
            raise ConfigurationError(msg)
        degrade = sections.get("degrade")
        if degrade is not None and base_dir is not None:
            paths = tuple(str(base_dir / p) if not Path(p).is_absolute() else p for p in degrade.curve_paths)
            sections["degrade"] = dataclasses.replace(degrade, curve_paths=paths)
        return cls(seed=resolve_seed(seed, configured), **sections)

    @classmethod
    def load(cls, path: str | Path | None = None, *, seed: int | None = None) -> RunConfig:
        """Read a run file; ``path = None`` gives the defaults (seed resolution still applies).

        Raises:
            ConfigurationError: if the file is missing, is not valid TOML or holds invalid
                settings.
        """
        if path is None:
            return cls(seed=resolve_seed(seed))
        path = Path(path)
        try:
            with path.open("rb") as stream:
                data = tomllib.load(stream)
        except FileNotFoundError:
            msg = f"Run configuration {path} does not exist"
            raise ConfigurationError(msg) from None
        except tomllib.TOMLDecodeError as exc:
            msg = f"Run configuration {path} is not valid TOML: {exc}"
            raise ConfigurationError(msg) from exc
        config = cls.from_dict(data, seed=seed, base_dir=path.parent)
        logger.debug("Loaded run configuration %s (hash %s)", path, config.config_hash()[:12])
        return config

    @classmethod
    def full_scale(cls, seed: int = 0) -> RunConfig:
        """The published full-size setup: 512 x 512 crops, 24 000 iterations, 100 colour queries."""
        return cls(
            seed=seed,
            lumen=LumenTrainConfig(batch_size=32, resolution=512, iterations=24000, weights=LossWeights.luminance()),
            lumen_architecture=LumenArchitecture(mapping_blocks=6, feature_dim=512),
            hue=HueTrainConfig(batch_size=4, resolution=512, iterations=24000),
            hue_architecture=HueArchitecture.full_scale(),
        )

    def to_json(self) -> dict[str, Any]:
        """Canonical JSON form; derived fields are left out."""
        data = _dump(self)
        for name in ("lumen", "hue"):
            data[name]["architecture"] = data.pop(f"{name}_architecture")
        return data

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def synth_config(self) -> SynthConfig:
        return dataclasses.replace(self.corpus.synth, seed=self.seed)

    def sampler(self, pool: tuple[EmpiricalCurve, ...] | None = None) -> DegradationSamplerConfig:
        return self.degrade.sampler(self.seed, pool)

    def lumen_config(self, sampler: DegradationSamplerConfig | None = None) -> LumenTrainConfig:
        return dataclasses.replace(self.lumen, sampler=sampler or self.sampler(), seed=self.seed)

    def hue_config(self, sampler: DegradationSamplerConfig | None = None) -> HueTrainConfig:
        return dataclasses.replace(self.hue, sampler=sampler or self.sampler(), prior=self.prior, seed=self.seed)

    def metadata(self) -> dict[str, Any]:
        """Provenance stamped into every output of a run."""
        return {"config_hash": self.config_hash(), "seed": self.seed}
