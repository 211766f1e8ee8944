"""Frechet distance between Gaussian fits of two image sets' embeddings.

The embedding is pluggable. The default is a seeded, untrained convolutional pyramid over
normalised Lab whose global-average-pooled levels are concatenated; embeddings computed
elsewhere can be loaded from ``.npy`` files under an external spec. A score remembers
which spec produced it, and scores from different specs are refused.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import torch

from ..exceptions import ConfigurationError, DimensionError, EmptyInputError, IncomparableMetricsError
from ..imagecore import rgb_to_lab
from ..nnet import FeaturePyramid, as_tensor, to_numpy

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from ..imagecore import RgbImage

logger = logging.getLogger(__name__)

REGULARIZATION = 1e-6
PYRAMID = "random-conv-pyramid"


@dataclass(frozen=True)
class FeatureExtractorSpec:
    """Identity of an embedding function.

    Attributes:
        name: ``random-conv-pyramid`` for the built-in extractor, any other name for
            externally computed embeddings.
        widths: channel widths of the pyramid levels; empty for external embeddings.
        seed: seed of the pyramid weights.
        external_dim: feature dimension of external embeddings.
    """

    name: str = PYRAMID
    widths: tuple[int, ...] = (16, 32, 64)
    seed: int = 0
    external_dim: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.name == PYRAMID and (not self.widths or min(self.widths) < 1):
            msg = f"The pyramid extractor needs positive widths, got {self.widths}"
            raise ConfigurationError(msg)
        if self.name != PYRAMID and self.external_dim < 1:
            msg = f"External embeddings '{self.name}' need external_dim >= 1"
            raise ConfigurationError(msg)

    @classmethod
    def external(cls, name: str, dim: int) -> FeatureExtractorSpec:
        return cls(name=name, widths=(), seed=0, external_dim=dim)

    @property
    def is_external(self) -> bool:
        return self.name != PYRAMID

    @property
    def dim(self) -> int:
        return self.external_dim if self.is_external else sum(self.widths)

    @property
    def identity(self) -> str:
        if self.is_external:
            return f"{self.name}[dim={self.external_dim}]"
        return f"{self.name}[widths={','.join(map(str, self.widths))};seed={self.seed}]"

    def embed(self, images: Sequence[RgbImage]) -> NDArray[np.float64]:
        """Embed ``images`` into an N x ``dim`` array.

        Raises:
            ConfigurationError: for an external spec, whose embeddings must be loaded.
        """
        if self.is_external:
            msg = f"'{self.name}' embeddings are computed externally; load them with load_embeddings"
            raise ConfigurationError(msg)
        pyramid = FeaturePyramid(3, self.widths, self.seed)
        rows = []
        with torch.no_grad():
            for img in images:
                lab = rgb_to_lab(img)
                x = as_tensor(np.stack([lab.L / 100.0, lab.a / 128.0, lab.b / 128.0]))[None]
                rows.append(np.concatenate([to_numpy(level.mean(dim=(2, 3))[0]) for level in pyramid(x)]))
        return np.stack(rows) if rows else np.zeros((0, self.dim))


def load_embeddings(path: str | Path, spec: FeatureExtractorSpec) -> NDArray[np.float64]:
    """Read an N x ``spec.dim`` embedding matrix from a ``.npy`` file.

    Raises:
        DimensionError: if the array is not two-dimensional with ``spec.dim`` columns.
    """
    array = np.asarray(np.load(Path(path), allow_pickle=False), dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != spec.dim:
        msg = f"Expected an N x {spec.dim} embedding matrix in {path}, got shape {array.shape}"
        raise DimensionError(msg)
    return array


@dataclass(frozen=True, eq=False)
class GaussianStats:
    mean: NDArray[np.float64]
    cov: NDArray[np.float64]
    count: int


def gaussian_stats(embeddings: NDArray[np.float64], eps: float = REGULARIZATION) -> GaussianStats:
    """Mean and population-corrected covariance; ``eps * I`` is added when ``N <= dim``.

    Raises:
        EmptyInputError: if there are no rows.
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    count, dim = embeddings.shape
    if count == 0:
        msg = "Cannot fit a Gaussian to an empty set"
        raise EmptyInputError(msg)
    mean = embeddings.mean(axis=0)
    cov = np.cov(embeddings, rowvar=False).reshape(dim, dim) if count > 1 else np.zeros((dim, dim))
    if count <= dim:
        logger.warning("Only %d sample(s) for %d features; regularising the covariance by %g * I", count, dim, eps)
        cov = cov + eps * np.eye(dim)
    return GaussianStats(mean, cov, count)


def _psd_sqrt(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.T))
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def frechet_distance(
    mu1: NDArray[np.float64], sigma1: NDArray[np.float64], mu2: NDArray[np.float64], sigma2: NDArray[np.float64]
) -> float:
    """``|mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2))``, clipped at zero.

    The cross term is evaluated as ``tr((S1^(1/2) S2 S1^(1/2))^(1/2))``, which only needs
    square roots of symmetric matrices.

    Raises:
        DimensionError: if the shapes do not agree.
    """
    mu1, mu2 = np.atleast_1d(mu1), np.atleast_1d(mu2)
    sigma1, sigma2 = np.atleast_2d(sigma1), np.atleast_2d(sigma2)
    dim = mu1.shape[0]
    if mu2.shape != (dim,) or sigma1.shape != (dim, dim) or sigma2.shape != (dim, dim):
        msg = f"Incompatible Gaussian shapes {mu1.shape}, {sigma1.shape}, {mu2.shape}, {sigma2.shape}"
        raise DimensionError(msg)
    root = _psd_sqrt(sigma1)
    cross = np.linalg.eigvalsh(root @ sigma2 @ root)
    trace_sqrt = float(np.sqrt(np.clip(cross, 0.0, None)).sum())
    diff = mu1 - mu2
    value = float(diff @ diff) + float(np.trace(sigma1) + np.trace(sigma2)) - 2.0 * trace_sqrt
    return max(value, 0.0)


@dataclass(frozen=True)
class FidScore:
    value: float
    spec: FeatureExtractorSpec

    def to_json(self) -> dict[str, object]:
        return {"value": self.value, "extractor": self.spec.identity}


def fid_from_embeddings(emb_a: NDArray[np.float64], emb_b: NDArray[np.float64], spec: FeatureExtractorSpec) -> FidScore:
    """FID of two embedding matrices produced by ``spec``.

    Raises:
        EmptyInputError: if either set is empty.
        DimensionError: if a matrix does not have ``spec.dim`` columns.
    """
    for name, emb in (("first", emb_a), ("second", emb_b)):
        if np.ndim(emb) != 2 or np.shape(emb)[1] != spec.dim:
            msg = f"The {name} embedding matrix has shape {np.shape(emb)}, expected N x {spec.dim}"
            raise DimensionError(msg)
    a = gaussian_stats(emb_a)
    b = gaussian_stats(emb_b)
    return FidScore(frechet_distance(a.mean, a.cov, b.mean, b.cov), spec)


def fid(set_a: Sequence[RgbImage], set_b: Sequence[RgbImage], spec: FeatureExtractorSpec | None = None) -> FidScore:
    """Embed both image sets with ``spec`` and return their Frechet distance.

    Raises:
        EmptyInputError: if either set is empty.
    """
    spec = spec or FeatureExtractorSpec()
    if not set_a or not set_b:
        msg = f"FID needs two non-empty sets, got {len(set_a)} and {len(set_b)} images"
        raise EmptyInputError(msg)
    return fid_from_embeddings(spec.embed(set_a), spec.embed(set_b), spec)


def compare_fid(first: FidScore, second: FidScore) -> float:
    """``first - second``; negative means ``first`` is closer to its reference set.

    Raises:
        IncomparableMetricsError: if the two scores come from different extractors.
    """
    if first.spec != second.spec:
        msg = f"Cannot compare FIDs from '{first.spec.identity}' and '{second.spec.identity}'"
        raise IncomparableMetricsError(msg)
    return first.value - second.value
