"""Synthetic training corpora written to disk with a manifest."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

from ..degrade import AttenuationRanges, DegradationSamplerConfig, attenuate_chroma, sample_degradation
from ..exceptions import ConfigurationError, EmptyInputError
from ..imagecore import (
    DomainTag,
    LabImage,
    LuminancePlane,
    lab_to_rgb,
    lightness_from_8bit,
    luminance_8bit,
    read_png,
    rgb_to_lab,
    write_png,
)
from .manifest import MANIFEST_NAME, CorpusManifest, ManifestEntry, Role, Split
from .synth import SynthConfig, generate_synthetic_painting, painting_rng

if TYPE_CHECKING:
    from numpy.random import Generator

    from ..imagecore import RgbImage

logger = logging.getLogger(__name__)

METADATA_NAME = "corpus.json"
HELDOUT_FRACTION = 0.1


def content_digest(img: RgbImage) -> str:
    return hashlib.sha256(img.pixels.tobytes()).hexdigest()


def assign_split(digest: str, seed: int, heldout_fraction: float = HELDOUT_FRACTION) -> Split:
    """Deterministic train/heldout split from an image's content hash and the seed."""
    bucket = int(hashlib.sha256(f"{seed}:{digest}".encode()).hexdigest()[:8], 16) / 2**32
    return Split.HELDOUT if bucket < heldout_fraction else Split.TRAIN


def degrade_painting(
    img: LabImage, sampler: DegradationSamplerConfig, attenuation: AttenuationRanges, rng: Generator
) -> tuple[LabImage, dict[str, Any]]:
    """Darken the luminance with a sampled curve and fade the chroma with sampled gammas."""
    luminance, choice = sample_degradation(luminance_8bit(img, DomainTag.NON_DEGRADED), sampler, rng)
    params = attenuation.sample(rng)
    faded = attenuate_chroma(img.chroma, params)
    record = {**choice.to_json(), "gamma_neg": params.gamma_neg, "gamma_pos": params.gamma_pos}
    return LabImage(lightness_from_8bit(luminance), faded.a, faded.b), record


def build_training_corpus(
    cfg: SynthConfig,
    n_images: int,
    out_dir: str | Path,
    sampler: DegradationSamplerConfig | None = None,
    attenuation: AttenuationRanges | None = None,
    *,
    heldout_fraction: float = HELDOUT_FRACTION,
    config_hash: str = "",
) -> CorpusManifest:
    """Generate ``n_images`` paintings with degraded counterparts under ``out_dir``.

    Files land in ``{out_dir}/{split}/{role}/{pair_id}.png``. Each pair is listed as a
    ``non_degraded`` entry, a ``paired_degraded`` entry and a ``paired_restored`` entry
    pointing at the non-degraded PNG. The degraded image is derived from the decoded
    8-bit original so both sides of a pair share its quantisation. ``corpus.json``
    records the configuration and every pair's degradation.

    Raises:
        ConfigurationError: if ``n_images`` is not positive or ``heldout_fraction`` is
            outside [0, 1].
    """
    if n_images < 1:
        msg = f"n_images must be >= 1, got {n_images}"
        raise ConfigurationError(msg)
    if not 0.0 <= heldout_fraction <= 1.0:
        msg = f"heldout_fraction must lie in [0, 1], got {heldout_fraction}"
        raise ConfigurationError(msg)
    sampler = sampler or DegradationSamplerConfig(mode_probability=0.0)
    attenuation = attenuation or AttenuationRanges()
    root = Path(out_dir)

    entries: list[ManifestEntry] = []
    pairs: dict[str, Any] = {}
    for index in range(n_images):
        rng = painting_rng(cfg.seed, index)
        pair_id = f"{index:05d}"
        rgb = lab_to_rgb(generate_synthetic_painting(cfg, rng))
        split = assign_split(content_digest(rgb), cfg.seed, heldout_fraction)
        degraded, record = degrade_painting(rgb_to_lab(rgb), sampler, attenuation, rng)

        original = f"{split}/{Role.NON_DEGRADED}/{pair_id}.png"
        faded = f"{split}/{Role.PAIRED_DEGRADED}/{pair_id}.png"
        write_png(rgb, root / original)
        write_png(lab_to_rgb(degraded), root / faded)
        entries += [
            ManifestEntry(original, Role.NON_DEGRADED, split),
            ManifestEntry(faded, Role.PAIRED_DEGRADED, split, pair_id),
            ManifestEntry(original, Role.PAIRED_RESTORED, split, pair_id),
        ]
        pairs[pair_id] = {"split": str(split), **record}

    manifest = CorpusManifest(root, tuple(entries))
    manifest.save(root / MANIFEST_NAME)
    metadata = {
        "config_hash": config_hash,
        "seed": cfg.seed,
        "n_images": n_images,
        "heldout_fraction": heldout_fraction,
        "synth": cfg.to_json(),
        "pairs": pairs,
    }
    (root / METADATA_NAME).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    heldout = sum(1 for p in pairs.values() if p["split"] == str(Split.HELDOUT))
    logger.info("Wrote %d paintings (%d heldout) to %s", n_images, heldout, root)
    return manifest


def load_lab_images(manifest: CorpusManifest, role: Role, split: Split | None = None) -> list[LabImage]:
    """Decode every image of ``role`` (and ``split``) to Lab, in manifest order.

    Raises:
        EmptyInputError: if no entry matches.
    """
    entries = manifest.select(role, split)
    if not entries:
        where = f" in split '{split}'" if split is not None else ""
        msg = f"The manifest has no '{role}' entries{where}"
        raise EmptyInputError(msg)
    return [rgb_to_lab(read_png(manifest.resolve(entry))) for entry in entries]


def load_luminance_pairs(
    manifest: CorpusManifest, split: Split | None = None
) -> list[tuple[LuminancePlane, LuminancePlane]]:
    """(degraded, restored) luminance of every pair, as curve fitting expects them.

    Raises:
        EmptyInputError: if the manifest has no pairs.
    """
    pairs = manifest.pairs(split)
    if not pairs:
        msg = "The manifest holds no paired_degraded / paired_restored entries"
        raise EmptyInputError(msg)
    return [
        (
            luminance_8bit(rgb_to_lab(read_png(manifest.resolve(degraded))), DomainTag.REAL_DEGRADED),
            luminance_8bit(rgb_to_lab(read_png(manifest.resolve(restored))), DomainTag.RESTORED),
        )
        for degraded, restored in pairs
    ]
