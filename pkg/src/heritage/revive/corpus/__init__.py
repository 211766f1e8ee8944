"""Synthetic silk-painting corpora and JSON-lines manifests."""

from __future__ import annotations

from .builder import (
    HELDOUT_FRACTION,
    METADATA_NAME,
    assign_split,
    build_training_corpus,
    content_digest,
    degrade_painting,
    load_lab_images,
    load_luminance_pairs,
)
from .manifest import MANIFEST_NAME, CorpusManifest, ManifestEntry, Role, Split, load_manifest
from .synth import DEFAULT_PALETTE, ShapeKind, SynthConfig, generate_synthetic_painting, painting_rng

__all__ = [
    "DEFAULT_PALETTE",
    "HELDOUT_FRACTION",
    "MANIFEST_NAME",
    "METADATA_NAME",
    "CorpusManifest",
    "ManifestEntry",
    "Role",
    "ShapeKind",
    "Split",
    "SynthConfig",
    "assign_split",
    "build_training_corpus",
    "content_digest",
    "degrade_painting",
    "generate_synthetic_painting",
    "load_lab_images",
    "load_luminance_pairs",
    "load_manifest",
    "painting_rng",
]
