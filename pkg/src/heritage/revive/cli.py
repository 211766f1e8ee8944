"""Command-line interface: ``revive <command> [options]``.

Exit codes are 0 on success, 1 when a command fails at run time and 2 for usage,
configuration or corpus-validation errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .config import RunConfig
from .corpus import Role, Split, build_training_corpus, load_lab_images, load_luminance_pairs, load_manifest
from .degrade import fit_empirical_curve
from .exceptions import ConfigurationError, DimensionError, ManifestError, ReviveError, StageError
from .huecorr import (
    HUE_STAGE,
    HueBundle,
    HueCorpus,
    LuminanceSource,
    load_hue_bundle,
    restore_painting,
    save_hue_bundle,
    train_hue,
)
from .imagecore import DomainTag, luminance_8bit, read_png, rgb_to_lab, write_png
from .lumen import (
    MAPPING_STAGE,
    ND_STAGE,
    SHARED_STAGE,
    LumenBundle,
    LuminanceCorpus,
    load_lumen_bundle,
    save_lumen_bundle,
    train_mapping,
    train_vae_nd,
    train_vae_shared,
)
from .metrics import (
    EvaluationMode,
    MaskPolicy,
    MetricReport,
    evaluate_paired,
    evaluate_unpaired,
    fid_from_embeddings,
    load_embeddings,
    set_delta_colorfulness,
)
from .nnet import freeze
from .prior import PriorMask, extract_color_prior
from .visualisation import plot_training_log, save_restoration_panel

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .corpus import CorpusManifest
    from .degrade import DegradationSamplerConfig
    from .imagecore import LuminancePlane, RgbImage

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
USAGE_ERRORS = (ConfigurationError, ManifestError)

LUMEN_BUNDLE = "lumen.h5"
HUE_BUNDLE = "hue.h5"


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.load(args.config, seed=args.seed)


def _write_json(path: Path, data: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_run_record(out: Path, cfg: RunConfig, command: str) -> None:
    _write_json(out / "run.json", {"command": command, "config": cfg.to_json(), **cfg.metadata()})


def _latest_checkpoint(directory: Path, stage: str) -> Path | None:
    found = sorted(directory.glob(f"{stage}_[0-9]*.h5"))
    return found[-1] if found else None


def _plot_logs(out: Path, stages: Sequence[str]) -> None:
    for stage in stages:
        log = out / "logs" / f"{stage}.jsonl"
        if log.exists() and log.stat().st_size:
            plot_training_log(log, out / "plots" / f"{stage}.png")


# make-corpus


def cmd_make_corpus(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    n_images = args.n if args.n is not None else cfg.corpus.n_images
    manifest = build_training_corpus(
        cfg.synth_config(),
        n_images,
        args.out,
        cfg.sampler(),
        cfg.corpus.attenuation,
        heldout_fraction=cfg.corpus.heldout_fraction,
        config_hash=cfg.config_hash(),
    )
    logger.info("Corpus with %d manifest entries written to %s", len(manifest.entries), args.out)
    return 0


# fit-curve


def cmd_fit_curve(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    bins = args.bins if args.bins is not None else cfg.degrade.bins
    curve = fit_empirical_curve(load_luminance_pairs(load_manifest(args.pairs)), bins)
    curve.save(args.out)
    logger.info("Fitted a %d-bin degradation curve to %s", curve.bins, args.out)
    return 0


# extract-prior


def cmd_extract_prior(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    img = rgb_to_lab(read_png(args.image))
    external = PriorMask.load(args.background) if args.background else None
    prior = extract_color_prior(img, cfg.prior, external, fallback=args.fallback)
    prior.mask.save(args.out_mask)
    prior.silk.save(args.out_silk)
    logger.info("Silk colour (%.2f, %.2f), prior coverage %.4f", *prior.silk.c_silk, prior.mask.coverage)
    return 0


# train-lumen / train-hue


def _corpus_sampler(cfg: RunConfig, manifest: CorpusManifest, out: Path) -> DegradationSamplerConfig:
    """The configured sampler, or one over a curve fitted to the corpus' training pairs."""
    if cfg.degrade.curve_paths or not manifest.pairs(Split.TRAIN):
        return cfg.sampler()
    curve = fit_empirical_curve(load_luminance_pairs(manifest, Split.TRAIN), cfg.degrade.bins)
    curve.save(out / "curves" / "fitted.json")
    logger.info("No curve files configured; fitted one from the corpus' training pairs")
    return cfg.sampler(pool=(curve,))


def cmd_train_lumen(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    out = Path(args.out)
    manifest = load_manifest(args.corpus)
    non_degraded = tuple(
        luminance_8bit(img, DomainTag.NON_DEGRADED) for img in load_lab_images(manifest, Role.NON_DEGRADED, Split.TRAIN)
    )
    real_degraded: tuple[LuminancePlane, ...] = ()
    if manifest.select(Role.REAL_DEGRADED, Split.TRAIN):
        real_degraded = tuple(
            luminance_8bit(img, DomainTag.REAL_DEGRADED)
            for img in load_lab_images(manifest, Role.REAL_DEGRADED, Split.TRAIN)
        )
    corpus = LuminanceCorpus(non_degraded, real_degraded)

    train_cfg = cfg.lumen_config(_corpus_sampler(cfg, manifest, out))
    arch = cfg.lumen_architecture
    checkpoints = out / "checkpoints"

    def options(stage: str) -> dict[str, Any]:
        return {
            "config_hash": cfg.config_hash(),
            "log_path": out / "logs" / f"{stage}.jsonl",
            "checkpoint_dir": checkpoints,
            "resume_from": _latest_checkpoint(checkpoints, stage) if args.resume else None,
        }

    _write_run_record(out, cfg, "train-lumen")
    shared = train_vae_shared(train_cfg, corpus, arch, **options(SHARED_STAGE))["vae_shared"]
    nd = train_vae_nd(train_cfg, corpus, arch, **options(ND_STAGE))["vae_nd"]
    mapping = train_mapping(train_cfg, corpus, freeze(shared), freeze(nd), **options(MAPPING_STAGE))["mapping"]
    bundle = LumenBundle(shared, nd, mapping, train_cfg.resolution)  # type: ignore[arg-type]
    path = save_lumen_bundle(out / LUMEN_BUNDLE, bundle, config_hash=cfg.config_hash(), metadata={"seed": cfg.seed})
    _plot_logs(out, (SHARED_STAGE, ND_STAGE, MAPPING_STAGE))
    logger.info("Luminance bundle written to %s", path)
    return 0


def cmd_train_hue(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    out = Path(args.out)
    train_cfg = cfg.hue_config()
    if train_cfg.luminance_source is LuminanceSource.RESTORED and not Path(str(train_cfg.lumen_checkpoint)).is_file():
        msg = f"luminance_source = 'restored' but the luminance checkpoint {train_cfg.lumen_checkpoint} does not exist"
        raise ConfigurationError(msg)
    manifest = load_manifest(args.corpus)
    corpus = HueCorpus.from_images(load_lab_images(manifest, Role.NON_DEGRADED, Split.TRAIN), train_cfg.prior)
    checkpoints = out / "checkpoints"

    _write_run_record(out, cfg, "train-hue")
    result = train_hue(
        train_cfg,
        corpus,
        cfg.hue_architecture,
        config_hash=cfg.config_hash(),
        log_path=out / "logs" / f"{HUE_STAGE}.jsonl",
        checkpoint_dir=checkpoints,
        resume_from=_latest_checkpoint(checkpoints, HUE_STAGE) if args.resume else None,
    )
    bundle = HueBundle(result["hue"], train_cfg.resolution)  # type: ignore[arg-type]
    path = save_hue_bundle(out / HUE_BUNDLE, bundle, config_hash=cfg.config_hash(), metadata={"seed": cfg.seed})
    _plot_logs(out, (HUE_STAGE,))
    logger.info("Hue bundle written to %s", path)
    return 0


# restore


def cmd_restore(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    out = Path(args.out)
    img = rgb_to_lab(read_png(args.image))
    external = PriorMask.load(args.background) if args.background else None
    lumen = load_lumen_bundle(args.lumen_ckpt)
    hue = load_hue_bundle(args.hue_ckpt)
    restored = restore_painting(img, lumen, hue, cfg.prior, external)
    write_png(restored.rgb, out)

    mask = restored.prior.mask
    side = {
        "image": str(args.image),
        "size": list(img.shape),
        "silk": restored.prior.silk.to_json(),
        "silk_fallback": restored.prior.fallback,
        "mask": {"coverage": mask.coverage, "pixels": int(mask.mask.sum())},
        "timings": restored.timings,
        "lumen_checkpoint": str(args.lumen_ckpt),
        "hue_checkpoint": str(args.hue_ckpt),
        **cfg.metadata(),
    }
    _write_json(out.with_suffix(".json"), side)
    if args.panel:
        save_restoration_panel(args.panel, read_png(args.image), mask, restored.rgb, title=Path(args.image).stem)
    logger.info("Restored image written to %s", out)
    return 0


# evaluate


def _image_set(source: str, role: Role, split: Split | None) -> tuple[list[str], list[RgbImage]]:
    """Images of a directory (sorted by name) or of one role of a manifest, keyed by file stem."""
    path = Path(source)
    if path.is_dir():
        files = sorted(path.glob("*.png"))
    else:
        manifest = load_manifest(path)
        files = [manifest.resolve(entry) for entry in manifest.select(role, split)]
    return [f.stem for f in files], [read_png(f) for f in files]


def _align(names: list[str], images: list[RgbImage], order: list[str], what: str) -> list[RgbImage]:
    lookup = dict(zip(names, images))
    missing = sorted(set(order) - set(lookup))
    if missing or len(lookup) != len(order):
        msg = f"The {what} set does not match the predictions: missing {missing[:5]}, {len(lookup)} vs {len(order)}"
        raise DimensionError(msg)
    return [lookup[name] for name in order]


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _run_config(args)
    mode = EvaluationMode(args.mode) if args.mode else cfg.evaluate.mode
    policy = MaskPolicy(args.mask_policy) if args.mask_policy else cfg.evaluate.mask_policy
    split = Split(args.split) if args.split else None
    pred_names, preds = _image_set(args.pred, Role(args.pred_role), split)
    ref_names, refs = _image_set(args.ref, Role(args.ref_role), split)

    def masks_of(images: list[RgbImage]) -> list[PriorMask] | None:
        if policy is MaskPolicy.NONE:
            return None
        return [extract_color_prior(rgb_to_lab(img), cfg.prior).mask for img in images]

    spec = cfg.evaluate.extractor
    if mode is EvaluationMode.PAIRED:
        refs = _align(ref_names, refs, pred_names, "reference")
        sources = refs
        if args.mask_source and policy is not MaskPolicy.NONE:
            src_names, src_images = _image_set(args.mask_source, Role(args.ref_role), split)
            sources = _align(src_names, src_images, pred_names, "mask source")
        report = evaluate_paired(preds, refs, pred_names, mask_policy=policy, masks=masks_of(sources))
    elif spec.is_external:
        if not (args.pred_embeddings and args.ref_embeddings):
            msg = f"Extractor '{spec.name}' needs --pred-embeddings and --ref-embeddings"
            raise ConfigurationError(msg)
        score = fid_from_embeddings(
            load_embeddings(args.pred_embeddings, spec), load_embeddings(args.ref_embeddings, spec), spec
        )
        report = MetricReport(mode, policy, set_delta_colorfulness=set_delta_colorfulness(preds, refs), fid=score)
    else:
        report = evaluate_unpaired(
            preds, refs, spec, mask_policy=policy, pred_masks=masks_of(preds), ref_masks=masks_of(refs)
        )
    report = dataclasses.replace(report, config_hash=cfg.config_hash(), seed=cfg.seed)
    json_path, _ = report.save(args.out, args.stem)
    sys.stdout.write(report.to_table())
    logger.info("Report written to %s", json_path)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run configuration (defaults are used when omitted)")
    parser.add_argument("--seed", type=int, default=None, help="overrides the configured seed and PREVIVOR_SEED")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revive",
        description="Two-stage colour restoration of degraded silk paintings.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    make = commands.add_parser("make-corpus", help="generate a synthetic paired corpus with its manifest")
    _add_common(make)
    make.add_argument("--out", required=True, help="output directory")
    make.add_argument("--n", type=int, default=None, help="number of paintings (default: corpus.n_images)")
    make.set_defaults(handler=cmd_make_corpus)

    fit = commands.add_parser("fit-curve", help="fit an empirical degradation curve from paired images")
    _add_common(fit)
    fit.add_argument("--pairs", required=True, help="corpus manifest with paired entries")
    fit.add_argument("--bins", type=int, default=None, help="number of bins (default: degrade.bins)")
    fit.add_argument("--out", required=True, help="curve JSON to write")
    fit.set_defaults(handler=cmd_fit_curve)

    prior = commands.add_parser("extract-prior", help="estimate the silk colour and the colour-prior mask")
    _add_common(prior)
    prior.add_argument("--image", required=True, help="painting PNG")
    prior.add_argument("--background", help="1-bit PNG background mask from an external segmenter")
    prior.add_argument("--fallback", action="store_true", help="use (0, 0) as silk colour when none can be estimated")
    prior.add_argument("--out-mask", required=True, help="1-bit mask PNG to write")
    prior.add_argument("--out-silk", required=True, help="silk estimate JSON to write")
    prior.set_defaults(handler=cmd_extract_prior)

    for name, handler, what in (
        ("train-lumen", cmd_train_lumen, "the luminance VAEs and mapping network"),
        ("train-hue", cmd_train_hue, "the hue-correction network"),
    ):
        train = commands.add_parser(name, help=f"train {what}")
        _add_common(train)
        train.add_argument("--corpus", required=True, help="corpus manifest")
        train.add_argument("--out", required=True, help="run directory for checkpoints, logs and plots")
        train.add_argument("--resume", action="store_true", help="continue from the latest checkpoints in --out")
        train.set_defaults(handler=handler)

    restore = commands.add_parser("restore", help="restore one painting with trained bundles")
    _add_common(restore)
    restore.add_argument("--image", required=True, help="degraded painting PNG")
    restore.add_argument("--lumen-ckpt", required=True, help="luminance bundle")
    restore.add_argument("--hue-ckpt", required=True, help="hue bundle or hue training checkpoint")
    restore.add_argument("--background", help="1-bit PNG background mask from an external segmenter")
    restore.add_argument("--panel", help="also write a degraded / mask / restored figure here")
    restore.add_argument("--out", required=True, help="restored PNG; the side-channel JSON goes next to it")
    restore.set_defaults(handler=cmd_restore)

    evaluate = commands.add_parser("evaluate", help="compare predictions against references")
    _add_common(evaluate)
    evaluate.add_argument("--pred", required=True, help="directory of PNGs or corpus manifest")
    evaluate.add_argument("--ref", required=True, help="directory of PNGs or corpus manifest")
    evaluate.add_argument("--mode", choices=[m.value for m in EvaluationMode], help="default: evaluate.mode")
    evaluate.add_argument("--mask-policy", choices=[p.value for p in MaskPolicy], help="default: evaluate.mask_policy")
    evaluate.add_argument("--mask-source", help="images the prior masks are computed from (default: the references)")
    evaluate.add_argument("--pred-role", default=str(Role.PAIRED_DEGRADED), choices=[r.value for r in Role])
    evaluate.add_argument("--ref-role", default=str(Role.PAIRED_RESTORED), choices=[r.value for r in Role])
    evaluate.add_argument("--split", choices=[s.value for s in Split], help="restrict manifest entries to a split")
    evaluate.add_argument("--pred-embeddings", help=".npy embeddings of the predictions (external extractors)")
    evaluate.add_argument("--ref-embeddings", help=".npy embeddings of the references (external extractors)")
    evaluate.add_argument("--stem", default="report", help="file name stem of the report")
    evaluate.add_argument("--out", required=True, help="report directory")
    evaluate.set_defaults(handler=cmd_evaluate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger("heritage.revive").setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return int(args.handler(args))
    except USAGE_ERRORS as err:
        logger.error("%s", err)  # noqa: TRY400
        return 2
    except StageError as err:
        logger.error("Restoration failed in the %s stage: %s", err.stage, err)  # noqa: TRY400
        return 1
    except (ReviveError, OSError) as err:
        logger.error("%s: %s", type(err).__name__, err)  # noqa: TRY400
        return 1


if __name__ == "__main__":
    sys.exit(main())
