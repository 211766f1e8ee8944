"""Alternating generator / discriminator updates with logging, checkpoints and resume."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .autograd import backward
from .checkpoint import load_checkpoint, save_checkpoint
from .optim import OptimizerState, optimizer_step
from .training_log import TrainingLog

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

    import torch
    from numpy.random import Generator
    from torch import nn

    from .optim import LrSchedule

    StepFn = Callable[[], tuple[torch.Tensor, torch.Tensor, dict[str, torch.Tensor]]]

logger = logging.getLogger(__name__)


@dataclass
class TrainingResult:
    """Trained modules of one stage with its per-iteration log and the checkpoints written."""

    stage: str
    modules: dict[str, nn.Module]
    history: list[dict[str, Any]] = field(default_factory=list)
    checkpoints: list[Path] = field(default_factory=list)

    def __getitem__(self, name: str) -> nn.Module:
        return self.modules[name]


class AdversarialTrainer:
    """Owns the optimizers of one training stage.

    Each :meth:`update` logs the generator terms, steps the generator on ``gen_total``,
    discards whatever the generator pass left on the discriminators, then steps the
    discriminators on ``disc_total``.

    Args:
        stage: name written to logs and checkpoints.
        generators: trainable modules updated from the generator loss.
        discriminators: modules updated from the discriminator loss.
        schedule: learning-rate schedule shared by both optimizers.
        frozen: modules saved with the checkpoint but never updated.
        rng: numpy generator drawing batches; saved and restored with checkpoints.
        noise: torch generators (by name) saved and restored with checkpoints.
        resume_from: checkpoint to continue from; the training log is then appended to.
    """

    def __init__(
        self,
        stage: str,
        generators: Mapping[str, nn.Module],
        discriminators: Mapping[str, nn.Module],
        schedule: LrSchedule,
        *,
        frozen: Mapping[str, nn.Module] | None = None,
        rng: Generator | None = None,
        noise: Mapping[str, torch.Generator] | None = None,
        config_hash: str = "",
        metadata: Mapping[str, Any] | None = None,
        log_path: str | Path | None = None,
        log_every: int = 10,
        checkpoint_dir: str | Path | None = None,
        checkpoint_every: int = 0,
        resume_from: str | Path | None = None,
    ) -> None:
        self.stage = stage
        self.generators = dict(generators)
        self.discriminators = dict(discriminators)
        self.frozen = dict(frozen or {})
        self.schedule = schedule
        self.rng = rng
        self.noise = dict(noise or {})
        self.config_hash = config_hash
        self.metadata = dict(metadata or {})
        self.log_path = log_path
        self.log_every = log_every
        self.checkpoint_dir = Path(checkpoint_dir) if checkpoint_dir is not None else None
        self.checkpoint_every = checkpoint_every
        self.gen_state = OptimizerState(
            itertools.chain.from_iterable(m.parameters() for m in self.generators.values()),
            learning_rate=schedule.initial,
        )
        self.disc_state = OptimizerState(
            itertools.chain.from_iterable(m.parameters() for m in self.discriminators.values()),
            learning_rate=schedule.initial,
        )
        if resume_from is not None:
            self._restore(resume_from)
        self.log = TrainingLog(log_path, stage, log_every, resume=resume_from is not None)
        self.checkpoints: list[Path] = []

    @property
    def step_count(self) -> int:
        return self.gen_state.step_count

    def _restore(self, path: str | Path) -> None:
        """Restore modules, optimizers and RNG states from ``path``.

        Raises:
            TrainingStateError: if the checkpoint is from another stage or configuration.
        """
        archive = load_checkpoint(path)
        archive.check_stage(self.stage)
        archive.check_config_hash(self.config_hash)
        for name, module in {**self.generators, **self.discriminators, **self.frozen}.items():
            archive.load_module(name, module)
        archive.load_optimizer("generator", self.gen_state)
        archive.load_optimizer("discriminator", self.disc_state)
        archive.restore_rng(self.rng, self.noise)
        logger.info("Resumed %s from %s at step %d", self.stage, path, self.step_count)

    def update(
        self, gen_total: torch.Tensor, disc_total: torch.Tensor, terms: Mapping[str, torch.Tensor]
    ) -> dict[str, Any]:
        """Log one iteration and apply both optimizer steps.

        Raises:
            NonFiniteLossError: before any parameter changes, if a logged value is not finite.
        """
        iteration = self.step_count
        entry = self.log.record(
            iteration,
            self.schedule.lr_at(iteration),
            {name: float(value.detach()) for name, value in terms.items()},
            float(gen_total.detach()),
            extra={"discriminator": float(disc_total.detach())},
        )
        self.gen_state.zero_grad()
        self.disc_state.zero_grad()
        backward(gen_total)
        optimizer_step(self.gen_state, self.schedule)
        self.disc_state.zero_grad()
        backward(disc_total)
        optimizer_step(self.disc_state, self.schedule)
        if self.checkpoint_every > 0 and self.step_count % self.checkpoint_every == 0:
            self.save_checkpoint()
        return entry

    def save_checkpoint(self, path: str | Path | None = None) -> Path | None:
        if path is None:
            if self.checkpoint_dir is None:
                return None
            path = self.checkpoint_dir / f"{self.stage}_{self.step_count:06d}.h5"
        written = save_checkpoint(
            path,
            stage=self.stage,
            modules={**self.generators, **self.discriminators, **self.frozen},
            optimizers={"generator": self.gen_state, "discriminator": self.disc_state},
            step_count=self.step_count,
            config_hash=self.config_hash,
            metadata=self.metadata,
            numpy_rng=self.rng,
            generators=self.noise,
        )
        self.checkpoints.append(written)
        return written

    def run(self, iterations: int, step: StepFn) -> TrainingResult:
        """Call ``step`` and :meth:`update` until ``iterations`` optimizer steps are done.

        A final checkpoint is written unless the cadence already produced one at the last
        step.
        """
        logger.info("Training %s from step %d to %d", self.stage, self.step_count, iterations)
        while self.step_count < iterations:
            gen_total, disc_total, terms = step()
            self.update(gen_total, disc_total, terms)
        if not (self.checkpoint_every > 0 and self.step_count % self.checkpoint_every == 0):
            self.save_checkpoint()
        return TrainingResult(
            self.stage, {**self.generators, **self.discriminators}, self.log.history, self.checkpoints
        )
