"""Loss weights, the milestone learning-rate schedule and the AdamW wrapper."""

from __future__ import annotations

import bisect
import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING

import torch

from ..exceptions import ConfigurationError, TrainingStateError

if TYPE_CHECKING:
    from collections.abc import Iterable


@dataclass(frozen=True)
class LossWeights:
    """Per-term loss weights.

    The defaults are the hue-stage weights; :meth:`luminance` gives the luminance-stage set.
    ``feat`` weighs discriminator feature matching, ``latent_adv`` the latent adversary and
    ``feat_l1`` the latent L1 term of the mapping network.
    """

    pix: float = 0.1
    mask: float = 1.0
    per: float = 5.0
    adv: float = 1.0
    col: float = 0.5
    feat: float = 1.0
    latent_adv: float = 1.0
    kl: float = 0.01
    feat_l1: float = 60.0

    def __post_init__(self) -> None:
        for item in dataclasses.fields(self):
            value = getattr(self, item.name)
            if not value >= 0:
                msg = f"Loss weight '{item.name}' must be non-negative, got {value}"
                raise ConfigurationError(msg)

    @classmethod
    def luminance(cls) -> LossWeights:
        return cls(pix=1.0, per=1.0, col=1.0)


@dataclass(frozen=True)
class LrSchedule:
    initial: float = 1e-4
    decay_factor: float = 0.5
    milestones: tuple[int, ...] = (4000, 8000, 12000, 16000, 20000)

    def __post_init__(self) -> None:
        object.__setattr__(self, "milestones", tuple(int(m) for m in self.milestones))
        if not self.initial > 0:
            msg = f"Initial learning rate must be positive, got {self.initial}"
            raise ConfigurationError(msg)
        if not 0.0 < self.decay_factor < 1.0:
            msg = f"Decay factor must lie in (0, 1), got {self.decay_factor}"
            raise ConfigurationError(msg)
        if any(b <= a for a, b in zip(self.milestones, self.milestones[1:])):
            msg = f"Milestones must be strictly ascending, got {self.milestones}"
            raise ConfigurationError(msg)

    def lr_at(self, step: int) -> float:
        """Learning rate for 0-based ``step``; a milestone step already uses the decayed rate."""
        return self.initial * self.decay_factor ** bisect.bisect_right(self.milestones, step)

    def scaled(self, iterations: int, reference: int = 24000) -> LrSchedule:
        """Milestones rescaled proportionally for a run of ``iterations`` instead of ``reference``."""
        milestones = sorted({max(1, round(m * iterations / reference)) for m in self.milestones})
        return dataclasses.replace(self, milestones=tuple(milestones))


class OptimizerState:
    """AdamW (betas 0.9 / 0.99, weight decay 0.01) over a fixed parameter list, plus a step counter."""

    def __init__(
        self,
        params: Iterable[torch.nn.Parameter],
        learning_rate: float = 1e-4,
        betas: tuple[float, float] = (0.9, 0.99),
        weight_decay: float = 0.01,
        eps: float = 1e-8,
    ) -> None:
        if not learning_rate > 0:
            msg = f"Learning rate must be positive, got {learning_rate}"
            raise ConfigurationError(msg)
        self.params = [p for p in params if p.requires_grad]
        if not self.params:
            msg = "Optimizer created without trainable parameters"
            raise TrainingStateError(msg)
        self.optimizer = torch.optim.AdamW(
            self.params, lr=learning_rate, betas=betas, weight_decay=weight_decay, eps=eps
        )
        self.step_count = 0

    @property
    def learning_rate(self) -> float:
        return float(self.optimizer.param_groups[0]["lr"])

    def zero_grad(self) -> None:
        self.optimizer.zero_grad(set_to_none=True)

    def state_dict(self) -> dict[str, object]:
        return {"optimizer": self.optimizer.state_dict(), "step_count": self.step_count}

    def load_state_dict(self, state: dict[str, object]) -> None:
        self.optimizer.load_state_dict(state["optimizer"])  # type: ignore[arg-type]
        self.step_count = int(state["step_count"])  # type: ignore[call-overload]


def optimizer_step(state: OptimizerState, schedule: LrSchedule) -> OptimizerState:
    """Apply one AdamW update at the scheduled learning rate and advance ``step_count``.

    Raises:
        TrainingStateError: if no parameter holds a gradient.
    """
    if all(p.grad is None for p in state.params):
        msg = "optimizer_step called before any gradient was computed"
        raise TrainingStateError(msg)
    lr = schedule.lr_at(state.step_count)
    for group in state.optimizer.param_groups:
        group["lr"] = lr
    state.optimizer.step()
    state.step_count += 1
    return state
