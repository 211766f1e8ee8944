"""Loss primitives shared by the luminance and hue stages."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import torch
import torch.nn.functional as F  # noqa: N812

from ..exceptions import DimensionError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    Discriminator = Callable[[torch.Tensor], tuple[torch.Tensor, Sequence[torch.Tensor]]]
    Extractor = Callable[[torch.Tensor], Sequence[torch.Tensor]]

COLORFUL_REFERENCE = 40.0
_SQRT_EPS = 1e-12


def _check_same_shape(pred: torch.Tensor, target: torch.Tensor) -> None:
    if pred.shape != target.shape:
        msg = f"Prediction of shape {tuple(pred.shape)} does not match target of shape {tuple(target.shape)}"
        raise DimensionError(msg)


def pixel_loss(pred: torch.Tensor, target: torch.Tensor, smooth: bool = True) -> torch.Tensor:
    """Smooth L1 (``beta = 1``) or plain L1, averaged over all elements."""
    _check_same_shape(pred, target)
    if smooth:
        return F.smooth_l1_loss(pred, target, beta=1.0)
    return F.l1_loss(pred, target)


@dataclass(frozen=True)
class AdversarialLosses:
    gen: torch.Tensor
    disc: torch.Tensor
    feature_match: torch.Tensor


def adversarial_losses(discriminator: Discriminator, real: torch.Tensor, fake: torch.Tensor) -> AdversarialLosses:
    """Hinge losses plus discriminator feature matching.

    ``disc`` sees ``fake`` detached, so it only trains the discriminator. ``gen`` and
    ``feature_match`` carry gradients into ``fake`` (and into the discriminator, which the
    caller must discard before the discriminator update).
    """
    real_logits, real_features = discriminator(real)
    fake_logits, fake_features = discriminator(fake)
    detached_logits, _ = discriminator(fake.detach())

    gen = -fake_logits.mean()
    disc = F.relu(1.0 - real_logits).mean() + F.relu(1.0 + detached_logits).mean()
    terms = [F.l1_loss(f, r.detach()) for r, f in zip(real_features, fake_features)]
    feature_match = torch.stack(terms).mean() if terms else fake.new_zeros(())
    return AdversarialLosses(gen, disc, feature_match)


def kl_loss(mu: torch.Tensor, logvar: torch.Tensor) -> torch.Tensor:
    _check_same_shape(mu, logvar)
    return (0.5 * (mu * mu + logvar.exp() - 1.0 - logvar)).mean()


def perceptual_loss(pred: torch.Tensor, target: torch.Tensor, extractor: Extractor) -> torch.Tensor:
    """Sum over pyramid levels of the mean absolute feature difference."""
    _check_same_shape(pred, target)
    terms = [F.l1_loss(p, t) for p, t in zip(extractor(pred), extractor(target))]
    return torch.stack(terms).sum()


def _smooth_sqrt(x: torch.Tensor) -> torch.Tensor:
    # zero at zero with a finite derivative there
    return torch.sqrt(x + _SQRT_EPS) - math.sqrt(_SQRT_EPS)


def chroma_colorfulness(pred_ab: torch.Tensor) -> torch.Tensor:
    """``std(a) + std(b) + 0.3 * |(mean a, mean b)|`` per image of a ``B x 2 x H x W`` batch."""
    if pred_ab.dim() == 3:
        pred_ab = pred_ab.unsqueeze(0)
    if pred_ab.dim() != 4 or pred_ab.shape[1] != 2:
        msg = f"Expected chroma of shape B x 2 x H x W, got {tuple(pred_ab.shape)}"
        raise DimensionError(msg)
    flat = pred_ab.flatten(2)
    mean = flat.mean(dim=2)
    var = ((flat - mean.unsqueeze(2)) ** 2).mean(dim=2)
    sigma = _smooth_sqrt(var).sum(dim=1)
    return sigma + 0.3 * _smooth_sqrt((mean * mean).sum(dim=1))


def colorful_loss(pred_ab: torch.Tensor, reference: float = COLORFUL_REFERENCE) -> torch.Tensor:
    """``1 - clamp(C_ab / reference, 0, 1)`` averaged over the batch; zero chroma gives exactly 1."""
    stat = chroma_colorfulness(pred_ab)
    return (1.0 - torch.clamp(stat / reference, 0.0, 1.0)).mean()


def masked_pixel_loss(pred: torch.Tensor, target: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Mean absolute error over the elements selected by ``mask``.

    ``mask`` broadcasts against ``pred`` (e.g. ``B x 1 x H x W`` against ``B x 2 x H x W``);
    an empty mask gives zero.
    """
    _check_same_shape(pred, target)
    try:
        weight = torch.broadcast_to(mask.to(pred.dtype), pred.shape)
    except RuntimeError as err:
        msg = f"Mask of shape {tuple(mask.shape)} does not broadcast to {tuple(pred.shape)}"
        raise DimensionError(msg) from err
    return ((pred - target).abs() * weight).sum() / torch.clamp(weight.sum(), min=1.0)
