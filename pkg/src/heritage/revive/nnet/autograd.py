"""Double-precision tensors, reverse-mode differentiation and seeded construction."""

from __future__ import annotations

import contextlib
import hashlib
from typing import TYPE_CHECKING

import numpy as np
import torch

from ..exceptions import ShapeError

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence

    from numpy.typing import ArrayLike, NDArray
    from torch import nn

DTYPE = torch.float64


def as_tensor(values: ArrayLike, requires_grad: bool = False) -> torch.Tensor:
    tensor = torch.as_tensor(np.asarray(values, dtype=np.float64), dtype=DTYPE).clone()
    return tensor.requires_grad_(requires_grad)


def to_numpy(tensor: torch.Tensor) -> NDArray[np.float64]:
    return tensor.detach().cpu().numpy().astype(np.float64, copy=True)


def backward(loss: torch.Tensor) -> None:
    """Populate ``.grad`` on every leaf that ``loss`` depends on.

    Gradients accumulate across calls until they are reset.

    Raises:
        ShapeError: if ``loss`` is not a scalar.
    """
    if loss.dim() != 0:
        msg = f"backward expects a scalar loss, got shape {tuple(loss.shape)}"
        raise ShapeError(msg)
    loss.backward()


def check_gradients(
    fn: Callable[..., torch.Tensor],
    inputs: Sequence[torch.Tensor],
    eps: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-7,
) -> bool:
    """Compare analytic gradients of ``fn`` with central finite differences.

    Returns:
        True if every entry satisfies ``|analytic - numeric| <= atol + rtol * |numeric|``.
    """
    return bool(
        torch.autograd.gradcheck(fn, tuple(inputs), eps=eps, atol=atol, rtol=rtol, raise_exception=False)
    )


@contextlib.contextmanager
def seeded(seed: int) -> Iterator[None]:
    """Run the body with the global torch generator seeded, restoring its state afterwards."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        yield


def freeze(module: nn.Module) -> nn.Module:
    module.requires_grad_(False)
    module.eval()
    return module


def is_frozen(module: nn.Module) -> bool:
    return not any(p.requires_grad for p in module.parameters())


def parameter_checksum(module: nn.Module) -> str:
    """SHA-256 over every parameter and buffer, in state-dict order."""
    digest = hashlib.sha256()
    for name, tensor in module.state_dict().items():
        digest.update(name.encode())
        digest.update(np.ascontiguousarray(tensor.detach().cpu().numpy()).tobytes())
    return digest.hexdigest()


def generator(seed: int | None) -> torch.Generator | None:
    """A CPU generator for reparameterisation noise, or None for noise-free inference."""
    if seed is None:
        return None
    return torch.Generator().manual_seed(seed)
