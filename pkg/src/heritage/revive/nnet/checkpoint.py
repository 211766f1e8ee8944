"""HDF5 checkpoint archives.

A checkpoint is one ``.h5`` file::

    /modules/<name>/<state-dict key>      parameters and buffers
    /optimizers/<name>/<param index>/...  AdamW moments and step tensors
    /rng/torch, /rng/<name>               global and named torch generator states
    attrs["header"]                       JSON: stage, step_count, config_hash, shapes, metadata,
                                          optimizer param groups, numpy generator state
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import h5py  # type: ignore[import-not-found]
import numpy as np
import torch

from ..exceptions import TrainingStateError

if TYPE_CHECKING:
    from collections.abc import Mapping

    from numpy.random import Generator
    from torch import nn

    from .optim import OptimizerState

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path,
    *,
    stage: str,
    modules: Mapping[str, nn.Module],
    optimizers: Mapping[str, OptimizerState] | None = None,
    step_count: int = 0,
    config_hash: str = "",
    metadata: Mapping[str, Any] | None = None,
    numpy_rng: Generator | None = None,
    generators: Mapping[str, torch.Generator] | None = None,
) -> Path:
    """Write modules, optimizer moments and RNG states to ``path``.

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    optimizers = optimizers or {}
    header: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "stage": stage,
        "step_count": int(step_count),
        "config_hash": config_hash,
        "metadata": dict(metadata or {}),
        "shapes": {},
        "param_groups": {},
        "optimizer_steps": {},
        "numpy_rng": numpy_rng.bit_generator.state if numpy_rng is not None else None,
    }
    with h5py.File(path, "w") as archive:
        module_group = archive.create_group("modules")
        for name, module in modules.items():
            group = module_group.create_group(name)
            shapes = {}
            for key, tensor in module.state_dict().items():
                array = tensor.detach().cpu().numpy()
                group.create_dataset(key, data=array, track_times=False)
                shapes[key] = list(array.shape)
            header["shapes"][name] = shapes

        optimizer_group = archive.create_group("optimizers")
        for name, state in optimizers.items():
            torch_state = state.optimizer.state_dict()
            group = optimizer_group.create_group(name)
            for index, moments in torch_state["state"].items():
                param_group = group.create_group(str(index))
                for key, tensor in moments.items():
                    param_group.create_dataset(key, data=tensor.detach().cpu().numpy(), track_times=False)
            header["param_groups"][name] = torch_state["param_groups"]
            header["optimizer_steps"][name] = state.step_count

        rng_group = archive.create_group("rng")
        rng_group.create_dataset("torch", data=torch.get_rng_state().numpy(), track_times=False)
        for name, gen in (generators or {}).items():
            rng_group.create_dataset(name, data=gen.get_state().numpy(), track_times=False)
        archive.attrs["header"] = json.dumps(header, sort_keys=True)
    logger.info("Saved %s checkpoint at step %d to %s", stage, step_count, path)
    return path


@dataclass(frozen=True, eq=False)
class CheckpointArchive:
    """An opened checkpoint, fully read into memory."""

    path: Path
    header: dict[str, Any]
    module_states: dict[str, dict[str, torch.Tensor]]
    optimizer_moments: dict[str, dict[int, dict[str, torch.Tensor]]] = field(default_factory=dict)
    torch_rng: torch.Tensor | None = None
    generator_states: dict[str, torch.Tensor] = field(default_factory=dict)

    @property
    def stage(self) -> str:
        return str(self.header["stage"])

    @property
    def step_count(self) -> int:
        return int(self.header["step_count"])

    @property
    def config_hash(self) -> str:
        return str(self.header["config_hash"])

    @property
    def metadata(self) -> dict[str, Any]:
        return dict(self.header.get("metadata", {}))

    def check_stage(self, expected: str) -> None:
        if self.stage != expected:
            msg = f"{self.path} holds a '{self.stage}' checkpoint, expected '{expected}'"
            raise TrainingStateError(msg)

    def check_config_hash(self, expected: str) -> None:
        if self.config_hash != expected:
            msg = (
                f"{self.path} was written with configuration {self.config_hash[:12]}, "
                f"refusing to resume with {expected[:12]}"
            )
            raise TrainingStateError(msg)

    def load_module(self, name: str, module: nn.Module) -> nn.Module:
        if name not in self.module_states:
            msg = f"{self.path} has no module '{name}' (available: {sorted(self.module_states)})"
            raise TrainingStateError(msg)
        try:
            module.load_state_dict(self.module_states[name])
        except RuntimeError as err:
            msg = f"Module '{name}' in {self.path} does not fit the architecture: {err}"
            raise TrainingStateError(msg) from err
        return module

    def load_optimizer(self, name: str, state: OptimizerState) -> OptimizerState:
        if name not in self.header["param_groups"]:
            msg = f"{self.path} has no optimizer '{name}'"
            raise TrainingStateError(msg)
        param_groups = []
        for group in self.header["param_groups"][name]:
            restored = dict(group)
            restored["betas"] = tuple(restored["betas"])
            param_groups.append(restored)
        state.load_state_dict({
            "optimizer": {"state": self.optimizer_moments.get(name, {}), "param_groups": param_groups},
            "step_count": self.header["optimizer_steps"][name],
        })
        return state

    def restore_rng(
        self, numpy_rng: Generator | None = None, generators: Mapping[str, torch.Generator] | None = None
    ) -> None:
        if self.torch_rng is not None:
            torch.set_rng_state(self.torch_rng)
        for name, gen in (generators or {}).items():
            if name in self.generator_states:
                gen.set_state(self.generator_states[name])
        if numpy_rng is not None and self.header.get("numpy_rng") is not None:
            numpy_rng.bit_generator.state = self.header["numpy_rng"]


def load_checkpoint(path: str | Path) -> CheckpointArchive:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        FileNotFoundError: if ``path`` does not exist.
        TrainingStateError: if the file is not a checkpoint of a known format.
    """
    path = Path(path)
    if not path.is_file():
        msg = f"Checkpoint {path} does not exist"
        raise FileNotFoundError(msg)
    with h5py.File(path, "r") as archive:
        if "header" not in archive.attrs:
            msg = f"{path} is not a checkpoint archive"
            raise TrainingStateError(msg)
        header = json.loads(archive.attrs["header"])
        if header.get("format_version") != FORMAT_VERSION:
            msg = f"{path} has unsupported format version {header.get('format_version')}"
            raise TrainingStateError(msg)
        module_states = {
            name: {key: torch.from_numpy(np.array(dataset[()])) for key, dataset in group.items()}
            for name, group in archive["modules"].items()
        }
        optimizer_moments = {
            name: {
                int(index): {key: torch.from_numpy(np.array(dataset[()])) for key, dataset in moments.items()}
                for index, moments in group.items()
            }
            for name, group in archive["optimizers"].items()
        }
        rng_states = {name: torch.from_numpy(np.array(dataset[()])) for name, dataset in archive["rng"].items()}
    torch_rng = rng_states.pop("torch", None)
    return CheckpointArchive(path, header, module_states, optimizer_moments, torch_rng, rng_states)
