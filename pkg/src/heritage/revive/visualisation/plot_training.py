from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from matplotlib.figure import Figure  # type: ignore[import-not-found]

from ..exceptions import EmptyInputError
from ..nnet import read_training_log

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

BOOKKEEPING = frozenset({"stage", "iteration", "lr"})


def moving_average(values: Sequence[float], window: int) -> NDArray[np.float64]:
    """Trailing mean over at most ``window`` values; the first entries average what is available."""
    values = np.asarray(values, dtype=np.float64)
    window = max(1, min(window, len(values)))
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    ends = np.arange(1, len(values) + 1)
    starts = np.maximum(0, ends - window)
    return (cumulative[ends] - cumulative[starts]) / (ends - starts)


def loss_terms(entries: Sequence[dict[str, Any]]) -> list[str]:
    """Logged quantities in first-seen order, ``total`` last."""
    names: list[str] = []
    for entry in entries:
        names.extend(key for key in entry if key not in BOOKKEEPING and key not in names)
    if "total" in names:
        names.remove("total")
        names.append("total")
    return names


class LossCurves:
    def __init__(self, entries: Sequence[dict[str, Any]], title: str = "", window: int = 10) -> None:
        if not entries:
            msg = "A loss-curve plot needs at least one log entry"
            raise EmptyInputError(msg)
        self.entries = list(entries)
        self.title = title or str(self.entries[0].get("stage", ""))
        self.window = window

    def figure(self) -> Figure:
        fig = Figure(figsize=(7, 4), layout="constrained")
        ax = fig.add_subplot(1, 1, 1)
        for name in loss_terms(self.entries):
            rows = [e for e in self.entries if name in e]
            iterations = [e["iteration"] for e in rows]
            smoothed = moving_average([e[name] for e in rows], self.window)
            ax.plot(iterations, smoothed, label=name, linewidth=2.0 if name == "total" else 1.0)
        ax.set_xlabel("Iteration")
        ax.set_ylabel("Loss")
        ax.set_title(self.title)
        ax.legend(loc="upper right", fontsize="small")
        return fig

    def save_to_png(self, filename: str | Path) -> Path:
        path = Path(filename)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.figure().savefig(path, format="png")
        return path


def plot_training_log(log_path: str | Path, out_path: str | Path, window: int = 10) -> Path:
    """Render the JSON-lines log at ``log_path`` as a PNG of smoothed loss curves."""
    return LossCurves(read_training_log(log_path), window=window).save_to_png(out_path)
