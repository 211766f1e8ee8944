"""Figures for training runs and restorations."""

from __future__ import annotations

from .plot_restoration import restoration_panel, save_restoration_panel
from .plot_training import LossCurves, loss_terms, moving_average, plot_training_log

__all__ = [
    "LossCurves",
    "loss_terms",
    "moving_average",
    "plot_training_log",
    "restoration_panel",
    "save_restoration_panel",
]
