"""Figure rendering for the report path.

The Agg backend is forced before pyplot loads so headless runs work, and
PNG date metadata is stripped so identical runs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .wigner import ChronocyclicMap

_SAVE_KW = {"dpi": 150, "metadata": {"Date": None}}


def _finish(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_trace_figure(
    path: Path,
    x: np.ndarray,
    y: np.ndarray,
    xlabel: str,
    ylabel: str,
    title: str,
    reference: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    reference_label: str = "closed form",
) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(x, y, lw=1.4, label="numeric")
    if reference is not None:
        ax.plot(*reference, lw=1.0, ls="--", label=reference_label)
        ax.legend(frameon=False)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def save_map_figure(
    path: Path,
    cmap: ChronocyclicMap,
    title: str,
    xlabel: str = "collective detuning (rad/s)",
    ylabel: str = "time (s)",
) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.8))
    peak = float(np.max(np.abs(cmap.values))) or 1.0
    mesh = ax.pcolormesh(
        cmap.omega_axis.samples,
        cmap.t_axis.samples,
        cmap.values,
        cmap="RdBu_r",
        vmin=-peak,
        vmax=peak,
        shading="nearest",
        rasterized=True,
    )
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    _finish(fig, path)


def save_family_figure(
    path: Path,
    x: np.ndarray,
    traces: Sequence[np.ndarray],
    labels: Sequence[str],
    xlabel: str,
    ylabel: str,
    title: str,
) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for trace, label in zip(traces, labels):
        ax.plot(x, trace, lw=1.2, label=label)
    ax.legend(frameon=False, fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)
