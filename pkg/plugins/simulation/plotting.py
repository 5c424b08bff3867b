"""SVG figures for scenario runs and cost surfaces.

Figures are built with the object-oriented matplotlib API (no pyplot state)
and saved with a fixed hash salt and no date stamp, so reruns produce the
same bytes.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from framework.atomic_files import write_bytes_atomic
from plugins.control.models import TrajectoryLog
from plugins.mixtures.models import GaussianMixture

SVG_HASH_SALT = "rfs-swarm"
_COMPONENT_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:purple", "tab:brown", "tab:cyan")


def save_svg(fig: Figure, path: str | Path) -> Path:
    buffer = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return write_bytes_atomic(path, buffer.getvalue())


def _color(index: int) -> str:
    return _COMPONENT_COLORS[index % len(_COMPONENT_COLORS)]


def _limits(log: TrajectoryLog, targets: GaussianMixture, margin: float = 0.5) -> tuple[float, float, float, float]:
    points = [np.concatenate(log.component_means)[:, :2], targets.means[:, :2]]
    if log.agent_states:
        points.append(np.concatenate(log.agent_states)[:, :2])
    stacked = np.concatenate(points)
    low = stacked.min(axis=0) - margin
    high = stacked.max(axis=0) + margin
    return float(low[0]), float(high[0]), float(low[1]), float(high[1])


def snapshots_figure(log: TrajectoryLog, targets: GaussianMixture, steps: Sequence[int]) -> Figure:
    """One panel per snapshot step: agents, targets and the mean tracks so far."""
    steps = [s for s in steps if 0 <= s <= log.n_steps] or [log.n_steps]
    fig = Figure(figsize=(3.2 * len(steps), 3.4))
    axes = fig.subplots(1, len(steps), squeeze=False)[0]
    x_min, x_max, y_min, y_max = _limits(log, targets)
    means = np.stack(log.component_means)
    for ax, step in zip(axes, steps):
        if log.agent_states:
            agents = log.agent_states[step]
            ax.scatter(agents[:, 0], agents[:, 1], s=4, color="tab:red", label="agents")
        ax.scatter(targets.means[:, 0], targets.means[:, 1], marker="x", s=60, color="black", label="targets")
        for i in range(means.shape[1]):
            ax.plot(means[: step + 1, i, 0], means[: step + 1, i, 1], color=_color(i), linewidth=1.2)
            ax.plot(means[step, i, 0], means[step, i, 1], marker="o", markersize=4, color=_color(i))
        ax.set_xlim(x_min, x_max)
        ax.set_ylim(y_min, y_max)
        ax.set_aspect("equal")
        ax.set_title(f"t = {log.times[step]:.2f} s")
        ax.set_xlabel("x")
    axes[0].set_ylabel("y")
    if log.scenario_name:
        fig.suptitle(log.scenario_name)
    fig.tight_layout()
    return fig


def responses_figure(log: TrajectoryLog, targets: GaussianMixture) -> Figure:
    """Mean position against time, one panel per coordinate."""
    fig = Figure(figsize=(7.0, 5.0))
    axes = fig.subplots(2, 1, sharex=True)
    times = np.asarray(log.times)
    means = np.stack(log.component_means)
    for axis, (ax, label) in enumerate(zip(axes, ("x", "y"))):
        for level in np.unique(np.round(targets.means[:, axis], 12)):
            ax.axhline(level, color="tab:green", linestyle=":", linewidth=1.0)
        for i in range(means.shape[1]):
            ax.plot(times, means[:, i, axis], color=_color(i), label=f"density {i + 1}")
        ax.set_ylabel(f"{label} position")
    axes[-1].set_xlabel("time [s]")
    axes[0].legend(loc="upper right", fontsize="small")
    if log.scenario_name:
        fig.suptitle(log.scenario_name)
    fig.tight_layout()
    return fig


def surface_figure(
    xs: np.ndarray,
    ys: np.ndarray,
    values: np.ndarray,
    initial: GaussianMixture,
    targets: GaussianMixture,
    probe_index: int,
    title: str,
) -> Figure:
    """Heatmap of a swept cost with the initial densities and targets marked."""
    fig = Figure(figsize=(5.5, 4.6))
    ax = fig.subplots()
    if values.size > 1 and len(xs) > 1 and len(ys) > 1:
        mesh = ax.pcolormesh(xs, ys, values, shading="nearest", cmap="viridis")
    else:
        mesh = ax.imshow(
            np.atleast_2d(values),
            extent=(xs[0] - 0.5, xs[-1] + 0.5, ys[0] - 0.5, ys[-1] + 0.5),
            origin="lower",
            cmap="viridis",
        )
    fig.colorbar(mesh, ax=ax, label="cost")
    others = [i for i in range(len(initial)) if i != probe_index]
    if others:
        ax.scatter(initial.means[others, 0], initial.means[others, 1], marker="o", facecolors="none",
                   edgecolors="white", s=50, label="densities")
    ax.scatter(initial.means[probe_index, 0], initial.means[probe_index, 1], marker="*", color="white",
               s=90, label="swept density")
    ax.scatter(targets.means[:, 0], targets.means[:, 1], marker="x", color="black", s=60, label="targets")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    return fig
