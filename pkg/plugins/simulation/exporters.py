from __future__ import annotations

from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from framework.atomic_files import write_csv_atomic
from plugins.control.models import TrajectoryLog

TRAJECTORY_HEADER = ("t", "kind", "index", "x", "y", "vx", "vy", "ux", "uy", "objective")
SUMMARY_HEADER = ("component", "final_x", "final_y", "nearest_target", "final_error", "convergence_step")


def trajectory_rows(log: TrajectoryLog) -> Iterator[tuple]:
    """Component rows, then agent rows, for every recorded time."""
    for k, t in enumerate(log.times):
        controls = log.applied_controls[k]
        for i, mean in enumerate(log.component_means[k]):
            yield (t, "component", i, *mean[:4], *controls[i][:2], log.objective_values[k])
        if log.agent_states:
            for j, state in enumerate(log.agent_states[k]):
                yield (t, "agent", j, *state[:4], None, None, None)


def write_trajectory_csv(path: str | Path, log: TrajectoryLog) -> Path:
    return write_csv_atomic(path, TRAJECTORY_HEADER, trajectory_rows(log))


def write_summary_csv(
    path: str | Path,
    log: TrajectoryLog,
    nearest: Sequence[int],
    convergence: Sequence[int | None],
) -> Path:
    final = log.component_means[-1]
    rows = (
        (i, final[i][0], final[i][1], int(nearest[i]), float(log.final_errors[i]), convergence[i])
        for i in range(final.shape[0])
    )
    return write_csv_atomic(path, SUMMARY_HEADER, rows)


def write_surface_csv(path: str | Path, xs: np.ndarray, ys: np.ndarray, values: np.ndarray) -> Path:
    """First row ``y\\x`` then the x grid; one row per y value after that."""
    header = ["y\\x", *(format(float(x), ".10g") for x in xs)]
    rows = ((y, *row) for y, row in zip(ys, values))
    return write_csv_atomic(path, header, rows)
