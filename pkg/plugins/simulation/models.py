from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, slots=True)
class RunManifest:
    """What ``simulate`` should run and which files to write.

    Exactly one of ``scenario_path`` and ``case_id`` is set; ``case_id`` may
    be ``"all"`` for the five built-in runs.
    """

    output_dir: Path
    scenario_path: Path | None = None
    case_id: int | str | None = None
    variant: str | None = None
    emit_csv: bool = True
    emit_svg: bool = True
    seed: int | None = None
    snapshot_steps: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if (self.scenario_path is None) == (self.case_id is None):
            raise ValueError("give either a scenario file or a case id")
        if self.seed is not None and self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass(frozen=True, slots=True)
class GridSpec:
    x_min: float = -4.0
    x_max: float = 4.0
    nx: int = 81
    y_min: float = -4.0
    y_max: float = 4.0
    ny: int = 81

    def __post_init__(self) -> None:
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid needs at least one point per axis, got {self.nx}x{self.ny}")
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise ValueError("grid bounds are reversed")

    @classmethod
    def parse(cls, x_range: str | None = None, y_range: str | None = None, size: str | None = None) -> "GridSpec":
        """Ranges as ``min:max`` and size as ``NX`` or ``NXxNY``."""
        defaults = cls()
        x_min, x_max = _parse_range(x_range, defaults.x_min, defaults.x_max)
        y_min, y_max = _parse_range(y_range, defaults.y_min, defaults.y_max)
        nx, ny = defaults.nx, defaults.ny
        if size:
            parts = size.lower().split("x")
            if len(parts) not in (1, 2):
                raise ValueError(f"grid size must look like 81 or 81x61, got {size!r}")
            try:
                nx = int(parts[0])
                ny = int(parts[-1])
            except ValueError:
                raise ValueError(f"grid size must look like 81 or 81x61, got {size!r}") from None
        return cls(x_min, x_max, nx, y_min, y_max, ny)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linspace(self.x_min, self.x_max, self.nx), np.linspace(self.y_min, self.y_max, self.ny)


def _parse_range(text: str | None, low: float, high: float) -> tuple[float, float]:
    if not text:
        return low, high
    parts = text.split(":")
    try:
        if len(parts) != 2:
            raise ValueError
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ValueError(f"range must look like -4:4, got {text!r}") from None
