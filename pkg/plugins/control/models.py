from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from plugins.mixtures.divergence import CostKind
from plugins.mixtures.models import GaussianMixture, cholesky_factor

from .optimizer import OptimizerConfig


def _default_penalty() -> np.ndarray:
    return 1e-4 * np.eye(2)


@dataclass(frozen=True, eq=False)
class MpcConfig:
    """Receding-horizon settings.

    ``horizon`` is the prediction horizon in plant steps and
    ``control_horizon`` the prefix of each optimized plan that is applied
    before re-planning. ``R`` weights the control effort ``u^T R u``.
    """

    horizon: int = 5
    control_horizon: int = 1
    R: np.ndarray = field(default_factory=_default_penalty)
    cost_kind: CostKind = CostKind.L2_QUADRATIC
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self) -> None:
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.horizon}")
        if int(self.control_horizon) != self.control_horizon or self.control_horizon < 1:
            raise ValueError(f"control horizon must be a positive integer, got {self.control_horizon}")
        if self.control_horizon > self.horizon:
            raise ValueError(
                f"control horizon {self.control_horizon} exceeds prediction horizon {self.horizon}"
            )
        R = np.array(self.R, dtype=float, ndmin=2)
        cholesky_factor(R, "control penalty R")
        R.flags.writeable = False
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "control_horizon", int(self.control_horizon))
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "cost_kind", CostKind.parse(self.cost_kind))

    @property
    def control_dim(self) -> int:
        return int(self.R.shape[0])


@dataclass(frozen=True, eq=False)
class ControlPlan:
    """Per-component control sequences, indexed ``[component, step, channel]``."""

    controls: np.ndarray

    def __post_init__(self) -> None:
        controls = np.array(self.controls, dtype=float)
        if controls.ndim != 3:
            raise ValueError(f"controls must be a (components, steps, channels) array, got shape {controls.shape}")
        if not np.all(np.isfinite(controls)):
            raise ValueError("control plan has non-finite entries")
        controls.flags.writeable = False
        object.__setattr__(self, "controls", controls)

    @classmethod
    def zeros(cls, components: int, horizon: int, channels: int) -> "ControlPlan":
        return cls(np.zeros((components, horizon, channels)))

    @classmethod
    def from_flat(cls, vector, components: int, horizon: int, channels: int) -> "ControlPlan":
        vector = np.asarray(vector, dtype=float).reshape(-1)
        expected = components * horizon * channels
        if vector.size != expected:
            raise ValueError(f"flat plan has {vector.size} entries, expected {expected}")
        return cls(vector.reshape(components, horizon, channels))

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.controls.shape)

    def flat(self) -> np.ndarray:
        return self.controls.reshape(-1).copy()

    def shifted(self, steps: int) -> "ControlPlan":
        """Drop the first ``steps`` steps and pad the tail with zeros."""
        n, horizon, p = self.controls.shape
        steps = min(max(int(steps), 0), horizon)
        shifted = np.zeros((n, horizon, p))
        shifted[:, : horizon - steps] = self.controls[:, steps:]
        return ControlPlan(shifted)

    def permuted(self, order) -> "ControlPlan":
        return ControlPlan(self.controls[list(order)])


@dataclass(frozen=True, slots=True)
class MpcDiagnostics:
    objective_before: float
    objective_after: float
    iterations: int
    converged: bool
    grad_norm: float
    message: str = ""


@dataclass(frozen=True, eq=False)
class MpcStepResult:
    plan: ControlPlan
    mixture: GaussianMixture
    applied: np.ndarray  # (control_horizon, components, channels)
    intermediate: tuple[GaussianMixture, ...]
    diagnostics: MpcDiagnostics


@dataclass(eq=False)
class TrajectoryLog:
    """Time-indexed record of a controlled run.

    Every per-time list has one entry per recorded time. The control row of a
    time is the control applied over the following step, so the last row is
    all NaN. Agent lists stay empty when the run tracks statistics only.
    """

    times: list[float] = field(default_factory=list)
    component_means: list[np.ndarray] = field(default_factory=list)
    component_covs: list[np.ndarray] = field(default_factory=list)
    applied_controls: list[np.ndarray] = field(default_factory=list)
    objective_values: list[float] = field(default_factory=list)
    agent_states: list[np.ndarray] = field(default_factory=list)
    agent_assignments: list[np.ndarray] = field(default_factory=list)
    diagnostics: list[MpcDiagnostics] = field(default_factory=list)
    final_errors: np.ndarray | None = None
    scenario_name: str = ""

    @property
    def n_steps(self) -> int:
        return max(len(self.times) - 1, 0)

    @property
    def n_components(self) -> int:
        return int(self.component_means[0].shape[0]) if self.component_means else 0

    def validate(self) -> None:
        count = len(self.times)
        lists = {
            "component_means": self.component_means,
            "component_covs": self.component_covs,
            "applied_controls": self.applied_controls,
            "objective_values": self.objective_values,
        }
        if self.agent_states or self.agent_assignments:
            lists["agent_states"] = self.agent_states
            lists["agent_assignments"] = self.agent_assignments
        for name, values in lists.items():
            if len(values) != count:
                raise ValueError(f"trajectory log field '{name}' has {len(values)} entries, expected {count}")
        if len(self.diagnostics) != self.n_steps:
            raise ValueError(
                f"trajectory log has {len(self.diagnostics)} diagnostics for {self.n_steps} steps"
            )
