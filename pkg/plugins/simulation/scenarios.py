"""Built-in swarm scenarios.

Four densities start on a square grid, numbered counter-clockwise from the
first quadrant. Case 1 drives them with the plain L2 cost from a far or a
near grid; cases 2 to 4 use the L2 cost with the quadratic term against
four, three and five static targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from plugins.control.dynamics import LinearDynamics, double_integrator_2d
from plugins.control.models import MpcConfig
from plugins.control.optimizer import OptimizerConfig
from plugins.mixtures.divergence import CostKind
from plugins.mixtures.models import GaussianComponent, GaussianMixture

DEFAULT_DT = 0.01
DEFAULT_STEPS = 40
DEFAULT_AGENTS = 25
DEFAULT_POSITION_VAR = 0.05
DEFAULT_VELOCITY_VAR = 0.01
# loose so the targets fix positions without pinning the swarm velocity to zero
DEFAULT_TARGET_VELOCITY_VAR = 10.0
DEFAULT_SNAPSHOT_STEPS = (0, 5, 10, 40)

CASE_IDS = (1, 2, 3, 4)
CASE_1_VARIANTS = {"far": 3.0, "near": 1.5}

OVERRIDE_KEYS = frozenset(
    {
        "name",
        "variant",
        "dt",
        "steps",
        "horizon",
        "control_horizon",
        "r_penalty",
        "cost",
        "seed",
        "agents_per_component",
        "position_var",
        "velocity_var",
        "target_velocity_var",
        "process_noise",
        "reassign",
        "snapshot_steps",
        "grad_tol",
        "max_iters",
    }
)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    initial_mixture: GaussianMixture
    target_mixture: GaussianMixture
    dynamics: LinearDynamics
    mpc: MpcConfig = field(default_factory=MpcConfig)
    steps: int = DEFAULT_STEPS
    agents_per_component: int = DEFAULT_AGENTS
    rng_seed: int = 0
    reassign_each_step: bool = False
    snapshot_steps: tuple[int, ...] = DEFAULT_SNAPSHOT_STEPS

    def __post_init__(self) -> None:
        label = f"scenario '{self.name}'"
        self.initial_mixture.require_nonempty(f"{label} initial mixture")
        self.target_mixture.require_nonempty(f"{label} target mixture")
        self.initial_mixture.require_dim(self.target_mixture, f"{label} initial and target mixtures")
        if self.initial_mixture.dim != self.dynamics.state_dim:
            raise ValueError(
                f"{label}: mixture dimension {self.initial_mixture.dim} does not match "
                f"plant state dimension {self.dynamics.state_dim}"
            )
        if self.mpc.control_dim != self.dynamics.control_dim:
            raise ValueError(f"{label}: control penalty does not match the plant's {self.dynamics.control_dim} inputs")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"{label}: steps must be a positive integer, got {self.steps}")
        if int(self.agents_per_component) != self.agents_per_component or self.agents_per_component < 1:
            raise ValueError(f"{label}: agents_per_component must be a positive integer, got {self.agents_per_component}")
        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            raise ValueError(f"{label}: seed must be a nonnegative integer, got {self.rng_seed}")
        snapshots = tuple(sorted({int(s) for s in self.snapshot_steps}))
        if any(s < 0 for s in snapshots):
            raise ValueError(f"{label}: snapshot steps must be nonnegative, got {list(snapshots)}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "agents_per_component", int(self.agents_per_component))
        object.__setattr__(self, "rng_seed", int(self.rng_seed))
        object.__setattr__(self, "reassign_each_step", bool(self.reassign_each_step))
        object.__setattr__(self, "snapshot_steps", snapshots)


def component_cov(position_var: float = DEFAULT_POSITION_VAR, velocity_var: float = DEFAULT_VELOCITY_VAR) -> np.ndarray:
    return np.diag([position_var, position_var, velocity_var, velocity_var])


def square_grid(half_width: float) -> list[tuple[float, float]]:
    """Corners counter-clockwise from the first quadrant."""
    s = float(half_width)
    return [(s, s), (-s, s), (-s, -s), (s, -s)]


def positions_mixture(positions: Sequence[Sequence[float]], cov: np.ndarray, weight: float = 1.0) -> GaussianMixture:
    """Components at planar ``positions`` with zero velocity."""
    return GaussianMixture(
        tuple(GaussianComponent(weight, np.array([x, y, 0.0, 0.0]), cov) for x, y in positions)
    )


def case_targets(case_id: int) -> list[tuple[float, float]]:
    if case_id in (1, 2):
        return square_grid(1.0)
    if case_id == 3:
        return [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)]
    if case_id == 4:
        return square_grid(1.0) + [(0.0, 0.0)]
    raise ValueError(f"unknown case id {case_id!r}; expected one of {list(CASE_IDS)}")


def _take(overrides: dict, key: str, default: Any, cast) -> Any:
    if key not in overrides:
        return default
    value = overrides.pop(key)
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ValueError(f"override '{key}' has an invalid value {value!r}") from None


def _as_bool(value) -> bool:
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in {"1", "true", "yes", "on"}:
            return True
        if lowered in {"0", "false", "no", "off"}:
            return False
        raise ValueError(value)
    return bool(value)


def _as_int(value) -> int:
    number = float(value)
    if number != int(number):
        raise ValueError(value)
    return int(number)


def build_case(case_id: int, overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Scenario for a built-in case with optional parameter overrides."""
    if case_id not in CASE_IDS:
        raise ValueError(f"unknown case id {case_id!r}; expected one of {list(CASE_IDS)}")
    options = dict(overrides or {})
    unknown = sorted(set(options) - OVERRIDE_KEYS)
    if unknown:
        raise ValueError(f"unknown scenario overrides: {unknown}")

    variant = _take(options, "variant", None, lambda v: str(v).strip().lower() if v is not None else None)
    if case_id == 1:
        variant = variant or "far"
        if variant not in CASE_1_VARIANTS:
            raise ValueError(f"unknown case 1 variant {variant!r}; expected one of {sorted(CASE_1_VARIANTS)}")
        start = CASE_1_VARIANTS[variant]
        default_cost = CostKind.L2
        default_name = f"case1_{variant}"
    else:
        if variant is not None:
            raise ValueError(f"case {case_id} has no variants, got {variant!r}")
        start = 3.0
        default_cost = CostKind.L2_QUADRATIC
        default_name = f"case{case_id}"

    dt = _take(options, "dt", DEFAULT_DT, float)
    process_noise = _take(options, "process_noise", 0.0, float)
    position_var = _take(options, "position_var", DEFAULT_POSITION_VAR, float)
    velocity_var = _take(options, "velocity_var", DEFAULT_VELOCITY_VAR, float)
    target_velocity_var = _take(options, "target_velocity_var", DEFAULT_TARGET_VELOCITY_VAR, float)
    r_penalty = _take(options, "r_penalty", 1e-4, float)
    solver_defaults = OptimizerConfig()
    optimizer = OptimizerConfig(
        grad_tol=_take(options, "grad_tol", solver_defaults.grad_tol, float),
        max_iters=_take(options, "max_iters", solver_defaults.max_iters, _as_int),
    )
    mpc = MpcConfig(
        horizon=_take(options, "horizon", 5, _as_int),
        control_horizon=_take(options, "control_horizon", 1, _as_int),
        R=r_penalty * np.eye(2),
        cost_kind=_take(options, "cost", default_cost, CostKind.parse),
        optimizer=optimizer,
    )
    start_cov = component_cov(position_var, velocity_var)
    target_cov = component_cov(position_var, target_velocity_var)
    return Scenario(
        name=_take(options, "name", default_name, str),
        initial_mixture=positions_mixture(square_grid(start), start_cov),
        target_mixture=positions_mixture(case_targets(case_id), target_cov),
        dynamics=double_integrator_2d(dt, process_noise),
        mpc=mpc,
        steps=_take(options, "steps", DEFAULT_STEPS, _as_int),
        agents_per_component=_take(options, "agents_per_component", DEFAULT_AGENTS, _as_int),
        rng_seed=_take(options, "seed", 0, _as_int),
        reassign_each_step=_take(options, "reassign", False, _as_bool),
        snapshot_steps=_take(options, "snapshot_steps", DEFAULT_SNAPSHOT_STEPS, lambda v: tuple(_as_int(s) for s in v)),
    )


def all_cases(overrides: Mapping[str, Any] | None = None) -> list[Scenario]:
    """Case 1 far, case 1 near, then cases 2 to 4, sharing ``overrides``."""
    common = dict(overrides or {})
    return [
        build_case(1, {**common, "variant": "far"}),
        build_case(1, {**common, "variant": "near"}),
        build_case(2, common),
        build_case(3, common),
        build_case(4, common),
    ]
