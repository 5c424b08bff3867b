"""Agent-level scenario runs on top of the receding-horizon controller."""

from __future__ import annotations

import logging

import numpy as np

from plugins.control.dynamics import propagate_mean
from plugins.control.models import TrajectoryLog
from plugins.control.mpc import run_horizon
from plugins.mixtures.models import GaussianMixture

from .agents import assign_agents, sample_agents
from .scenarios import Scenario

logger = logging.getLogger(__name__)


def run_scenario(s: Scenario) -> TrajectoryLog:
    """Control the scenario's mixture and move its agents open-loop.

    Each agent receives the control applied to the component it is assigned
    to. Assignments stay fixed unless the scenario re-assigns every step.
    """
    sample = sample_agents(s.initial_mixture, s.agents_per_component, s.rng_seed)
    states = sample.states
    assignments = sample.assignments
    agent_states = [states.copy()]
    agent_assignments = [assignments.copy()]

    def move_agents(step_index: int, mixture: GaussianMixture, controls: np.ndarray) -> None:
        nonlocal states, assignments
        states = propagate_mean(s.dynamics, states, controls[assignments])
        if s.reassign_each_step:
            assignments = assign_agents(states, mixture)
        agent_states.append(states.copy())
        agent_assignments.append(assignments.copy())

    try:
        log = run_horizon(s.initial_mixture, s.target_mixture, s.dynamics, s.mpc, s.steps, on_step=move_agents)
    except (RuntimeError, ValueError) as exc:
        raise RuntimeError(f"scenario '{s.name}': {exc}") from exc

    log.scenario_name = s.name
    log.agent_states = agent_states
    log.agent_assignments = agent_assignments
    log.final_errors = nearest_target_errors(log, s.target_mixture)
    log.validate()
    logger.debug(f"Scenario '{s.name}' final errors: {np.round(log.final_errors, 4).tolist()}")
    return log


def _position_distances(means: np.ndarray, targets: GaussianMixture) -> np.ndarray:
    targets.require_nonempty("target mixture")
    offsets = means[:, None, :2] - targets.means[None, :, :2]
    return np.linalg.norm(offsets, axis=-1)


def nearest_target_errors(log: TrajectoryLog, targets: GaussianMixture) -> np.ndarray:
    """Per component, the planar distance from its final mean to the closest target."""
    if not log.component_means:
        raise ValueError("trajectory log is empty")
    return _position_distances(log.component_means[-1], targets).min(axis=1)


def nearest_target_indices(log: TrajectoryLog, targets: GaussianMixture) -> np.ndarray:
    if not log.component_means:
        raise ValueError("trajectory log is empty")
    return _position_distances(log.component_means[-1], targets).argmin(axis=1)


def error_history(log: TrajectoryLog, targets: GaussianMixture) -> np.ndarray:
    """Nearest-target error per recorded time (rows) and component (columns)."""
    return np.stack([_position_distances(means, targets).min(axis=1) for means in log.component_means])


def convergence_step(log: TrajectoryLog, targets: GaussianMixture, tolerance: float) -> list[int | None]:
    """First step from which each component's error stays within ``tolerance``.

    ``None`` marks a component that is outside the tolerance at the end.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tolerance}")
    errors = error_history(log, targets)
    steps: list[int | None] = []
    for column in errors.T:
        outside = np.flatnonzero(column > tolerance)
        if outside.size == 0:
            steps.append(0)
        elif outside[-1] == column.size - 1:
            steps.append(None)
        else:
            steps.append(int(outside[-1]) + 1)
    return steps
