"""Receding-horizon control of a swarm mixture toward a target mixture."""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np

from plugins.mixtures.divergence import MixtureCost, evaluate_cost, target_only_term
from plugins.mixtures.models import GaussianMixture

from .dynamics import LinearDynamics, propagate_cov, propagate_mean, propagate_mixture
from .models import ControlPlan, MpcConfig, MpcDiagnostics, MpcStepResult, TrajectoryLog
from .optimizer import minimize

logger = logging.getLogger(__name__)

StepCallback = Callable[[int, GaussianMixture, np.ndarray], None]


class HorizonProblem:
    """Horizon objective for one planning instant.

    The covariance rollout does not depend on the controls, so the pairwise
    factorizations for every predicted step are built once here and only the
    means are rolled forward per evaluation. Instances are callables on the
    flat decision vector (ordered component, step, channel) returning the
    objective and its gradient.
    """

    def __init__(
        self,
        f0: GaussianMixture,
        g: GaussianMixture,
        dyn: LinearDynamics,
        cfg: MpcConfig,
        *,
        include_target_terms: bool = True,
    ) -> None:
        f0.require_nonempty("swarm mixture")
        g.require_nonempty("target mixture")
        f0.require_dim(g, "swarm and target mixtures")
        if f0.dim != dyn.state_dim:
            raise ValueError(f"mixture dimension {f0.dim} does not match plant state dimension {dyn.state_dim}")
        if cfg.control_dim != dyn.control_dim:
            raise ValueError(
                f"control penalty is {cfg.control_dim}x{cfg.control_dim} but the plant has "
                f"{dyn.control_dim} control channels"
            )
        self.dyn = dyn
        self.cfg = cfg
        self.initial_means = f0.means
        self.components = len(f0)
        self.shape = (self.components, cfg.horizon, dyn.control_dim)
        covs = f0.covs
        self.costs: list[MixtureCost] = []
        for _ in range(cfg.horizon):
            covs = propagate_cov(dyn, covs)
            self.costs.append(
                MixtureCost(cfg.cost_kind, f0.weights, covs, g, include_target_terms=include_target_terms)
            )

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def control_cost(self, controls: np.ndarray) -> float:
        return float(np.einsum("ikp,pq,ikq->", controls, self.cfg.R, controls))

    def rollout(self, controls: np.ndarray) -> list[np.ndarray]:
        """Predicted means after each step, excluding the initial means."""
        means = self.initial_means
        predicted = []
        for k in range(self.cfg.horizon):
            means = propagate_mean(self.dyn, means, controls[:, k, :])
            predicted.append(means)
        return predicted

    def __call__(self, flat) -> tuple[float, np.ndarray]:
        controls = np.asarray(flat, dtype=float).reshape(self.shape)
        predicted = self.rollout(controls)
        total = self.control_cost(controls)
        state_grads = []
        for cost, means in zip(self.costs, predicted):
            breakdown, grad = cost(means)
            total += breakdown.total
            state_grads.append(grad)

        # adjoint sweep: the costate after step k collects the gradients of every later stage
        grad_controls = 2.0 * np.einsum("pq,ikq->ikp", self.cfg.R, controls)
        costate = np.zeros_like(self.initial_means)
        for k in reversed(range(self.cfg.horizon)):
            costate = state_grads[k] + costate @ self.dyn.A
            grad_controls[:, k, :] += costate @ self.dyn.B
        return total, grad_controls.reshape(-1)


def horizon_objective(
    plan: ControlPlan,
    f0: GaussianMixture,
    g: GaussianMixture,
    dyn: LinearDynamics,
    cfg: MpcConfig,
    *,
    include_target_terms: bool = True,
) -> tuple[float, np.ndarray]:
    """Sum over the horizon of control effort plus the distance of each
    predicted mixture to ``g``, with its exact gradient over the flat plan."""
    problem = HorizonProblem(f0, g, dyn, cfg, include_target_terms=include_target_terms)
    if plan.shape != problem.shape:
        raise ValueError(f"plan has shape {plan.shape}, expected {problem.shape}")
    return problem(plan.flat())


def mpc_step(
    f: GaussianMixture,
    g: GaussianMixture,
    dyn: LinearDynamics,
    cfg: MpcConfig,
    warm: ControlPlan | None = None,
) -> MpcStepResult:
    """Optimize a plan from ``warm`` (or zeros) and apply its first
    ``control_horizon`` steps to ``f``.

    Reported objectives include the target-only terms; the optimizer runs
    without them.
    """
    problem = HorizonProblem(f, g, dyn, cfg, include_target_terms=False)
    if warm is None:
        warm = ControlPlan.zeros(*problem.shape)
    elif warm.shape != problem.shape:
        raise ValueError(f"warm-start plan has shape {warm.shape}, expected {problem.shape}")

    offset = cfg.horizon * target_only_term(cfg.cost_kind, g)
    try:
        result = minimize(problem, warm.flat(), cfg.optimizer)
    except (ValueError, RuntimeError) as exc:
        raise RuntimeError(f"MPC optimisation failed: {exc}") from exc

    plan = ControlPlan.from_flat(result.x_opt, *problem.shape)
    mixture = f
    intermediate = []
    applied = np.empty((cfg.control_horizon, len(f), dyn.control_dim))
    for k in range(cfg.control_horizon):
        applied[k] = plan.controls[:, k, :]
        mixture = propagate_mixture(dyn, mixture, applied[k])
        intermediate.append(mixture)

    diagnostics = MpcDiagnostics(
        objective_before=result.history[0] + offset,
        objective_after=result.f_opt + offset,
        iterations=result.iterations,
        converged=result.converged,
        grad_norm=result.grad_norm,
        message=result.message,
    )
    if not result.converged:
        logger.debug(f"MPC step stopped early: {result.message} (gradient norm {result.grad_norm:.3e})")
    return MpcStepResult(
        plan=plan,
        mixture=mixture,
        applied=applied,
        intermediate=tuple(intermediate),
        diagnostics=diagnostics,
    )


def run_horizon(
    f0: GaussianMixture,
    g: GaussianMixture,
    dyn: LinearDynamics,
    cfg: MpcConfig,
    steps: int,
    on_step: StepCallback | None = None,
) -> TrajectoryLog:
    """Iterate :func:`mpc_step` with warm starts for ``steps`` plant steps.

    ``on_step(step_index, mixture, controls)`` is called after every plant
    step with the mixture reached and the controls applied to get there.
    """
    if int(steps) != steps or steps < 0:
        raise ValueError(f"steps must be a nonnegative integer, got {steps}")
    log = TrajectoryLog()
    mixture = f0
    _record(log, 0.0, mixture, g, cfg)
    warm = None
    step_index = 0
    while step_index < steps:
        try:
            result = mpc_step(mixture, g, dyn, cfg, warm)
        except RuntimeError as exc:
            raise RuntimeError(f"step {step_index}: {exc}") from exc
        usable = min(cfg.control_horizon, steps - step_index)
        for k in range(usable):
            log.applied_controls[-1] = result.applied[k].copy()
            log.diagnostics.append(result.diagnostics)
            mixture = result.intermediate[k]
            step_index += 1
            _record(log, step_index * dyn.dt, mixture, g, cfg)
            if on_step is not None:
                on_step(step_index, mixture, result.applied[k])
        warm = result.plan.shifted(cfg.control_horizon)
    logger.debug(f"Receding-horizon run finished after {steps} steps")
    return log


def _record(log: TrajectoryLog, time: float, mixture: GaussianMixture, g: GaussianMixture, cfg: MpcConfig) -> None:
    log.times.append(float(time))
    log.component_means.append(mixture.means)
    log.component_covs.append(mixture.covs)
    log.applied_controls.append(np.full((len(mixture), cfg.control_dim), np.nan))
    log.objective_values.append(evaluate_cost(cfg.cost_kind, mixture, g).total)
