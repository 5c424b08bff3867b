"""BFGS with Armijo backtracking over flat real vectors."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

CURVATURE_RATIO = 1e-10


@dataclass(frozen=True, slots=True)
class OptimizerConfig:
    grad_tol: float = 1e-6
    max_iters: int = 200
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    initial_step: float = 1.0
    min_step: float = 1e-16

    def __post_init__(self) -> None:
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not 0.0 < self.armijo_c < 1.0:
            raise ValueError(f"armijo_c must lie in (0, 1), got {self.armijo_c}")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError(f"backtrack_factor must lie in (0, 1), got {self.backtrack_factor}")
        if not self.initial_step > 0:
            raise ValueError(f"initial_step must be positive, got {self.initial_step}")
        if not 0.0 < self.min_step <= self.initial_step:
            raise ValueError(f"min_step must lie in (0, initial_step], got {self.min_step}")


@dataclass(slots=True)
class OptimizerResult:
    x_opt: np.ndarray
    f_opt: float
    grad_norm: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)
    message: str = ""


def _is_finite(value: float, grad: np.ndarray) -> bool:
    return bool(np.isfinite(value)) and bool(np.all(np.isfinite(grad)))


def minimize(objective: Objective, x0, cfg: OptimizerConfig | None = None) -> OptimizerResult:
    """Minimize ``objective`` (returning value and gradient) from ``x0``.

    Accepted iterates never increase the objective. Trial points with
    non-finite values are backtracked; ``RuntimeError`` is raised only when no
    finite trial point exists above ``cfg.min_step``. When the line search
    finds finite values but no sufficient decrease, the run stops with
    ``converged=False``.
    """
    cfg = cfg or OptimizerConfig()
    x = np.array(x0, dtype=float).reshape(-1)
    value, grad = objective(x)
    value = float(value)
    grad = np.asarray(grad, dtype=float).reshape(-1)
    if grad.shape != x.shape:
        raise ValueError(f"gradient has shape {grad.shape}, expected {x.shape}")
    if not _is_finite(value, grad):
        raise ValueError("objective or gradient is not finite at the starting point")

    n = x.size
    identity = np.eye(n)
    inverse_hessian = identity.copy()
    scaled = False
    history = [value]
    grad_norm = float(np.max(np.abs(grad))) if n else 0.0
    message = "maximum iterations reached"
    iterations = 0

    while grad_norm > cfg.grad_tol and iterations < cfg.max_iters:
        direction = -inverse_hessian @ grad
        slope = float(grad @ direction)
        if not slope < 0.0:
            logger.debug(f"Iteration {iterations}: not a descent direction, resetting inverse Hessian")
            inverse_hessian = identity.copy()
            direction = -grad
            slope = float(grad @ direction)

        step = cfg.initial_step
        saw_finite = False
        accepted = None
        while step >= cfg.min_step:
            trial = x + step * direction
            trial_value, trial_grad = objective(trial)
            trial_value = float(trial_value)
            trial_grad = np.asarray(trial_grad, dtype=float).reshape(-1)
            if _is_finite(trial_value, trial_grad):
                saw_finite = True
                if trial_value <= value + cfg.armijo_c * step * slope:
                    accepted = (trial, trial_value, trial_grad)
                    break
            step *= cfg.backtrack_factor

        if accepted is None:
            if not saw_finite:
                raise RuntimeError(
                    f"line search found no finite objective value above step {cfg.min_step:g} "
                    f"at iteration {iterations}"
                )
            message = "line search could not decrease the objective"
            logger.debug(f"Iteration {iterations}: {message} (gradient norm {grad_norm:.3e})")
            break

        trial, trial_value, trial_grad = accepted
        s = trial - x
        y = trial_grad - grad
        sy = float(s @ y)
        if sy > CURVATURE_RATIO * float(np.linalg.norm(s) * np.linalg.norm(y)):
            if not scaled:
                inverse_hessian = (sy / float(y @ y)) * identity
                scaled = True
            rho = 1.0 / sy
            left = identity - rho * np.outer(s, y)
            inverse_hessian = left @ inverse_hessian @ left.T + rho * np.outer(s, s)

        x, value, grad = trial, trial_value, trial_grad
        history.append(value)
        grad_norm = float(np.max(np.abs(grad)))
        iterations += 1

    converged = grad_norm <= cfg.grad_tol
    if converged:
        message = "gradient tolerance reached"
    logger.debug(f"BFGS finished after {iterations} iterations: {message} (f={value:.6e})")
    return OptimizerResult(
        x_opt=x,
        f_opt=value,
        grad_norm=grad_norm,
        iterations=iterations,
        converged=converged,
        history=history,
        message=message,
    )


def finite_difference_gradient(fun: Callable[[np.ndarray], float], x, step: float | None = None) -> np.ndarray:
    """Central differences with step ``1e-6 * (1 + ||x||_inf)`` unless given."""
    x = np.array(x, dtype=float).reshape(-1)
    if step is None:
        step = 1e-6 * (1.0 + (float(np.max(np.abs(x))) if x.size else 0.0))
    grad = np.empty_like(x)
    for i in range(x.size):
        forward = x.copy()
        backward = x.copy()
        forward[i] += step
        backward[i] -= step
        grad[i] = (float(fun(forward)) - float(fun(backward))) / (2.0 * step)
    return grad
