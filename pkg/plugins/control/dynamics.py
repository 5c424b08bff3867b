"""Discrete-time linear plant for density statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from plugins.mixtures.models import SYMMETRY_TOLERANCE, GaussianComponent, GaussianMixture

PSD_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LinearDynamics:
    """``x' = A x + B u`` with per-step process noise covariance ``Q``."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    dt: float

    def __post_init__(self) -> None:
        A = np.array(self.A, dtype=float, ndmin=2)
        B = np.array(self.B, dtype=float, ndmin=2)
        Q = np.array(self.Q, dtype=float, ndmin=2)
        dt = float(self.dt)
        if not np.isfinite(dt) or dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        d = A.shape[0]
        if B.ndim != 2 or B.shape[0] != d:
            raise ValueError(f"B must have {d} rows, got shape {B.shape}")
        if Q.shape != (d, d):
            raise ValueError(f"Q must be {d}x{d}, got shape {Q.shape}")
        for label, matrix in (("A", A), ("B", B), ("Q", Q)):
            if not np.all(np.isfinite(matrix)):
                raise ValueError(f"{label} has non-finite entries")
        if np.max(np.abs(Q - Q.T)) > SYMMETRY_TOLERANCE:
            raise ValueError("Q is not symmetric")
        if np.min(np.linalg.eigvalsh(Q)) < -PSD_TOLERANCE:
            raise ValueError("Q is not positive semi-definite")
        for array in (A, B, Q):
            array.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "dt", dt)

    @property
    def state_dim(self) -> int:
        return int(self.A.shape[0])

    @property
    def control_dim(self) -> int:
        return int(self.B.shape[1])


def double_integrator_2d(dt: float, process_noise: float = 0.0) -> LinearDynamics:
    """Planar double integrator over (x, y, vx, vy) driven by 2-D acceleration.

    ``process_noise`` scales an identity ``Q``; zero keeps the covariance
    evolution deterministic.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if process_noise < 0.0:
        raise ValueError(f"process noise must be nonnegative, got {process_noise}")
    A = np.array(
        [
            [1.0, 0.0, dt, 0.0],
            [0.0, 1.0, 0.0, dt],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    half_dt_sq = 0.5 * dt * dt
    B = np.array(
        [
            [half_dt_sq, 0.0],
            [0.0, half_dt_sq],
            [dt, 0.0],
            [0.0, dt],
        ]
    )
    return LinearDynamics(A=A, B=B, Q=process_noise * np.eye(4), dt=dt)


def propagate_mean(dyn: LinearDynamics, m, u) -> np.ndarray:
    """A m + B u. Accepts single vectors or stacks of row vectors."""
    m = np.asarray(m, dtype=float)
    u = np.asarray(u, dtype=float)
    if m.shape[-1] != dyn.state_dim:
        raise ValueError(f"mean has dimension {m.shape[-1]}, plant state dimension is {dyn.state_dim}")
    if u.shape[-1] != dyn.control_dim:
        raise ValueError(f"control has dimension {u.shape[-1]}, plant control dimension is {dyn.control_dim}")
    if m.shape[:-1] != u.shape[:-1]:
        raise ValueError(f"{m.shape[:-1]} means cannot be paired with {u.shape[:-1]} controls")
    return m @ dyn.A.T + u @ dyn.B.T


def propagate_cov(dyn: LinearDynamics, P) -> np.ndarray:
    """A P A^T + Q, symmetrized. Accepts a single matrix or a stack."""
    P = np.asarray(P, dtype=float)
    d = dyn.state_dim
    if P.shape[-2:] != (d, d):
        raise ValueError(f"covariance must be {d}x{d}, got shape {P.shape}")
    moved = dyn.A @ P @ dyn.A.T + dyn.Q
    return 0.5 * (moved + np.swapaxes(moved, -1, -2))


def propagate_mixture(dyn: LinearDynamics, mix: GaussianMixture, controls=None) -> GaussianMixture:
    """Advance every component one step; weights are unchanged."""
    if mix.dim != dyn.state_dim:
        raise ValueError(f"mixture dimension {mix.dim} does not match plant state dimension {dyn.state_dim}")
    if not len(mix):
        return mix
    if controls is None:
        controls = np.zeros((len(mix), dyn.control_dim))
    controls = np.asarray(controls, dtype=float)
    if controls.shape != (len(mix), dyn.control_dim):
        raise ValueError(f"expected controls of shape {(len(mix), dyn.control_dim)}, got {controls.shape}")
    means = propagate_mean(dyn, mix.means, controls)
    covs = propagate_cov(dyn, mix.covs)
    return GaussianMixture(
        tuple(GaussianComponent(c.weight, m, P) for c, m, P in zip(mix.components, means, covs)),
        dim=mix.dim,
    )
