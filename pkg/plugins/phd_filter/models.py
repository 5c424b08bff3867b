from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from plugins.control.dynamics import LinearDynamics
from plugins.mixtures.models import GaussianMixture, cholesky_factor


@dataclass(frozen=True, eq=False)
class PhdModel:
    """Linear-Gaussian motion and measurement model with state-independent
    survival and detection probabilities and uniform clutter."""

    survival_prob: float
    detect_prob: float
    motion: LinearDynamics
    obs_H: np.ndarray
    obs_R: np.ndarray
    clutter_intensity: float
    birth: GaussianMixture

    def __post_init__(self) -> None:
        for label, value in (("survival probability", self.survival_prob), ("detection probability", self.detect_prob)):
            if not 0.0 <= float(value) <= 1.0:
                raise ValueError(f"{label} must lie in [0, 1], got {value}")
        if not float(self.clutter_intensity) >= 0.0:
            raise ValueError(f"clutter intensity must be nonnegative, got {self.clutter_intensity}")
        H = np.array(self.obs_H, dtype=float, ndmin=2)
        R = np.array(self.obs_R, dtype=float, ndmin=2)
        d = self.motion.state_dim
        if H.ndim != 2 or H.shape[1] != d:
            raise ValueError(f"measurement matrix must have {d} columns, got shape {H.shape}")
        if R.shape != (H.shape[0], H.shape[0]):
            raise ValueError(f"measurement noise must be {H.shape[0]}x{H.shape[0]}, got shape {R.shape}")
        cholesky_factor(R, "measurement noise covariance")
        if self.birth.dim != d:
            raise ValueError(f"birth mixture dimension {self.birth.dim} does not match state dimension {d}")
        H.flags.writeable = False
        R.flags.writeable = False
        object.__setattr__(self, "survival_prob", float(self.survival_prob))
        object.__setattr__(self, "detect_prob", float(self.detect_prob))
        object.__setattr__(self, "clutter_intensity", float(self.clutter_intensity))
        object.__setattr__(self, "obs_H", H)
        object.__setattr__(self, "obs_R", R)

    @property
    def state_dim(self) -> int:
        return self.motion.state_dim

    @property
    def measurement_dim(self) -> int:
        return int(self.obs_H.shape[0])


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Measurements received in one scan."""

    measurements: tuple[np.ndarray, ...] = ()

    def __post_init__(self) -> None:
        cleaned = []
        for index, z in enumerate(self.measurements):
            vector = np.array(z, dtype=float).reshape(-1)
            if not np.all(np.isfinite(vector)):
                raise ValueError(f"measurement {index} has non-finite entries")
            vector.flags.writeable = False
            cleaned.append(vector)
        object.__setattr__(self, "measurements", tuple(cleaned))

    def __len__(self) -> int:
        return len(self.measurements)

    def __iter__(self):
        return iter(self.measurements)


@dataclass(frozen=True, slots=True)
class SurveillanceRegion:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(
                f"surveillance region bounds are empty: x [{self.x_min}, {self.x_max}], y [{self.y_min}, {self.y_max}]"
            )

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, point) -> bool:
        x, y = float(point[0]), float(point[1])
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def clutter_intensity(self, clutter_rate: float) -> float:
        """Uniform clutter density for ``clutter_rate`` false alarms per scan."""
        if clutter_rate < 0:
            raise ValueError(f"clutter rate must be nonnegative, got {clutter_rate}")
        return clutter_rate / self.area

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        low = np.array([self.x_min, self.y_min])
        high = np.array([self.x_max, self.y_max])
        return rng.uniform(low, high, size=(count, 2))


@dataclass(eq=False)
class PhdDemoResult:
    cardinality: list[float] = field(default_factory=list)
    measurement_counts: list[int] = field(default_factory=list)
    component_counts: list[int] = field(default_factory=list)
    estimates: list[np.ndarray] = field(default_factory=list)
    truth_counts: list[int] = field(default_factory=list)
