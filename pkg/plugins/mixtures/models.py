"""Gaussian-mixture intensity types and single-Gaussian kernels.

A mixture here is an intensity, not a probability density: its weights sum to
the expected number of agents it describes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
_LOG_TWO_PI = float(np.log(2.0 * np.pi))


def _as_vector(value, label: str) -> np.ndarray:
    vector = np.asarray(value, dtype=float)
    if vector.ndim == 0:
        vector = vector.reshape(1)
    if vector.ndim != 1:
        raise ValueError(f"{label} must be a vector, got shape {vector.shape}")
    return vector


def _as_matrix(value, label: str) -> np.ndarray:
    matrix = np.asarray(value, dtype=float)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{label} must be a square matrix, got shape {matrix.shape}")
    return matrix


def cholesky_factor(matrix, label: str = "covariance") -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix.

    Raises ``ValueError`` naming ``label`` when the matrix is not symmetric
    within 1e-12 or the factorization fails.
    """
    matrix = _as_matrix(matrix, label)
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{label} has non-finite entries")
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE:
        raise ValueError(f"{label} is not symmetric (max asymmetry {asymmetry:.3e})")
    try:
        return linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise ValueError(f"{label} is not positive-definite: {exc}") from exc


def _log_density_from_factor(residual: np.ndarray, lower: np.ndarray) -> float:
    whitened = linalg.solve_triangular(lower, residual, lower=True)
    log_det_half = float(np.sum(np.log(np.diag(lower))))
    return -0.5 * residual.size * _LOG_TWO_PI - log_det_half - 0.5 * float(whitened @ whitened)


def log_density(x, m, P, *, label: str = "P") -> float:
    """ln N(x; m, P) from the Cholesky factor of P."""
    x = _as_vector(x, "x")
    m = _as_vector(m, "m")
    if x.shape != m.shape:
        raise ValueError(f"x has dimension {x.size} but m has dimension {m.size}")
    lower = cholesky_factor(P, label)
    if lower.shape[0] != x.size:
        raise ValueError(f"{label} is {lower.shape[0]}x{lower.shape[0]} but x has dimension {x.size}")
    return _log_density_from_factor(x - m, lower)


def eval_density(x, m, P, *, label: str = "P") -> float:
    """N(x; m, P), accumulated in the log domain and exponentiated once."""
    return float(np.exp(log_density(x, m, P, label=label)))


def mahalanobis(x, m, P, *, label: str = "P") -> float:
    """sqrt((x - m)^T P^-1 (x - m)) without forming P^-1."""
    x = _as_vector(x, "x")
    m = _as_vector(m, "m")
    if x.shape != m.shape:
        raise ValueError(f"x has dimension {x.size} but m has dimension {m.size}")
    lower = cholesky_factor(P, label)
    if lower.shape[0] != x.size:
        raise ValueError(f"{label} is {lower.shape[0]}x{lower.shape[0]} but x has dimension {x.size}")
    whitened = linalg.solve_triangular(lower, x - m, lower=True)
    return float(np.sqrt(whitened @ whitened))


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    """One weighted term ``w * N(x; mean, cov)`` of an intensity."""

    weight: float
    mean: np.ndarray
    cov: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        weight = float(self.weight)
        if not np.isfinite(weight) or weight < 0.0:
            raise ValueError(f"component weight must be finite and nonnegative, got {self.weight}")
        mean = _as_vector(self.mean, "mean").copy()
        if not np.all(np.isfinite(mean)):
            raise ValueError("component mean has non-finite entries")
        cov = _as_matrix(self.cov, "cov").copy()
        if cov.shape[0] != mean.size:
            raise ValueError(
                f"component covariance is {cov.shape[0]}x{cov.shape[0]} but mean has dimension {mean.size}"
            )
        chol = cholesky_factor(cov, "component covariance")
        for array in (mean, cov, chol):
            array.flags.writeable = False
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "chol", chol)

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    def with_weight(self, weight: float) -> "GaussianComponent":
        return GaussianComponent(weight, self.mean, self.cov)

    def with_mean(self, mean) -> "GaussianComponent":
        return GaussianComponent(self.weight, mean, self.cov)


def product_integral(c1: GaussianComponent, c2: GaussianComponent) -> float:
    """w1 * w2 * N(m1; m2, P1 + P2), the integral of the product of two terms."""
    if c1.dim != c2.dim:
        raise ValueError(f"cannot integrate components of dimension {c1.dim} and {c2.dim}")
    return c1.weight * c2.weight * eval_density(c1.mean, c2.mean, c1.cov + c2.cov, label="P1 + P2")


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Ordered components sharing one state dimension.

    ``dim`` is inferred from the first component; an empty mixture must be
    given it explicitly.
    """

    components: tuple[GaussianComponent, ...] = ()
    dim: int | None = None

    def __post_init__(self) -> None:
        components = tuple(self.components)
        dim = self.dim
        if dim is None:
            if not components:
                raise ValueError("an empty mixture needs an explicit dimension")
            dim = components[0].dim
        dim = int(dim)
        if dim < 1:
            raise ValueError(f"mixture dimension must be positive, got {dim}")
        for index, component in enumerate(components):
            if not isinstance(component, GaussianComponent):
                raise ValueError(f"mixture entry {index} is not a GaussianComponent")
            if component.dim != dim:
                raise ValueError(
                    f"component {index} has dimension {component.dim}, mixture dimension is {dim}"
                )
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def from_arrays(cls, weights, means, covs, *, dim: int | None = None) -> "GaussianMixture":
        weights = np.asarray(weights, dtype=float).reshape(-1)
        means = np.asarray(means, dtype=float)
        covs = np.asarray(covs, dtype=float)
        if weights.size == 0:
            if dim is None and means.ndim == 2:
                dim = means.shape[1]
            return cls((), dim=dim)
        if means.ndim != 2 or means.shape[0] != weights.size:
            raise ValueError(f"expected {weights.size} mean rows, got shape {means.shape}")
        if covs.ndim != 3 or covs.shape[0] != weights.size:
            raise ValueError(f"expected {weights.size} covariance blocks, got shape {covs.shape}")
        components = tuple(GaussianComponent(w, m, P) for w, m, P in zip(weights, means, covs))
        return cls(components, dim=dim)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[GaussianComponent]:
        return iter(self.components)

    def __getitem__(self, index: int) -> GaussianComponent:
        return self.components[index]

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components], dtype=float)

    @property
    def means(self) -> np.ndarray:
        if not self.components:
            return np.zeros((0, self.dim))
        return np.stack([c.mean for c in self.components])

    @property
    def covs(self) -> np.ndarray:
        if not self.components:
            return np.zeros((0, self.dim, self.dim))
        return np.stack([c.cov for c in self.components])

    @property
    def total_weight(self) -> float:
        return float(sum(c.weight for c in self.components))

    def require_nonempty(self, label: str = "mixture") -> None:
        if not self.components:
            raise ValueError(f"{label} has no components")

    def require_dim(self, other: "GaussianMixture", label: str = "mixtures") -> None:
        if self.dim != other.dim:
            raise ValueError(f"{label} have different dimensions ({self.dim} vs {other.dim})")

    def with_means(self, means) -> "GaussianMixture":
        means = np.asarray(means, dtype=float)
        if means.shape != (len(self), self.dim):
            raise ValueError(f"expected means of shape {(len(self), self.dim)}, got {means.shape}")
        return GaussianMixture(
            tuple(c.with_mean(m) for c, m in zip(self.components, means)), dim=self.dim
        )

    def scaled(self, factor: float) -> "GaussianMixture":
        if factor < 0:
            raise ValueError(f"scale factor must be nonnegative, got {factor}")
        return GaussianMixture(
            tuple(c.with_weight(c.weight * factor) for c in self.components), dim=self.dim
        )

    def concat(self, other: "GaussianMixture") -> "GaussianMixture":
        self.require_dim(other)
        return GaussianMixture(self.components + other.components, dim=self.dim)

    def permuted(self, order: Sequence[int]) -> "GaussianMixture":
        return GaussianMixture(tuple(self.components[i] for i in order), dim=self.dim)

    def density(self, x) -> float:
        """Intensity value at ``x``."""
        x = _as_vector(x, "x")
        return float(
            sum(c.weight * np.exp(_log_density_from_factor(x - c.mean, c.chol)) for c in self.components)
        )


def mixture_from_points(
    means: Iterable[Sequence[float]],
    cov,
    *,
    weight: float = 1.0,
) -> GaussianMixture:
    """Mixture with one equally weighted component per mean and a shared covariance."""
    means = [np.asarray(m, dtype=float) for m in means]
    if not means:
        raise ValueError("at least one mean is required")
    return GaussianMixture(tuple(GaussianComponent(weight, m, cov) for m in means))
