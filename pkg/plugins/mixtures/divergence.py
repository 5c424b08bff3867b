"""Closed-form distances between Gaussian-mixture intensities.

Every term reduces to pairwise kernels ``N(m_b; m_a, P_a + P_b)``. Covariances
never depend on the controls, so the pair factorizations are built once and
re-evaluated for new means; gradients are taken with respect to the means of
the first (swarm) mixture only.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from .models import GaussianMixture, cholesky_factor

logger = logging.getLogger(__name__)

KERNEL_FLOOR = 1e-300
_LOG_TWO_PI = float(np.log(2.0 * np.pi))


class CostKind(enum.Enum):
    CAUCHY_SCHWARZ = "cs"
    L2 = "l2"
    L2_QUADRATIC = "l2quad"

    @classmethod
    def parse(cls, value: "CostKind | str") -> "CostKind":
        if isinstance(value, CostKind):
            return value
        text = str(value).strip().lower().replace("-", "_")
        aliases = {
            "cs": cls.CAUCHY_SCHWARZ,
            "cauchy_schwarz": cls.CAUCHY_SCHWARZ,
            "cauchyschwarz": cls.CAUCHY_SCHWARZ,
            "l2": cls.L2,
            "l2quad": cls.L2_QUADRATIC,
            "l2_quad": cls.L2_QUADRATIC,
            "l2quadratic": cls.L2_QUADRATIC,
            "l2_quadratic": cls.L2_QUADRATIC,
        }
        try:
            return aliases[text]
        except KeyError:
            choices = ", ".join(kind.value for kind in cls)
            raise ValueError(f"unknown cost kind '{value}' (expected one of: {choices})") from None


@dataclass(frozen=True, slots=True)
class CostBreakdown:
    """Total cost and the double sums it is composed of.

    For the L2 kinds ``total = ff + gg - 2 fg + quad``. For Cauchy-Schwarz the
    terms are logarithms: ``ff_term = ln||f||``, ``gg_term = ln||g||``,
    ``fg_term = ln<f, g>`` and ``total = -fg + ff + gg``.
    """

    total: float
    ff_term: float = 0.0
    gg_term: float = 0.0
    fg_term: float = 0.0
    quad_term: float = 0.0


@dataclass(frozen=True, eq=False)
class PairwiseGaussians:
    """Factorized ``P_a[i] + P_b[j]`` for every pair of two covariance stacks."""

    whiten: np.ndarray  # (n, m, d, d), inverse lower Cholesky factor of each pair sum
    log_norm: np.ndarray  # (n, m)

    @classmethod
    def build(cls, covs_a, covs_b, label: str = "pair") -> "PairwiseGaussians":
        covs_a = np.asarray(covs_a, dtype=float)
        covs_b = np.asarray(covs_b, dtype=float)
        if covs_a.ndim != 3 or covs_b.ndim != 3 or covs_a.shape[1:] != covs_b.shape[1:]:
            raise ValueError(
                f"{label}: covariance stacks have incompatible shapes {covs_a.shape} and {covs_b.shape}"
            )
        n, m, d = covs_a.shape[0], covs_b.shape[0], covs_a.shape[1]
        whiten = np.empty((n, m, d, d))
        log_norm = np.empty((n, m))
        identity = np.eye(d)
        for i in range(n):
            for j in range(m):
                lower = cholesky_factor(covs_a[i] + covs_b[j], f"{label} covariance sum ({i}, {j})")
                whiten[i, j] = linalg.solve_triangular(lower, identity, lower=True)
                log_norm[i, j] = -0.5 * d * _LOG_TWO_PI - float(np.sum(np.log(np.diag(lower))))
        return cls(whiten=whiten, log_norm=log_norm)

    def evaluate(self, means_a, means_b) -> tuple[np.ndarray, np.ndarray]:
        """Log kernels ``ln N(b_j; a_i, S_ij)`` and ``S_ij^-1 (b_j - a_i)``."""
        residual = np.asarray(means_b, dtype=float)[None, :, :] - np.asarray(means_a, dtype=float)[:, None, :]
        whitened = np.einsum("ijkl,ijl->ijk", self.whiten, residual)
        log_kernel = self.log_norm - 0.5 * np.einsum("ijk,ijk->ij", whitened, whitened)
        precision_residual = np.einsum("ijlk,ijl->ijk", self.whiten, whitened)
        return log_kernel, precision_residual


def _kernel(log_kernel: np.ndarray) -> np.ndarray:
    kernel = np.exp(log_kernel)
    kernel[kernel < KERNEL_FLOOR] = 0.0
    return kernel


def _log_weights(weights: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(weights)


def target_only_term(kind: CostKind | str, g: GaussianMixture) -> float:
    """The piece of a cost that depends on the target alone: ``<g, g>`` for
    the L2 kinds, ``ln||g||`` for Cauchy-Schwarz."""
    kind = CostKind.parse(kind)
    g.require_nonempty("target mixture")
    gg = PairwiseGaussians.build(g.covs, g.covs, "target-target")
    log_kernel, _ = gg.evaluate(g.means, g.means)
    weights = np.outer(g.weights, g.weights)
    if kind is CostKind.CAUCHY_SCHWARZ:
        log_norm_sq = float(logsumexp(_log_weights(weights) + log_kernel))
        if not np.isfinite(log_norm_sq):
            raise ValueError("target mixture has zero norm")
        return 0.5 * log_norm_sq
    return float(np.sum(weights * _kernel(log_kernel)))


class MixtureCost:
    """One cost kind between a swarm mixture with fixed weights and covariances
    and a fixed target mixture.

    Calling the instance with swarm means returns the breakdown and, when
    asked, the gradient with respect to those means. With
    ``include_target_terms=False`` the target-only pieces (``gg`` for the L2
    kinds, ``ln||g||`` for Cauchy-Schwarz) are left out, which is what the
    optimizer consumes.
    """

    def __init__(
        self,
        kind: CostKind | str,
        weights,
        covs,
        target: GaussianMixture,
        *,
        include_target_terms: bool = True,
    ) -> None:
        self.kind = CostKind.parse(kind)
        self.weights = np.asarray(weights, dtype=float).reshape(-1)
        covs = np.asarray(covs, dtype=float)
        target.require_nonempty("target mixture")
        if self.weights.size == 0:
            raise ValueError("swarm mixture has no components")
        if covs.shape[1:] != (target.dim, target.dim):
            raise ValueError(
                f"swarm and target mixtures have different dimensions ({covs.shape[-1]} vs {target.dim})"
            )
        self.dim = target.dim
        self.target = target
        self.include_target_terms = include_target_terms
        self._target_weights = target.weights
        self._target_means = target.means
        self._ff = PairwiseGaussians.build(covs, covs, "swarm-swarm")
        self._fg = PairwiseGaussians.build(covs, target.covs, "swarm-target")
        self._ff_weights = np.outer(self.weights, self.weights)
        self._fg_weights = np.outer(self.weights, self._target_weights)
        self._target_term = target_only_term(self.kind, target) if include_target_terms else 0.0

    def __call__(self, means, *, gradient: bool = True) -> tuple[CostBreakdown, np.ndarray | None]:
        means = np.asarray(means, dtype=float)
        if means.shape != (self.weights.size, self.dim):
            raise ValueError(f"expected swarm means of shape {(self.weights.size, self.dim)}, got {means.shape}")
        ff_log, ff_pr = self._ff.evaluate(means, means)
        fg_log, fg_pr = self._fg.evaluate(means, self._target_means)
        if self.kind is CostKind.CAUCHY_SCHWARZ:
            return self._cauchy_schwarz(ff_log, ff_pr, fg_log, fg_pr, gradient)
        return self._l2(ff_log, ff_pr, fg_log, fg_pr, gradient)

    def _l2(self, ff_log, ff_pr, fg_log, fg_pr, gradient):
        ff_terms = self._ff_weights * _kernel(ff_log)
        fg_terms = self._fg_weights * _kernel(fg_log)
        ff = float(np.sum(ff_terms))
        fg = float(np.sum(fg_terms))
        gg = self._target_term
        quad = 0.0
        if self.kind is CostKind.L2_QUADRATIC:
            quad = -float(np.sum(self._fg_weights * fg_log))
        breakdown = CostBreakdown(
            total=ff + gg - 2.0 * fg + quad, ff_term=ff, gg_term=gg, fg_term=fg, quad_term=quad
        )
        if not gradient:
            return breakdown, None
        grad = 2.0 * np.einsum("ij,ijk->ik", ff_terms, ff_pr) - 2.0 * np.einsum("ij,ijk->ik", fg_terms, fg_pr)
        if self.kind is CostKind.L2_QUADRATIC:
            grad -= np.einsum("ij,ijk->ik", self._fg_weights, fg_pr)
        return breakdown, grad

    def _cauchy_schwarz(self, ff_log, ff_pr, fg_log, fg_pr, gradient):
        ff_exponents = _log_weights(self._ff_weights) + ff_log
        fg_exponents = _log_weights(self._fg_weights) + fg_log
        log_ff = float(logsumexp(ff_exponents))
        log_fg = float(logsumexp(fg_exponents))
        if not np.isfinite(log_ff):
            raise ValueError("swarm mixture has zero norm")
        if not np.isfinite(log_fg):
            raise ValueError("swarm and target mixtures have a zero inner product")
        ff_term = 0.5 * log_ff
        gg_term = self._target_term
        breakdown = CostBreakdown(
            total=-log_fg + ff_term + gg_term, ff_term=ff_term, gg_term=gg_term, fg_term=log_fg
        )
        if not gradient:
            return breakdown, None
        # softmax weights of the individual terms inside each log-sum
        ff_share = np.exp(ff_exponents - log_ff)
        fg_share = np.exp(fg_exponents - log_fg)
        grad = np.einsum("ij,ijk->ik", ff_share, ff_pr) - np.einsum("ij,ijk->ik", fg_share, fg_pr)
        return breakdown, grad


def _cost_for(kind, f: GaussianMixture, g: GaussianMixture, include_target_terms: bool) -> MixtureCost:
    f.require_dim(g, "swarm and target mixtures")
    f.require_nonempty("swarm mixture")
    g.require_nonempty("target mixture")
    return MixtureCost(kind, f.weights, f.covs, g, include_target_terms=include_target_terms)


def evaluate_cost(
    kind: CostKind | str,
    f: GaussianMixture,
    g: GaussianMixture,
    *,
    include_target_terms: bool = True,
) -> CostBreakdown:
    breakdown, _ = _cost_for(kind, f, g, include_target_terms)(f.means, gradient=False)
    return breakdown


def l2_distance(f: GaussianMixture, g: GaussianMixture) -> CostBreakdown:
    """Integrated squared difference of two intensities."""
    return evaluate_cost(CostKind.L2, f, g)


def l2_quadratic(f: GaussianMixture, g: GaussianMixture) -> CostBreakdown:
    """L2 distance plus ``-sum w_g w_f ln N(m_g; m_f, P_g + P_f)``."""
    return evaluate_cost(CostKind.L2_QUADRATIC, f, g)


def cauchy_schwarz(f: GaussianMixture, g: GaussianMixture) -> float:
    """``-ln(<f, g> / (||f|| ||g||))``; nonnegative and zero when f is proportional to g."""
    return evaluate_cost(CostKind.CAUCHY_SCHWARZ, f, g).total


def cost_gradient(kind: CostKind | str, f: GaussianMixture, g: GaussianMixture) -> np.ndarray:
    """Gradient of the cost with respect to each swarm component mean, shape (N_f, d)."""
    _, grad = _cost_for(kind, f, g, include_target_terms=False)(f.means)
    return grad


def surface_grid(
    kind: CostKind | str,
    f: GaussianMixture,
    g: GaussianMixture,
    probe_index: int,
    xs,
    ys,
) -> np.ndarray:
    """Cost with component ``probe_index`` moved over the (xs, ys) position grid.

    Returns an array of shape ``(len(ys), len(xs))``; every other coordinate of
    the probe, velocities included, keeps its current value.
    """
    if f.dim < 2:
        raise ValueError(f"surface sweeps need at least two state coordinates, mixture has {f.dim}")
    if not 0 <= probe_index < len(f):
        raise ValueError(f"probe index {probe_index} is out of range for {len(f)} components")
    xs = np.asarray(xs, dtype=float).reshape(-1)
    ys = np.asarray(ys, dtype=float).reshape(-1)
    cost = _cost_for(kind, f, g, include_target_terms=True)
    means = f.means.copy()
    surface = np.empty((ys.size, xs.size))
    for row, y in enumerate(ys):
        for col, x in enumerate(xs):
            means[probe_index, 0] = x
            means[probe_index, 1] = y
            breakdown, _ = cost(means, gradient=False)
            surface[row, col] = breakdown.total
    logger.debug(f"Evaluated {kind} surface on a {ys.size}x{xs.size} grid for probe {probe_index}")
    return surface
