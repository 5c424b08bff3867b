"""Gaussian-mixture PHD recursion: prediction, update, reduction and state
extraction."""

from __future__ import annotations

import logging

import numpy as np
from scipy import linalg

from plugins.control.dynamics import propagate_cov, propagate_mean
from plugins.mixtures.models import GaussianComponent, GaussianMixture, cholesky_factor, mahalanobis

from .models import MeasurementSet, PhdModel

logger = logging.getLogger(__name__)

_LOG_TWO_PI = float(np.log(2.0 * np.pi))


def phd_predict(prior: GaussianMixture, model: PhdModel) -> GaussianMixture:
    """Surviving components moved by the motion model, followed by the birth terms."""
    if prior.dim != model.state_dim:
        raise ValueError(f"prior dimension {prior.dim} does not match model state dimension {model.state_dim}")
    survivors = []
    if len(prior):
        means = propagate_mean(model.motion, prior.means, np.zeros((len(prior), model.motion.control_dim)))
        covs = propagate_cov(model.motion, prior.covs)
        survivors = [
            GaussianComponent(model.survival_prob * c.weight, m, P)
            for c, m, P in zip(prior.components, means, covs)
        ]
    return GaussianMixture(tuple(survivors) + model.birth.components, dim=model.state_dim)


def phd_update(predicted: GaussianMixture, Z: MeasurementSet, model: PhdModel) -> GaussianMixture:
    """Missed-detection copies followed by one Kalman-updated copy of every
    predicted component per measurement."""
    if predicted.dim != model.state_dim:
        raise ValueError(
            f"predicted dimension {predicted.dim} does not match model state dimension {model.state_dim}"
        )
    p_d = model.detect_prob
    missed = tuple(c.with_weight((1.0 - p_d) * c.weight) for c in predicted.components)
    if p_d == 0.0 or not len(Z) or not len(predicted):
        if len(Z) and len(predicted) == 0 and p_d > 0.0 and model.clutter_intensity == 0.0:
            raise ValueError("measurement 0 has a zero normalizing denominator (empty prediction, no clutter)")
        return GaussianMixture(missed, dim=predicted.dim)

    H, R = model.obs_H, model.obs_R
    q = model.measurement_dim
    identity = np.eye(predicted.dim)
    predicted_obs = []
    for index, c in enumerate(predicted.components):
        innovation_cov = H @ c.cov @ H.T + R
        innovation_cov = 0.5 * (innovation_cov + innovation_cov.T)
        lower = cholesky_factor(innovation_cov, f"innovation covariance of component {index}")
        gain = linalg.cho_solve((lower, True), H @ c.cov).T
        joseph = (identity - gain @ H) @ c.cov @ (identity - gain @ H).T + gain @ R @ gain.T
        predicted_obs.append((H @ c.mean, lower, gain, 0.5 * (joseph + joseph.T)))

    weights = predicted.weights
    updated = []
    for z_index, z in enumerate(Z):
        if z.size != q:
            raise ValueError(f"measurement {z_index} has dimension {z.size}, expected {q}")
        likelihoods = np.empty(len(predicted))
        for i, (eta, lower, _, _) in enumerate(predicted_obs):
            whitened = linalg.solve_triangular(lower, z - eta, lower=True)
            log_q = -0.5 * q * _LOG_TWO_PI - float(np.sum(np.log(np.diag(lower)))) - 0.5 * float(whitened @ whitened)
            likelihoods[i] = np.exp(log_q)
        numerators = p_d * weights * likelihoods
        denominator = model.clutter_intensity + float(np.sum(numerators))
        if not denominator > 0.0:
            raise ValueError(
                f"measurement {z_index} at {z.tolist()} has a zero normalizing denominator "
                "(no clutter and vanishing likelihoods)"
            )
        for i, (eta, _, gain, cov) in enumerate(predicted_obs):
            mean = predicted.components[i].mean + gain @ (z - eta)
            updated.append(GaussianComponent(numerators[i] / denominator, mean, cov))
    return GaussianMixture(missed + tuple(updated), dim=predicted.dim)


def _merge_pass(components: list[GaussianComponent], merge_dist: float) -> list[tuple[int, GaussianComponent]]:
    """One greedy merge sweep; returns ``(leader index, component)`` pairs sorted by leader index."""
    remaining = list(range(len(components)))
    groups: list[tuple[int, GaussianComponent]] = []
    while remaining:
        leader = max(remaining, key=lambda i: (components[i].weight, -i))
        anchor = components[leader]
        members = [i for i in remaining if mahalanobis(components[i].mean, anchor.mean, anchor.cov) <= merge_dist]
        remaining = [i for i in remaining if i not in members]
        if len(members) == 1:
            groups.append((leader, anchor))
            continue
        weights = np.array([components[i].weight for i in members])
        total = float(weights.sum())
        shares = weights / total if total > 0 else np.full(len(members), 1.0 / len(members))
        mean = np.sum(shares[:, None] * np.array([components[i].mean for i in members]), axis=0)
        cov = np.zeros_like(anchor.cov)
        for share, i in zip(shares, members):
            offset = mean - components[i].mean
            cov += share * (components[i].cov + np.outer(offset, offset))
        groups.append((leader, GaussianComponent(total, mean, 0.5 * (cov + cov.T))))
    groups.sort(key=lambda item: item[0])
    return groups


def prune_merge(
    mix: GaussianMixture,
    weight_floor: float = 1e-5,
    merge_dist: float = 4.0,
    max_components: int = 100,
) -> GaussianMixture:
    """Drop light components, merge close ones, cap the component count.

    Merging is greedy from the heaviest remaining component; a component
    joins the group when its Mahalanobis distance under the heaviest
    component's covariance is at most ``merge_dist``. Groups are replaced by
    their moment-matched Gaussian at the position of their heaviest member.
    Sweeps repeat until one merges nothing, so reducing a reduced mixture
    returns it unchanged. The cap keeps the heaviest components in their
    existing order.
    """
    if weight_floor < 0:
        raise ValueError(f"weight floor must be nonnegative, got {weight_floor}")
    if merge_dist < 0:
        raise ValueError(f"merge distance must be nonnegative, got {merge_dist}")
    if int(max_components) != max_components or max_components < 1:
        raise ValueError(f"max_components must be a positive integer, got {max_components}")

    components = [c for c in mix.components if c.weight >= weight_floor]
    dropped = len(mix) - len(components)
    sweeps = 0
    while True:
        sweeps += 1
        groups = _merge_pass(components, merge_dist)
        merged = len(groups) < len(components)
        components = [component for _, component in groups]
        if not merged:
            break

    if len(components) > max_components:
        kept = sorted(range(len(components)), key=lambda i: (-components[i].weight, i))[:max_components]
        components = [components[i] for i in sorted(kept)]
    logger.debug(
        f"Reduced mixture from {len(mix)} to {len(components)} components "
        f"({dropped} below the weight floor, {sweeps} merge sweeps)"
    )
    return GaussianMixture(tuple(components), dim=mix.dim)


def extract_states(mix: GaussianMixture, threshold: float = 0.5) -> list[np.ndarray]:
    """Means of components at or above ``threshold``, repeated by rounded weight."""
    states = []
    for c in mix.components:
        if c.weight >= threshold:
            states.extend(c.mean.copy() for _ in range(max(1, int(np.rint(c.weight)))))
    return states
