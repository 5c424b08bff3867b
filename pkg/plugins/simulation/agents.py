from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import linalg

from plugins.mixtures.models import GaussianMixture


@dataclass(frozen=True, eq=False)
class AgentSample:
    """Agent states with the index of the component each agent follows."""

    states: np.ndarray
    assignments: np.ndarray

    def __post_init__(self) -> None:
        states = np.array(self.states, dtype=float, ndmin=2)
        assignments = np.array(self.assignments, dtype=int).reshape(-1)
        if states.shape[0] != assignments.size:
            raise ValueError(f"{states.shape[0]} agent states but {assignments.size} assignments")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "assignments", assignments)

    def __len__(self) -> int:
        return int(self.assignments.size)

    def __iter__(self) -> Iterator[tuple[np.ndarray, int]]:
        for state, index in zip(self.states, self.assignments):
            yield state, int(index)


def assign_agents(states, mix: GaussianMixture) -> np.ndarray:
    """Index of the component with the smallest Mahalanobis distance for each
    state; ties go to the lower index."""
    mix.require_nonempty("assignment mixture")
    states = np.asarray(states, dtype=float).reshape(-1, mix.dim)
    squared = np.empty((states.shape[0], len(mix)))
    for i, component in enumerate(mix.components):
        whitened = linalg.solve_triangular(component.chol, (states - component.mean).T, lower=True)
        squared[:, i] = np.sum(whitened * whitened, axis=0)
    return np.argmin(squared, axis=1)


def sample_agents(mix: GaussianMixture, per_component: int, seed: int) -> AgentSample:
    """Draw ``per_component`` agents from every component, then assign each
    agent to its closest component."""
    if int(per_component) != per_component or per_component < 1:
        raise ValueError(f"per_component must be a positive integer, got {per_component}")
    mix.require_nonempty("agent mixture")
    rng = np.random.default_rng(seed)
    draws = []
    for component in mix.components:
        noise = rng.standard_normal((int(per_component), mix.dim))
        draws.append(component.mean + noise @ component.chol.T)
    states = np.concatenate(draws, axis=0)
    return AgentSample(states=states, assignments=assign_agents(states, mix))
