"""Synthetic GM-PHD run: truth agents drifting under the motion model,
noisy detections with uniform clutter, and the filter tracking them."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from framework.config_files import REQUIRED, ConfigError, SectionedConfig
from plugins.control.dynamics import double_integrator_2d
from plugins.mixtures.models import GaussianComponent, GaussianMixture

from .filter import extract_states, phd_predict, phd_update, prune_merge
from .models import MeasurementSet, PhdDemoResult, PhdModel, SurveillanceRegion

logger = logging.getLogger(__name__)

STATE_DIM = 4
FILTER_SECTION = "filter"
FILTER_KEYS = (
    "steps",
    "seed",
    "dt",
    "survival_prob",
    "detect_prob",
    "clutter_rate",
    "region",
    "process_noise",
    "measurement_noise",
    "weight_floor",
    "merge_dist",
    "max_components",
)
BLOCK_KEYS = ("mean", "cov_diag", "weight")
_POSITION_ROWS = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])


@dataclass(frozen=True, slots=True)
class TruthGroup:
    mean: np.ndarray
    cov: np.ndarray
    count: int


@dataclass(frozen=True, eq=False)
class PhdDemoConfig:
    """Settings of one synthetic filter run."""

    birth: GaussianMixture
    truth: tuple[TruthGroup, ...] = ()
    steps: int = 20
    seed: int = 0
    dt: float = 0.1
    survival_prob: float = 0.99
    detect_prob: float = 0.9
    clutter_rate: float = 5.0
    region: SurveillanceRegion = field(default_factory=lambda: SurveillanceRegion(-5.0, 5.0, -5.0, 5.0))
    process_noise: float = 0.01
    measurement_noise: float = 0.05
    weight_floor: float = 1e-5
    merge_dist: float = 4.0
    max_components: int = 100

    def build_model(self) -> PhdModel:
        return PhdModel(
            survival_prob=self.survival_prob,
            detect_prob=self.detect_prob,
            motion=double_integrator_2d(self.dt, self.process_noise),
            obs_H=_POSITION_ROWS,
            obs_R=self.measurement_noise * np.eye(2),
            clutter_intensity=self.region.clutter_intensity(self.clutter_rate),
            birth=self.birth,
        )

    @classmethod
    def from_sections(cls, config: SectionedConfig) -> "PhdDemoConfig":
        known = {FILTER_SECTION}
        truth_sections = config.numbered_sections("truth")
        birth_sections = config.numbered_sections("birth")
        known.update(truth_sections, birth_sections)
        for section in config.sections():
            if section not in known:
                raise config.error(f"unknown section [{section}]", section)
        config.require_known_keys(FILTER_SECTION, FILTER_KEYS)
        if not birth_sections:
            raise ConfigError("at least one [birth.N] block is required", path=config.path)

        birth = []
        for section in birth_sections:
            mean, cov = _read_block(config, section)
            weight = config.get_float(section, "weight", 0.1, minimum=0.0)
            try:
                birth.append(GaussianComponent(weight, mean, cov))
            except ValueError as exc:
                raise config.error(str(exc), section) from None
        truth = []
        for section in truth_sections:
            mean, cov = _read_block(config, section)
            count = config.get_int(section, "weight", REQUIRED, minimum=0)
            truth.append(TruthGroup(mean=mean, cov=cov, count=count))

        s = FILTER_SECTION
        region_values = config.get_vector(s, "region", None, length=4)
        try:
            region = SurveillanceRegion(*region_values) if region_values is not None else SurveillanceRegion(
                -5.0, 5.0, -5.0, 5.0
            )
        except ValueError as exc:
            raise config.error(str(exc), s, "region") from None
        survival = config.get_float(s, "survival_prob", 0.99, minimum=0.0)
        detect = config.get_float(s, "detect_prob", 0.9, minimum=0.0)
        for key, value in (("survival_prob", survival), ("detect_prob", detect)):
            if value > 1.0:
                raise config.error(f"'{key}' must lie in [0, 1], got {value:g}", s, key)
        measurement_noise = config.get_float(s, "measurement_noise", 0.05, minimum=0.0, exclusive_minimum=True)
        return cls(
            birth=GaussianMixture(tuple(birth), dim=STATE_DIM),
            truth=tuple(truth),
            steps=config.get_int(s, "steps", 20, minimum=0),
            seed=config.get_int(s, "seed", 0, minimum=0),
            dt=config.get_float(s, "dt", 0.1, minimum=0.0, exclusive_minimum=True),
            survival_prob=survival,
            detect_prob=detect,
            clutter_rate=config.get_float(s, "clutter_rate", 5.0, minimum=0.0),
            region=region,
            process_noise=config.get_float(s, "process_noise", 0.01, minimum=0.0),
            measurement_noise=measurement_noise,
            weight_floor=config.get_float(s, "weight_floor", 1e-5, minimum=0.0),
            merge_dist=config.get_float(s, "merge_dist", 4.0, minimum=0.0),
            max_components=config.get_int(s, "max_components", 100, minimum=1),
        )


def _read_block(config: SectionedConfig, section: str) -> tuple[np.ndarray, np.ndarray]:
    config.require_known_keys(section, BLOCK_KEYS)
    mean = config.get_vector(section, "mean", REQUIRED, length=STATE_DIM)
    cov_diag = config.get_vector(section, "cov_diag", REQUIRED, length=STATE_DIM)
    if np.any(cov_diag <= 0.0):
        raise config.error("'cov_diag' entries must be positive", section, "cov_diag")
    return mean, np.diag(cov_diag)


def load_phd_demo_config(path: str | Path) -> PhdDemoConfig:
    return PhdDemoConfig.from_sections(SectionedConfig.load(path))


def simulate_measurements(
    states: np.ndarray,
    model: PhdModel,
    region: SurveillanceRegion,
    clutter_rate: float,
    rng: np.random.Generator,
) -> MeasurementSet:
    """Detections of ``states`` followed by uniform clutter.

    Each state inside the region is detected with the model's detection
    probability and observed through ``obs_H`` with Gaussian noise. The
    clutter count is Poisson with mean ``clutter_rate``.
    """
    states = np.asarray(states, dtype=float).reshape(-1, model.state_dim)
    if clutter_rate < 0:
        raise ValueError(f"clutter rate must be nonnegative, got {clutter_rate}")
    noise_chol = np.linalg.cholesky(model.obs_R)
    measurements = []
    for x in states:
        position = model.obs_H @ x
        if not region.contains(position):
            continue
        if rng.random() < model.detect_prob:
            measurements.append(position + noise_chol @ rng.standard_normal(model.measurement_dim))
    clutter = region.sample(int(rng.poisson(clutter_rate)), rng)
    measurements.extend(clutter)
    return MeasurementSet(tuple(measurements))


def sample_truth(config: PhdDemoConfig, rng: np.random.Generator) -> np.ndarray:
    draws = [rng.multivariate_normal(group.mean, group.cov, size=group.count) for group in config.truth]
    if not draws:
        return np.zeros((0, STATE_DIM))
    return np.concatenate(draws, axis=0)


def run_phd_demo(config: PhdDemoConfig) -> PhdDemoResult:
    """Run the filter from an empty prior for ``config.steps`` scans."""
    model = config.build_model()
    rng = np.random.default_rng(config.seed)
    truth = sample_truth(config, rng)
    intensity = GaussianMixture((), dim=STATE_DIM)
    result = PhdDemoResult()
    for step in range(config.steps):
        truth = truth @ model.motion.A.T
        scan = simulate_measurements(truth, model, config.region, config.clutter_rate, rng)
        try:
            predicted = phd_predict(intensity, model)
            updated = phd_update(predicted, scan, model)
        except ValueError as exc:
            raise RuntimeError(f"filter step {step}: {exc}") from exc
        intensity = prune_merge(updated, config.weight_floor, config.merge_dist, config.max_components)
        estimates = extract_states(intensity)

        result.cardinality.append(intensity.total_weight)
        result.measurement_counts.append(len(scan))
        result.component_counts.append(len(intensity))
        result.estimates.append(np.array(estimates).reshape(-1, STATE_DIM))
        result.truth_counts.append(sum(config.region.contains(model.obs_H @ x) for x in truth))
        logger.debug(
            f"Scan {step}: {len(scan)} measurements, {len(intensity)} components, "
            f"expected count {intensity.total_weight:.3f}"
        )
    return result
