"""Scenario files.

A ``[scenario]`` section selects a built-in case and overrides its
parameters; ``[initial.N]`` and ``[target.N]`` blocks replace the case's
mixtures. Without ``case`` both block kinds are required and the case 2
plant and controller defaults apply.

    [scenario]
    name = offset_targets
    case = 2
    steps = 60
    cost = l2quad

    [target.1]
    mean = 1.5, 1.0, 0, 0
    cov_diag = 0.05, 0.05, 10, 10
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np

from framework.config_files import REQUIRED, ConfigError, SectionedConfig
from plugins.mixtures.divergence import CostKind
from plugins.mixtures.models import GaussianComponent, GaussianMixture

from .scenarios import CASE_IDS, Scenario, build_case

SCENARIO_SECTION = "scenario"
SCENARIO_KEYS = (
    "name",
    "case",
    "variant",
    "dt",
    "steps",
    "horizon",
    "control_horizon",
    "cost",
    "r_penalty",
    "seed",
    "agents_per_component",
    "process_noise",
    "position_var",
    "velocity_var",
    "target_velocity_var",
    "reassign",
    "snapshot_steps",
)
BLOCK_KEYS = ("mean", "cov_diag", "weight")
STATE_DIM = 4


def _steps(values) -> tuple[int, ...] | None:
    return None if values is None else tuple(int(v) for v in values)


def _read_overrides(config: SectionedConfig) -> dict:
    s = SCENARIO_SECTION
    overrides = {}
    readers = {
        "name": lambda key: config.get_str(s, key),
        "variant": lambda key: config.get_str(s, key),
        "dt": lambda key: config.get_float(s, key, minimum=0.0, exclusive_minimum=True),
        "steps": lambda key: config.get_int(s, key, minimum=1),
        "horizon": lambda key: config.get_int(s, key, minimum=1),
        "control_horizon": lambda key: config.get_int(s, key, minimum=1),
        "r_penalty": lambda key: config.get_float(s, key, minimum=0.0, exclusive_minimum=True),
        "seed": lambda key: config.get_int(s, key, minimum=0),
        "agents_per_component": lambda key: config.get_int(s, key, minimum=1),
        "process_noise": lambda key: config.get_float(s, key, minimum=0.0),
        "position_var": lambda key: config.get_float(s, key, minimum=0.0, exclusive_minimum=True),
        "velocity_var": lambda key: config.get_float(s, key, minimum=0.0, exclusive_minimum=True),
        "target_velocity_var": lambda key: config.get_float(s, key, minimum=0.0, exclusive_minimum=True),
        "reassign": lambda key: config.get_bool(s, key),
        "snapshot_steps": lambda key: _steps(config.get_vector(s, key)),
    }
    for key, read in readers.items():
        value = read(key)
        if value is not None:
            overrides[key] = value
    cost = config.get_str(s, "cost")
    if cost is not None:
        try:
            overrides["cost"] = CostKind.parse(cost)
        except ValueError as exc:
            raise config.error(str(exc), s, "cost") from None
    return overrides


def _read_mixture(config: SectionedConfig, prefix: str) -> GaussianMixture | None:
    sections = config.numbered_sections(prefix)
    if not sections:
        return None
    components = []
    for section in sections:
        config.require_known_keys(section, BLOCK_KEYS)
        mean = config.get_vector(section, "mean", REQUIRED, length=STATE_DIM)
        cov_diag = config.get_vector(section, "cov_diag", REQUIRED, length=STATE_DIM)
        weight = config.get_float(section, "weight", 1.0, minimum=0.0)
        try:
            components.append(GaussianComponent(weight, mean, np.diag(cov_diag)))
        except ValueError as exc:
            raise config.error(str(exc), section, "cov_diag") from None
    return GaussianMixture(tuple(components))


def scenario_from_config(config: SectionedConfig, seed: int | None = None) -> Scenario:
    """Scenario described by a parsed file; ``seed`` replaces the file's seed."""
    initial_sections = config.numbered_sections("initial")
    target_sections = config.numbered_sections("target")
    known = {SCENARIO_SECTION, *initial_sections, *target_sections}
    for section in config.sections():
        if section not in known:
            raise config.error(f"unknown section [{section}]", section)
    if not config.has_section(SCENARIO_SECTION):
        raise ConfigError(f"missing [{SCENARIO_SECTION}] section", path=config.path)
    config.require_known_keys(SCENARIO_SECTION, SCENARIO_KEYS)

    case_id = config.get_int(SCENARIO_SECTION, "case")
    if case_id is not None and case_id not in CASE_IDS:
        raise config.error(f"'case' must be one of {list(CASE_IDS)}, got {case_id}", SCENARIO_SECTION, "case")
    initial = _read_mixture(config, "initial")
    target = _read_mixture(config, "target")
    if case_id is None and (initial is None or target is None):
        raise config.error(
            "without 'case' the file needs both [initial.N] and [target.N] blocks", SCENARIO_SECTION
        )

    overrides = _read_overrides(config)
    if seed is not None:
        overrides["seed"] = seed
    if case_id is None and "name" not in overrides:
        overrides["name"] = Path(config.path).stem
    try:
        scenario = build_case(case_id or 2, overrides)
        changes = {}
        if initial is not None:
            changes["initial_mixture"] = initial
        if target is not None:
            changes["target_mixture"] = target
        return replace(scenario, **changes) if changes else scenario
    except ValueError as exc:
        raise config.error(str(exc), SCENARIO_SECTION) from None


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    return scenario_from_config(SectionedConfig.load(path), seed=seed)
