from __future__ import annotations

import time
from typing import Sequence

from interfaces import ISimulationService
from plugins.control.models import TrajectoryLog

from .engine import convergence_step, nearest_target_errors, run_scenario
from .scenarios import Scenario

DEFAULT_CONVERGENCE_TOLERANCE = 0.1


class SimulationService(ISimulationService):
    """Runs scenarios for the commands, alone or as a concurrent batch."""

    def __init__(self, framework):
        super().__init__(framework)
        self.log = framework.get_service("log_manager")
        self.events = framework.get_service("event_manager")
        self.workers = framework.get_service("worker_manager")
        self.settings = framework.get_service("settings_service")

    @property
    def convergence_tolerance(self) -> float:
        if self.settings is None:
            return DEFAULT_CONVERGENCE_TOLERANCE
        return float(self.settings.get("convergence_tolerance", DEFAULT_CONVERGENCE_TOLERANCE))

    def run_scenario(self, scenario: Scenario) -> TrajectoryLog:
        self.log.info(
            f"Running scenario '{scenario.name}': {len(scenario.initial_mixture)} densities, "
            f"{len(scenario.target_mixture)} targets, {scenario.steps} steps, cost {scenario.mpc.cost_kind.value}"
        )
        started = time.perf_counter()
        log = run_scenario(scenario)
        elapsed = time.perf_counter() - started
        unconverged = sum(1 for d in log.diagnostics if not d.converged)
        if unconverged:
            self.log.warning(
                f"Scenario '{scenario.name}': optimizer stopped early in {unconverged} of {len(log.diagnostics)} steps"
            )
        self.log.info(
            f"Scenario '{scenario.name}' finished in {elapsed:.2f}s; "
            f"final errors {[round(float(e), 4) for e in log.final_errors]}"
        )
        if self.events:
            self.events.publish("simulation:completed", scenario=scenario, log=log)
        return log

    def run_batch(self, scenarios: Sequence[Scenario]) -> list[TrajectoryLog]:
        """Logs in input order; the first failing scenario's error is raised."""
        scenarios = list(scenarios)
        if self.workers is None or len(scenarios) < 2:
            return [self.run_scenario(s) for s in scenarios]
        self.log.info(f"Running {len(scenarios)} scenarios on the worker pool")
        return self.workers.map(self.run_scenario, scenarios)

    def nearest_target_errors(self, log: TrajectoryLog, targets):
        return nearest_target_errors(log, targets)

    def convergence_steps(self, log: TrajectoryLog, targets, tolerance: float | None = None):
        return convergence_step(log, targets, self.convergence_tolerance if tolerance is None else tolerance)
