from __future__ import annotations

from pathlib import Path

from framework.config_files import ConfigError
from interfaces import ICommand
from plugins.mixtures.divergence import CostKind, surface_grid

from .config_loader import load_scenario
from .engine import nearest_target_indices
from .exporters import write_summary_csv, write_surface_csv, write_trajectory_csv
from .models import GridSpec, RunManifest
from .plotting import responses_figure, save_svg, snapshots_figure, surface_figure
from .scenarios import all_cases, build_case

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


class SimulateCommand(ICommand):
    """Runs a scenario file or built-in case and writes CSV logs and SVG figures."""

    def __init__(self, framework):
        super().__init__(framework)
        self.log = framework.get_service("log_manager")
        self.simulation = framework.get_service("simulation_service")
        self.settings = framework.get_service("settings_service")

    def _scenarios(self, manifest: RunManifest):
        if manifest.scenario_path is not None:
            return [load_scenario(manifest.scenario_path, seed=manifest.seed)]
        overrides = {}
        if manifest.seed is not None:
            overrides["seed"] = manifest.seed
        if self.settings is not None:
            overrides["grad_tol"] = self.settings.get("solver.grad_tol", 1e-6)
            overrides["max_iters"] = self.settings.get("solver.max_iters", 200)
            if manifest.snapshot_steps is None:
                overrides["snapshot_steps"] = tuple(self.settings.get("snapshot_steps", [0, 5, 10, 40]))
        if manifest.case_id == "all":
            return all_cases(overrides)
        if manifest.variant:
            overrides["variant"] = manifest.variant
        return [build_case(int(manifest.case_id), overrides)]

    def execute(self, manifest: RunManifest, **kwargs) -> int:
        try:
            scenarios = self._scenarios(manifest)
        except ConfigError as exc:
            self.log.error(f"Invalid scenario file: {exc}")
            return EXIT_CONFIG
        except ValueError as exc:
            self.log.error(f"Invalid scenario: {exc}")
            return EXIT_CONFIG

        try:
            logs = self.simulation.run_batch(scenarios)
        except (RuntimeError, ValueError) as exc:
            self.log.error(f"Simulation failed: {exc}")
            return EXIT_FAILURE

        nested = len(scenarios) > 1
        try:
            for scenario, log in zip(scenarios, logs):
                out = Path(manifest.output_dir) / scenario.name if nested else Path(manifest.output_dir)
                self._write_outputs(manifest, scenario, log, out)
        except OSError as exc:
            self.log.error(f"Could not write simulation outputs: {exc}")
            return EXIT_FAILURE
        return EXIT_OK

    def _write_outputs(self, manifest: RunManifest, scenario, log, out: Path) -> None:
        targets = scenario.target_mixture
        if manifest.emit_csv:
            convergence = self.simulation.convergence_steps(log, targets)
            write_trajectory_csv(out / "trajectory.csv", log)
            write_summary_csv(out / "summary.csv", log, nearest_target_indices(log, targets), convergence)
        if manifest.emit_svg:
            steps = manifest.snapshot_steps or scenario.snapshot_steps
            save_svg(snapshots_figure(log, targets, steps), out / "snapshots.svg")
            save_svg(responses_figure(log, targets), out / "responses.svg")
        self.log.info(f"Scenario '{scenario.name}' outputs written to {out}")


class SurfaceCommand(ICommand):
    """Sweeps one density of a built-in case over a position grid and writes the cost surface."""

    def __init__(self, framework):
        super().__init__(framework)
        self.log = framework.get_service("log_manager")

    def execute(
        self,
        kind: str,
        case_id: int,
        output_dir: str | Path,
        grid: GridSpec | None = None,
        probe_index: int = 0,
        variant: str | None = None,
        emit_svg: bool = True,
        **kwargs,
    ) -> int:
        try:
            cost_kind = CostKind.parse(kind)
            scenario = build_case(int(case_id), {"variant": variant} if variant else None)
            grid = grid or GridSpec()
            xs, ys = grid.axes()
            values = surface_grid(cost_kind, scenario.initial_mixture, scenario.target_mixture, probe_index, xs, ys)
        except ValueError as exc:
            self.log.error(f"Invalid surface request: {exc}")
            return EXIT_CONFIG

        out = Path(output_dir)
        stem = f"surface_{cost_kind.value}"
        try:
            write_surface_csv(out / f"{stem}.csv", xs, ys, values)
            if emit_svg:
                title = f"{cost_kind.value} cost, {scenario.name}, density {probe_index + 1} swept"
                fig = surface_figure(
                    xs, ys, values, scenario.initial_mixture, scenario.target_mixture, probe_index, title
                )
                save_svg(fig, out / f"{stem}.svg")
        except OSError as exc:
            self.log.error(f"Could not write surface outputs to {out}: {exc}")
            return EXIT_FAILURE
        self.log.info(f"Surface {stem} ({grid.ny}x{grid.nx}) written to {out}")
        return EXIT_OK
