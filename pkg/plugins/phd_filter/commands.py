from __future__ import annotations

from pathlib import Path

from framework.atomic_files import write_csv_atomic
from framework.config_files import ConfigError
from interfaces import ICommand

from .demo import load_phd_demo_config, run_phd_demo

CARDINALITY_HEADER = ("step", "cardinality", "targets", "measurements", "components")
ESTIMATES_HEADER = ("step", "index", "x", "y", "vx", "vy")


class PhdDemoCommand(ICommand):
    """Runs the synthetic filter demo from a config file and writes its CSVs.

    Returns a process exit status: 0 on success, 1 when the run fails and
    2 when the config file is malformed.
    """

    def __init__(self, framework):
        super().__init__(framework)
        self.log = framework.get_service("log_manager")
        self.events = framework.get_service("event_manager")

    def execute(self, config_path: str, output_dir: str, **kwargs) -> int:
        try:
            config = load_phd_demo_config(config_path)
        except ConfigError as exc:
            self.log.error(f"Invalid filter demo config: {exc}")
            return 2

        self.log.info(f"Running filter demo for {config.steps} scans (seed {config.seed})")
        try:
            result = run_phd_demo(config)
        except (RuntimeError, ValueError) as exc:
            self.log.error(f"Filter demo failed: {exc}")
            return 1

        out = Path(output_dir)
        try:
            write_csv_atomic(
                out / "phd_cardinality.csv",
                CARDINALITY_HEADER,
                zip(
                    range(len(result.cardinality)),
                    result.cardinality,
                    result.truth_counts,
                    result.measurement_counts,
                    result.component_counts,
                ),
            )
            write_csv_atomic(
                out / "phd_estimates.csv",
                ESTIMATES_HEADER,
                (
                    (step, index, *state)
                    for step, states in enumerate(result.estimates)
                    for index, state in enumerate(states)
                ),
            )
        except OSError as exc:
            self.log.error(f"Could not write filter demo outputs to {out}: {exc}")
            return 1

        final = result.cardinality[-1] if result.cardinality else 0.0
        self.log.info(f"Filter demo finished; final expected count {final:.3f}. Outputs in {out}")
        if self.events:
            self.events.publish("phd_demo:completed", output_dir=str(out), result=result)
        return 0
