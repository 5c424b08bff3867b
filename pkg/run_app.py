"""Command-line entry point: ``rfs-swarm simulate|surface|phd-demo``."""

import argparse
import sys
from pathlib import Path

from framework import Framework

EXIT_FAILURE = 1
EXIT_USAGE = 2


def _snapshot_steps(text: str) -> tuple[int, ...]:
    try:
        steps = tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"snapshot steps must be comma-separated integers, got {text!r}") from None
    if not steps or any(step < 0 for step in steps):
        raise argparse.ArgumentTypeError(f"snapshot steps must be nonnegative integers, got {text!r}")
    return steps


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be nonnegative, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfs-swarm",
        description="Receding-horizon control of swarms modeled as Gaussian-mixture intensities.",
    )
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (overrides LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run a built-in case or a scenario file")
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument("--case", choices=["1", "2", "3", "4", "all"], help="built-in case, or all five runs")
    source.add_argument("--scenario", type=Path, help="scenario file")
    simulate.add_argument("--variant", choices=["far", "near"], help="case 1 starting grid")
    simulate.add_argument("--out", type=Path, help="output directory")
    simulate.add_argument("--seed", type=_seed, help="replace the scenario's agent sampling seed")
    simulate.add_argument("--snapshots", type=_snapshot_steps, help="plant steps drawn in snapshots.svg, e.g. 0,5,10,40")
    simulate.add_argument("--no-csv", action="store_true", help="skip trajectory.csv and summary.csv")
    simulate.add_argument("--no-svg", action="store_true", help="skip the SVG figures")

    surface = commands.add_parser("surface", help="sweep one density over a grid and write the cost surface")
    surface.add_argument("--kind", default="l2quad", choices=["cs", "l2", "l2quad"], help="cost to evaluate")
    surface.add_argument("--case", type=int, default=2, choices=[1, 2, 3, 4], help="built-in case supplying the mixtures")
    surface.add_argument("--variant", choices=["far", "near"], help="case 1 starting grid")
    surface.add_argument("--x-range", default="-4:4", help="min:max of the x sweep")
    surface.add_argument("--y-range", default="-4:4", help="min:max of the y sweep")
    surface.add_argument("--size", default="81", help="grid points per axis, N or NXxNY")
    surface.add_argument("--probe", type=int, default=0, help="index of the swept density")
    surface.add_argument("--out", type=Path, help="output directory")
    surface.add_argument("--no-svg", action="store_true", help="skip the heatmap")

    phd = commands.add_parser("phd-demo", help="run the GM-PHD filter on synthetic measurements")
    phd.add_argument("--config", type=Path, required=True, help="filter demo config file")
    phd.add_argument("--out", type=Path, help="output directory")
    return parser


def _output_dir(framework: Framework, requested: Path | None, name: str) -> Path:
    if requested is not None:
        return requested
    settings = framework.get_service("settings_service")
    if settings is None:
        return Path.cwd() / name
    return Path(settings.resolve_user_path(settings.output_directory(), name))


def _run(framework: Framework, args: argparse.Namespace) -> int:
    from plugins.simulation.models import GridSpec, RunManifest

    commands = framework.command_manager
    if args.command == "simulate":
        if args.variant and args.case != "1":
            framework.log_manager.error("--variant only applies to --case 1")
            return EXIT_USAGE
        name = args.scenario.stem if args.scenario else ("all" if args.case == "all" else f"case{args.case}")
        manifest = RunManifest(
            output_dir=_output_dir(framework, args.out, name),
            scenario_path=args.scenario,
            case_id=args.case if args.case in (None, "all") else int(args.case),
            variant=args.variant,
            emit_csv=not args.no_csv,
            emit_svg=not args.no_svg,
            seed=args.seed,
            snapshot_steps=args.snapshots,
        )
        command_id, kwargs = "simulation.simulate", {"manifest": manifest}
    elif args.command == "surface":
        try:
            grid = GridSpec.parse(args.x_range, args.y_range, args.size)
        except ValueError as exc:
            framework.log_manager.error(f"Invalid grid: {exc}")
            return EXIT_USAGE
        command_id = "simulation.surface"
        kwargs = {
            "kind": args.kind,
            "case_id": args.case,
            "variant": args.variant,
            "grid": grid,
            "probe_index": args.probe,
            "output_dir": _output_dir(framework, args.out, "surface"),
            "emit_svg": not args.no_svg,
        }
    else:
        command_id = "phd.demo"
        kwargs = {"config_path": args.config, "output_dir": _output_dir(framework, args.out, "phd_demo")}

    if not commands.has(command_id):
        framework.log_manager.error(f"Command '{command_id}' is unavailable; check the plugin load errors above")
        return EXIT_FAILURE
    status = commands.execute(command_id, **kwargs)
    return EXIT_FAILURE if status is None else int(status)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    framework = Framework()
    try:
        framework.initialize()
        if args.log_level and not framework.command_manager.execute("core.set_log_level", level=args.log_level):
            return EXIT_USAGE
        return _run(framework, args)
    except KeyboardInterrupt:
        framework.log_manager.error("Interrupted")
        return EXIT_FAILURE
    finally:
        framework.shutdown()


if __name__ == "__main__":
    sys.exit(main())
