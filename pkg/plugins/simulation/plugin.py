from typing import Any

from interfaces import IPlugin

from .commands import SimulateCommand, SurfaceCommand
from .services import SimulationService


class Plugin(IPlugin):
    """Scenario runs, cost surfaces and their CSV/SVG outputs."""

    def register(self, framework):
        framework.register_contribution(
            "services", {"id": "simulation_service", "instance": SimulationService(framework)}
        )
        framework.register_contribution(
            "commands", {"id": "simulation.simulate", "class": SimulateCommand}
        )
        framework.register_contribution(
            "commands", {"id": "simulation.surface", "class": SurfaceCommand}
        )


def register_plugin(service_registry: Any) -> None:
    """Entry point declared in the plugin manifest."""
    framework = getattr(service_registry, "get", lambda *_: None)("framework")
    if framework is None:
        raise RuntimeError("Framework service not registered in ServiceRegistry.")
    Plugin().register(framework)
