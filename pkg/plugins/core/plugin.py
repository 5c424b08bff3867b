from typing import Any

from interfaces import IPlugin

from .commands import SetLogLevelCommand
from .services import SettingsService


class Plugin(IPlugin):
    """Settings and log-level handling shared by every other plugin."""

    def register(self, framework):
        settings_service = SettingsService(framework, framework.get_service("config_manager"))
        framework.register_contribution(
            "services", {"id": "settings_service", "instance": settings_service}
        )
        framework.register_contribution(
            "commands", {"id": "core.set_log_level", "class": SetLogLevelCommand}
        )


def register_plugin(service_registry: Any) -> None:
    """Entry point declared in the plugin manifest."""
    framework = getattr(service_registry, "get", lambda *_: None)("framework")
    if framework is None:
        raise RuntimeError("Framework service not registered in ServiceRegistry.")
    Plugin().register(framework)
