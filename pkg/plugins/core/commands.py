from __future__ import annotations

from interfaces import ICommand


class SetLogLevelCommand(ICommand):
    """Changes the console and file log level for the rest of the run."""

    def __init__(self, framework):
        super().__init__(framework)
        self.log = framework.get_service("log_manager")
        self.settings_service = framework.get_service("settings_service")

    def execute(self, level: str | None = None, persist: bool = False, **kwargs) -> bool:
        if not level and self.settings_service:
            level = self.settings_service.get("log_level", "INFO")
        if not level or not self.log.set_level(level):
            return False
        if persist and self.settings_service:
            self.settings_service.set("log_level", level.upper())
        return True
