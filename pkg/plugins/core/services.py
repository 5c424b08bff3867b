import json
import os
from pathlib import Path

from framework.config_manager import ConfigManager
from interfaces import ISettingsService


class SettingsService(ISettingsService):
    """Application settings from the user config file, with project-level
    overrides read from ``app_settings.json`` next to ``run_app.py``."""

    def __init__(self, framework, config_manager: ConfigManager | None = None):
        self.framework = framework
        self.log = framework.get_service("log_manager")
        self.config_manager = config_manager or ConfigManager()
        self._project_root = Path(framework.get_project_root())
        self._overrides = self._load_project_overrides()
        self._user_data_root_path = self._resolve_root(self.get("user_data_root"))

    def _load_project_overrides(self) -> dict:
        path = self._project_root / "app_settings.json"
        if not path.exists():
            return {}
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            self.log.warning(f"Ignoring project settings {path}: {exc}")
            return {}
        if not isinstance(data, dict):
            self.log.warning(f"Ignoring project settings {path}: not a JSON object")
            return {}
        self.log.info(f"Loaded project settings overrides from {path}")
        return data

    def _resolve_root(self, value) -> Path:
        if not value:
            return Path(self.config_manager.user_data_dir)
        root = Path(str(value)).expanduser()
        if not root.is_absolute():
            root = self._project_root / root
        return Path(os.path.normpath(str(root)))

    def get(self, key, default=None):
        node = self._overrides
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return self.config_manager.get(key, default)
            node = node[part]
        return node

    def set(self, key, value):
        self.config_manager.set(key, value)
        self._overrides.pop(key, None)
        if key == "user_data_root":
            self._user_data_root_path = self._resolve_root(value)

    def resolve_user_path(self, *parts: str, ensure_exists: bool = True) -> str:
        """Resolve a path relative to the configured user data root."""

        cleaned_parts: list[str] = []
        for part in parts:
            if part is None:
                continue
            text = str(part).strip()
            if not text:
                continue
            cleaned_parts.append(text.replace("\\", os.sep))

        path: Path | None = None
        for raw in cleaned_parts:
            candidate = Path(raw).expanduser()
            if candidate.is_absolute():
                path = candidate
            elif path is None:
                path = self._user_data_root_path / candidate
            else:
                path = path / candidate

        if path is None:
            path = self._user_data_root_path

        path = Path(os.path.normpath(str(path)))

        if ensure_exists:
            last_name = Path(cleaned_parts[-1]).name if cleaned_parts else ""
            is_probably_file = bool(last_name) and "." in last_name and not last_name.startswith(".")
            target_dir = path.parent if is_probably_file else path
            target_dir.mkdir(parents=True, exist_ok=True)

        return str(path)

    def output_directory(self) -> str:
        """Default root for command outputs."""
        return self.resolve_user_path(self.get("output_directory") or "runs")
