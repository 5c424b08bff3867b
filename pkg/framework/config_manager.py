"""
Configuration Manager for RFS Swarm
Handles cross-platform user directory management and settings storage.
"""
import copy
import json
import logging
import os
import platform
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


def _merge(defaults: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class ConfigManager:
    """Manages application configuration and user directories following OS conventions.

    ``root`` places every directory below one folder instead of the OS
    locations; the test-suite and portable installs use it.
    """

    def __init__(self, root: Optional[Path] = None):
        self.app_name = "RfsSwarm"
        self._config_cache: Dict[str, Any] = {}
        self._setup_directories(Path(root) if root is not None else None)

    def _setup_directories(self, root: Optional[Path]):
        """Setup platform-specific directories for config, data, and cache."""
        system = platform.system().lower()

        if root is not None:
            self.config_dir = root / "config"
            self.user_data_dir = root / "data"
            self.cache_dir = root / "cache"

        elif system == "windows":
            self.config_dir = Path(os.environ.get("APPDATA", "")) / self.app_name
            self.user_data_dir = Path(os.environ.get("USERPROFILE", "")) / "Documents" / self.app_name
            self.cache_dir = Path(os.environ.get("LOCALAPPDATA", "")) / self.app_name

        elif system == "darwin":  # macOS
            home = Path.home()
            self.config_dir = home / "Library" / "Application Support" / self.app_name
            self.user_data_dir = home / "Documents" / self.app_name
            self.cache_dir = home / "Library" / "Caches" / self.app_name

        else:  # Linux/Unix
            home = Path.home()
            self.config_dir = home / ".config" / self.app_name
            self.user_data_dir = home / "Documents" / self.app_name
            self.cache_dir = home / ".cache" / self.app_name

        for directory in [self.config_dir, self.user_data_dir, self.cache_dir]:
            directory.mkdir(parents=True, exist_ok=True)

    @property
    def settings_file(self) -> Path:
        """Path to the main settings file."""
        return self.config_dir / "settings.json"

    @property
    def log_dir(self) -> Path:
        logs = self.cache_dir / "logs"
        logs.mkdir(parents=True, exist_ok=True)
        return logs

    @property
    def output_dir(self) -> Path:
        """Default root for simulation outputs."""
        return self.user_data_dir / "runs"

    def load_settings(self) -> Dict[str, Any]:
        """Load settings from file merged over the defaults."""
        defaults = self._get_default_settings()
        if self.settings_file.exists():
            try:
                with open(self.settings_file, "r", encoding="utf-8") as f:
                    stored = json.load(f)
                if isinstance(stored, dict):
                    return _merge(defaults, stored)
                logger.warning(f"Ignoring settings file {self.settings_file}: not a JSON object")
            except (json.JSONDecodeError, OSError) as e:
                logger.warning(f"Could not load settings: {e}")
        return defaults

    def save_settings(self, settings: Dict[str, Any]):
        """Save settings to file."""
        try:
            with open(self.settings_file, "w", encoding="utf-8") as f:
                json.dump(settings, f, indent=2, ensure_ascii=False)
        except OSError as e:
            logger.error(f"Could not save settings: {e}")

    def _get_default_settings(self) -> Dict[str, Any]:
        """Get default application settings."""
        return {
            "user_data_root": str(self.user_data_dir),
            "output_directory": str(self.output_dir),
            "log_level": "INFO",
            "snapshot_steps": [0, 5, 10, 40],
            "convergence_tolerance": 0.1,
            "solver": {
                "grad_tol": 1e-6,
                "max_iters": 200,
            },
        }

    def get(self, key: str, default: Any = None) -> Any:
        """Get a setting value; dotted keys walk nested sections."""
        if not self._config_cache:
            self._config_cache = self.load_settings()
        node: Any = self._config_cache
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, key: str, value: Any):
        """Set a setting value and persist the file."""
        if not self._config_cache:
            self._config_cache = self.load_settings()
        parts = key.split(".")
        node = self._config_cache
        for part in parts[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[parts[-1]] = value
        self.save_settings(self._config_cache)
