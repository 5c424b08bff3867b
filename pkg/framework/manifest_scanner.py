from __future__ import annotations

import json
import os
from typing import Dict, Iterable, List, Tuple

from .manifests import PluginManifest


class ManifestScanner:
    """Finds ``plugin.json`` files below the plugin directories."""

    def __init__(self, log_manager):
        self.log = log_manager
        self._plugin_manifests: Dict[str, PluginManifest] = {}
        self._errors: List[str] = []

    @property
    def plugin_manifests(self) -> Dict[str, PluginManifest]:
        return dict(self._plugin_manifests)

    @property
    def errors(self) -> List[str]:
        return list(self._errors)

    def discover(self, plugin_dirs: Iterable[Tuple[str, str]]) -> None:
        """Scan ``(base_path, trust_level)`` pairs, replacing earlier results."""
        self._plugin_manifests.clear()
        self._errors.clear()
        for base_path, trust_level in plugin_dirs:
            self._scan(base_path, trust_level)

    def _report(self, msg: str) -> None:
        self.log.error(msg)
        self._errors.append(msg)

    def _scan(self, base_path: str, trust_level: str) -> None:
        if not os.path.isdir(base_path):
            self.log.info(f"Plugin directory not found, skipping: {base_path}")
            return

        for root, dirs, files in os.walk(base_path):
            if trust_level != "user" and "user" in dirs:
                dirs.remove("user")
            if "__pycache__" in dirs:
                dirs.remove("__pycache__")
            dirs.sort()
            if "plugin.json" not in files:
                continue

            manifest_path = os.path.join(root, "plugin.json")
            try:
                with open(manifest_path, "r", encoding="utf-8") as handle:
                    data = json.load(handle)
                manifest = PluginManifest.from_dict(
                    data,
                    root_path=root,
                    manifest_path=manifest_path,
                    trust_level=trust_level,
                )
            except (OSError, ValueError) as exc:
                self._report(f"Failed to load plugin manifest at {manifest_path}: {exc}")
                continue

            if not manifest.entry_point:
                self._report(f"Plugin manifest missing entry_point: {manifest_path}")
                continue

            if manifest.uuid in self._plugin_manifests:
                self._report(f"Duplicate plugin UUID detected: {manifest.uuid} ({manifest_path})")
                continue

            self._plugin_manifests[manifest.uuid] = manifest
            dirs[:] = []
