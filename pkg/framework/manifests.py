from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List

_KNOWN_KEYS = {
    "uuid",
    "name",
    "type",
    "version",
    "tags",
    "entry_point",
    "dependencies",
    "optional_dependencies",
}


def _normalize_string_list(values) -> List[str]:
    if isinstance(values, str):
        values = [values]
    normalized: List[str] = []
    for value in values or []:
        text = str(value).strip()
        if text:
            normalized.append(text)
    return normalized


@dataclass(slots=True)
class PluginManifest:
    """Contents of one ``plugin.json``."""

    uuid: str
    name: str
    entry_point: str
    type: str = "plugin"
    version: str = ""
    tags: List[str] = field(default_factory=list)
    dependencies: List[str] = field(default_factory=list)
    optional_dependencies: List[str] = field(default_factory=list)
    trust_level: str = "core"
    path: str = ""
    manifest_path: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.name or self.uuid

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        *,
        root_path: str = "",
        manifest_path: str = "",
        trust_level: str = "core",
    ) -> "PluginManifest":
        if not isinstance(data, dict):
            raise ValueError("plugin manifest must be a JSON object")
        uuid = str(data.get("uuid", "")).strip()
        if not uuid:
            raise ValueError("plugin manifest has no uuid")
        return cls(
            uuid=uuid,
            name=str(data.get("name", "")).strip(),
            entry_point=str(data.get("entry_point", "")).strip(),
            type=str(data.get("type", "plugin")),
            version=str(data.get("version", "")),
            tags=_normalize_string_list(data.get("tags", [])),
            dependencies=_normalize_string_list(data.get("dependencies", [])),
            optional_dependencies=_normalize_string_list(data.get("optional_dependencies", [])),
            trust_level=trust_level,
            path=root_path,
            manifest_path=manifest_path,
            metadata={key: value for key, value in data.items() if key not in _KNOWN_KEYS},
        )
