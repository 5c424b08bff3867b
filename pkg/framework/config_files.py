"""Sectioned key/value files used for scenario and filter-demo settings.

Values are read through typed getters that raise :class:`ConfigError` with
the 1-based line number of the offending entry.
"""

from __future__ import annotations

import configparser
import re
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

_SECTION_RE = re.compile(r"^\s*\[(?P<name>[^\]]+)\]\s*$")
_KEY_RE = re.compile(r"^\s*(?P<key>[^=:#;\s][^=:]*?)\s*[=:]")

_REQUIRED = object()
REQUIRED = _REQUIRED


class ConfigError(ValueError):
    """A configuration file could not be read or holds an invalid value."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        location = path or "<config>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")


class SectionedConfig:
    """Parsed file with line-aware typed access."""

    def __init__(self, parser: configparser.ConfigParser, lines: Sequence[str], path: str):
        self._parser = parser
        self._lines = list(lines)
        self.path = path
        self._index = self._index_lines(self._lines)

    @classmethod
    def from_text(cls, text: str, path: str = "<config>") -> "SectionedConfig":
        parser = configparser.ConfigParser(
            interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__defaults__"
        )
        parser.optionxform = str.lower
        try:
            parser.read_string(text, source=path)
        except configparser.MissingSectionHeaderError as exc:
            raise ConfigError("entries must follow a [section] header", path=path, line=exc.lineno) from exc
        except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
            raise ConfigError(exc.message.split(": ", 1)[-1], path=path, line=exc.lineno) from exc
        except configparser.ParsingError as exc:
            line = exc.errors[0][0] if exc.errors else None
            raise ConfigError("malformed line", path=path, line=line) from exc
        except configparser.Error as exc:
            raise ConfigError(str(exc), path=path) from exc
        return cls(parser, text.splitlines(), path)

    @classmethod
    def load(cls, path: str | Path) -> "SectionedConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read file: {exc.strerror or exc}", path=str(path)) from exc
        return cls.from_text(text, str(path))

    @staticmethod
    def _index_lines(lines: Sequence[str]) -> dict[tuple[str, str | None], int]:
        index: dict[tuple[str, str | None], int] = {}
        section = None
        for number, raw in enumerate(lines, start=1):
            match = _SECTION_RE.match(raw)
            if match:
                section = match.group("name").strip()
                index.setdefault((section, None), number)
                continue
            if section is None:
                continue
            match = _KEY_RE.match(raw)
            if match:
                index.setdefault((section, match.group("key").strip().lower()), number)
        return index

    def line_of(self, section: str, key: str | None = None) -> int | None:
        return self._index.get((section, key.lower() if key else None)) or self._index.get((section, None))

    def error(self, message: str, section: str, key: str | None = None) -> ConfigError:
        return ConfigError(message, path=self.path, line=self.line_of(section, key))

    # --- structure ---------------------------------------------------------

    def sections(self) -> list[str]:
        return self._parser.sections()

    def has_section(self, section: str) -> bool:
        return self._parser.has_section(section)

    def keys(self, section: str) -> list[str]:
        return list(self._parser[section].keys()) if self.has_section(section) else []

    def numbered_sections(self, prefix: str) -> list[str]:
        """Sections named ``prefix.N`` ordered by N."""
        found = []
        for name in self.sections():
            head, dot, tail = name.partition(".")
            if head != prefix or not dot:
                continue
            if not tail.strip().isdigit():
                raise self.error(f"section '{name}' must be numbered like '{prefix}.1'", name)
            found.append((int(tail), name))
        return [name for _, name in sorted(found)]

    def require_known_keys(self, section: str, allowed: Iterable[str]) -> None:
        allowed = set(allowed)
        for key in self.keys(section):
            if key not in allowed:
                raise self.error(f"unknown key '{key}' in [{section}]", section, key)

    # --- typed getters -----------------------------------------------------

    def _raw(self, section: str, key: str, default: Any) -> Any:
        if self.has_section(section) and self._parser.has_option(section, key):
            return self._parser.get(section, key).strip()
        if default is _REQUIRED:
            raise self.error(f"missing required key '{key}' in [{section}]", section)
        return default

    def get_str(self, section: str, key: str, default: Any = None) -> Any:
        return self._raw(section, key, default)

    def get_float(self, section: str, key: str, default: Any = None, *, minimum: float | None = None,
                  exclusive_minimum: bool = False) -> Any:
        raw = self._raw(section, key, default)
        if not isinstance(raw, str):
            return raw
        try:
            value = float(raw)
        except ValueError:
            raise self.error(f"'{key}' must be a number, got '{raw}'", section, key) from None
        if not np.isfinite(value):
            raise self.error(f"'{key}' must be finite, got '{raw}'", section, key)
        if minimum is not None and (value < minimum or (exclusive_minimum and value == minimum)):
            bound = ">" if exclusive_minimum else ">="
            raise self.error(f"'{key}' must be {bound} {minimum:g}, got {value:g}", section, key)
        return value

    def get_int(self, section: str, key: str, default: Any = None, *, minimum: int | None = None) -> Any:
        raw = self._raw(section, key, default)
        if not isinstance(raw, str):
            return raw
        try:
            value = int(raw)
        except ValueError:
            raise self.error(f"'{key}' must be an integer, got '{raw}'", section, key) from None
        if minimum is not None and value < minimum:
            raise self.error(f"'{key}' must be >= {minimum}, got {value}", section, key)
        return value

    def get_bool(self, section: str, key: str, default: Any = None) -> Any:
        raw = self._raw(section, key, default)
        if not isinstance(raw, str):
            return raw
        lowered = raw.lower()
        if lowered in {"1", "true", "yes", "on"}:
            return True
        if lowered in {"0", "false", "no", "off"}:
            return False
        raise self.error(f"'{key}' must be true or false, got '{raw}'", section, key)

    def get_vector(self, section: str, key: str, default: Any = None, *, length: int | None = None) -> Any:
        """Comma- or whitespace-separated numbers."""
        raw = self._raw(section, key, default)
        if not isinstance(raw, str):
            return raw
        parts = [part for part in re.split(r"[,\s]+", raw.strip("()[] ")) if part]
        try:
            values = np.array([float(part) for part in parts])
        except ValueError:
            raise self.error(f"'{key}' must be a list of numbers, got '{raw}'", section, key) from None
        if not np.all(np.isfinite(values)):
            raise self.error(f"'{key}' must contain finite numbers, got '{raw}'", section, key)
        if length is not None and values.size != length:
            raise self.error(f"'{key}' needs {length} values, got {values.size}", section, key)
        return values

