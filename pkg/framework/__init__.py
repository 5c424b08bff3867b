import importlib
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .config_manager import ConfigManager
from .manifest_scanner import ManifestScanner


# --- Kernel services ---

class LogManager:
    """Handles logging for the kernel, the plugins and the command line."""

    def __init__(self, config_manager: Optional[ConfigManager] = None):
        self._setup_logging(config_manager)

    def _setup_logging(self, config_manager):
        """Setup logging with a file handler under the cache directory and console output."""
        log_level = os.environ.get("LOG_LEVEL", "INFO").upper()

        try:
            config_manager = config_manager or ConfigManager()
            log_file = config_manager.log_dir / "rfs_swarm.log"
        except OSError:
            log_file = Path("rfs_swarm.log")

        # one file and one console handler per process, however many kernels start
        root = logging.getLogger()
        for existing in list(root.handlers):
            root.removeHandler(existing)
            existing.close()

        logging.basicConfig(
            level=getattr(logging, log_level, logging.INFO),
            format="%(asctime)s - [%(levelname)s] %(name)s: %(message)s",
            handlers=[
                logging.FileHandler(log_file, encoding="utf-8"),
                logging.StreamHandler(),
            ],
        )

        self.log_file = log_file
        self.logger = logging.getLogger("RfsSwarm")
        self.logger.debug(f"Logging initialized. Level: {log_level}, File: {log_file}")

    def info(self, msg, *args, **kwargs):
        self.logger.info(msg, *args, **kwargs)

    def warning(self, msg, *args, **kwargs):
        self.logger.warning(msg, *args, **kwargs)

    def error(self, msg, *args, **kwargs):
        self.logger.error(msg, *args, **kwargs)

    def debug(self, msg, *args, **kwargs):
        self.logger.debug(msg, *args, **kwargs)

    def set_level(self, level_name):
        """Apply ``level_name`` to the root logger and its handlers; False if the name is unknown."""
        level = logging.getLevelName(str(level_name).upper())
        if not isinstance(level, int):
            self.error(f"Unknown log level '{level_name}'; use DEBUG, INFO, WARNING or ERROR")
            return False

        root = logging.getLogger()
        root.setLevel(level)
        for attached in root.handlers:
            attached.setLevel(level)
        self.debug(f"Log level set to {str(level_name).upper()}")
        return True


class EventManager:
    """Named events such as run completions; subscribers receive keyword payloads."""

    def __init__(self, log_manager):
        self.log = log_manager
        self.subscribers = {}

    def subscribe(self, event_name, callback):
        self.subscribers.setdefault(event_name, []).append(callback)

    def publish(self, event_name, **kwargs):
        self.log.debug(f"Event published: '{event_name}' with keys: {sorted(kwargs)}")
        for callback in self.subscribers.get(event_name, []):
            try:
                callback(**kwargs)
            except Exception as e:
                self.log.error(f"Error in event callback for '{event_name}': {e}", exc_info=True)


class ServiceManager:
    """Kernel and plugin services by id."""

    def __init__(self, log_manager):
        self.log = log_manager
        self._services = {}

    def register(self, service_id, instance):
        self.log.debug(f"Registering service: '{service_id}'")
        self._services[service_id] = instance

    def get(self, service_id):
        return self._services.get(service_id)

    def all(self) -> dict:
        return dict(self._services)


class CommandManager:
    """Command classes by id; every execution builds a fresh instance."""

    def __init__(self, framework):
        self.framework = framework
        self.log = framework.get_service("log_manager")
        self._commands = {}

    def register(self, command_id, command_class):
        self.log.debug(f"Registering command: '{command_id}'")
        self._commands[command_id] = command_class

    def has(self, command_id) -> bool:
        return command_id in self._commands

    def execute(self, command_id, **kwargs):
        self.log.debug(f"Executing command: '{command_id}' with args: {sorted(kwargs)}")
        command_class = self._commands.get(command_id)
        if command_class is None:
            self.log.error(f"Unknown command '{command_id}'")
            return None
        return command_class(self.framework).execute(**kwargs)


class WorkerManager:
    """Thread pool for running scenario batches and other background tasks."""

    def __init__(self, log_manager, max_workers: Optional[int] = None):
        self.log = log_manager
        self.max_workers = max_workers or min(8, os.cpu_count() or 1)
        self._executor: Optional[ThreadPoolExecutor] = None
        self.log.debug(f"WorkerManager configured for {self.max_workers} threads.")

    @property
    def executor(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix="rfs-worker")
        return self._executor

    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> list:
        """Run ``fn`` over ``items`` concurrently; results keep the input order.

        The first failing item (in input order) re-raises its exception
        after every task has finished.
        """
        futures = [self.executor.submit(fn, item) for item in items]
        errors = [future.exception() for future in futures]
        for error in errors:
            if error is not None:
                raise error
        return [future.result() for future in futures]

    def shutdown(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


class PluginManager:
    """Imports plugin entry points in dependency order from the scanned manifests."""

    def __init__(self, framework, scanner: ManifestScanner):
        self.framework = framework
        self.scanner = scanner
        self.log = framework.get_service("log_manager")
        self.loaded_plugins: list[str] = []

    def load_plugins(self) -> None:
        manifests = self.scanner.plugin_manifests
        if not manifests:
            self.log.warning("No plugin.json manifests found; no commands will be available.")
            return

        load_order = self._resolve_load_order(manifests)
        if not load_order:
            self.log.warning("Every plugin manifest failed dependency checks; nothing to load.")
            return

        self.log.debug(f"Loading plugins in order: {[manifests[uuid].label for uuid in load_order]}")
        for plugin_uuid in load_order:
            self._load_plugin(manifests[plugin_uuid])

    @staticmethod
    def _resolve_reference(raw_dep: str, manifests, name_index):
        dep = raw_dep.strip()
        if dep in manifests:
            return "ok", dep
        candidates = sorted(name_index.get(dep.lower(), set()))
        if len(candidates) == 1:
            return "ok", candidates[0]
        if candidates:
            return "ambiguous", [manifests[c].label for c in candidates]
        return "missing", dep

    def _resolve_load_order(self, manifests) -> list[str]:
        name_index: dict[str, set[str]] = {}
        for uuid, manifest in manifests.items():
            key = manifest.name.strip().lower()
            if key:
                name_index.setdefault(key, set()).add(uuid)

        graph: dict[str, set[str]] = {}
        for uuid, manifest in sorted(manifests.items(), key=lambda item: (item[1].name, item[0])):
            required, missing, ambiguous = set(), [], {}
            for raw_dep in manifest.dependencies:
                status, value = self._resolve_reference(raw_dep, manifests, name_index)
                if status == "ok":
                    required.add(value)
                elif status == "ambiguous":
                    ambiguous[raw_dep] = value
                else:
                    missing.append(value)

            if ambiguous:
                for dep, options in ambiguous.items():
                    self.log.error(f"Plugin '{manifest.label}' has ambiguous dependency '{dep}': {options}. Skipping.")
                continue
            if missing:
                self.log.error(f"Plugin '{manifest.label}' is missing dependencies: {missing}. Skipping.")
                continue

            for raw_dep in manifest.optional_dependencies:
                status, value = self._resolve_reference(raw_dep, manifests, name_index)
                if status == "ok":
                    required.add(value)
                elif status == "ambiguous":
                    self.log.warning(
                        f"Plugin '{manifest.label}' has ambiguous optional dependency '{raw_dep}': {value}. Ignoring."
                    )
            graph[uuid] = required

        # a plugin whose required dependency was itself skipped cannot load either
        changed = True
        while changed:
            changed = False
            for uuid in list(graph):
                lost = [dep for dep in manifests[uuid].dependencies
                        if self._resolve_reference(dep, manifests, name_index)[1] not in graph]
                if lost:
                    self.log.error(f"Plugin '{manifests[uuid].label}' depends on skipped plugins {lost}. Skipping.")
                    graph.pop(uuid)
                    changed = True
        for deps in graph.values():
            deps.intersection_update(graph)

        try:
            order = list(TopologicalSorter(graph).static_order())
        except CycleError as err:
            cycle_nodes = list(err.args[1]) if len(err.args) > 1 else []
            self.log.error(f"Detected circular plugin dependencies: {cycle_nodes}. Skipping the cycle.")
            for node in cycle_nodes:
                graph.pop(node, None)
            for deps in graph.values():
                deps.difference_update(cycle_nodes)
            order = list(TopologicalSorter(graph).static_order()) if graph else []

        return [uuid for uuid in order if uuid in graph]

    def _load_plugin(self, manifest) -> None:
        module_name, sep, attribute = manifest.entry_point.partition(":")
        if not sep:
            self.log.error(f"Invalid entry point '{manifest.entry_point}' for plugin {manifest.label}.")
            return

        try:
            module = importlib.import_module(module_name)
        except Exception as exc:  # noqa: BLE001
            self.log.error(
                f"Failed to import module '{module_name}' for plugin {manifest.label}: {exc}",
                exc_info=True,
            )
            return

        entry_callable = getattr(module, attribute, None)
        if entry_callable is None:
            self.log.error(
                f"Entry point '{attribute}' not found in module '{module_name}' for plugin {manifest.label}."
            )
            return

        self.framework._push_plugin_context(manifest.uuid)
        try:
            entry_callable(self.framework.service_manager)
        except Exception as exc:  # noqa: BLE001
            self.log.error(
                f"Error while executing entry point for plugin {manifest.label}: {exc}",
                exc_info=True,
            )
            return
        finally:
            self.framework._pop_plugin_context()

        self.loaded_plugins.append(manifest.uuid)
        self.log.debug(f"Loaded plugin '{manifest.label}' ({manifest.uuid}).")


class Framework:
    """The central class that initializes and holds all core services."""

    def __init__(self, config_manager: Optional[ConfigManager] = None):
        self.config_manager = config_manager or ConfigManager()
        self.log_manager = LogManager(self.config_manager)
        self.event_manager = EventManager(self.log_manager)
        self.service_manager = ServiceManager(self.log_manager)
        self.worker_manager = WorkerManager(self.log_manager)

        self.service_manager.register("log_manager", self.log_manager)
        self.service_manager.register("event_manager", self.event_manager)
        self.service_manager.register("service_manager", self.service_manager)
        self.service_manager.register("worker_manager", self.worker_manager)
        self.service_manager.register("config_manager", self.config_manager)
        self.service_manager.register("framework", self)

        self.manifest_scanner = ManifestScanner(self.log_manager)
        self.command_manager = CommandManager(self)
        self.project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        self.plugin_manager = PluginManager(self, self.manifest_scanner)
        self.service_manager.register("command_manager", self.command_manager)

        self.contributions = {}
        self._plugin_context: list[str] = []
        self.initialized = False

    def get_service(self, service_id):
        return self.service_manager.get(service_id)

    def get_active_plugin_uuid(self) -> Optional[str]:
        return self._plugin_context[-1] if self._plugin_context else None

    def _push_plugin_context(self, plugin_uuid: str) -> None:
        if plugin_uuid:
            self._plugin_context.append(plugin_uuid)

    def _pop_plugin_context(self) -> None:
        if self._plugin_context:
            self._plugin_context.pop()

    def get_project_root(self):
        return self.project_root

    def register_contribution(self, point, data):
        """Registers a contribution from a plugin."""
        payload = dict(data) if isinstance(data, dict) else {"value": data}
        if not payload.get("plugin_uuid"):
            active_uuid = self.get_active_plugin_uuid()
            if active_uuid:
                payload["plugin_uuid"] = active_uuid

        self.contributions.setdefault(point, []).append(payload)
        self.log_manager.debug(f"Contribution registered to '{point}': {payload.get('id', 'N/A')}")

        if point == "services":
            self.service_manager.register(payload["id"], payload["instance"])
        elif point == "commands" and self.initialized:
            self.command_manager.register(payload["id"], payload["class"])

    def get_contributions(self, point):
        return self.contributions.get(point, [])

    def initialize(self, plugin_dirs: Optional[list[tuple[str, str]]] = None):
        """Discovers and loads plugins, then registers their commands."""
        if self.project_root not in sys.path:
            sys.path.insert(0, self.project_root)

        if plugin_dirs is None:
            plugins_path = os.path.join(self.project_root, "plugins")
            plugin_dirs = [(plugins_path, "core")]
            user_plugins_dir = os.path.join(plugins_path, "user")
            if os.path.isdir(user_plugins_dir):
                plugin_dirs.append((user_plugins_dir, "user"))

        self.manifest_scanner.discover(plugin_dirs)
        self.plugin_manager.load_plugins()

        for contrib in self.get_contributions("commands"):
            self.command_manager.register(contrib["id"], contrib["class"])

        for service in self.service_manager.all().values():
            initialize = getattr(service, "initialize", None)
            if service is not self and callable(initialize):
                initialize()

        self.initialized = True
        self.event_manager.publish("framework:ready", framework=self)

    def shutdown(self):
        for service_id, service in self.service_manager.all().items():
            if service is self:
                continue
            stop = getattr(service, "shutdown", None)
            if callable(stop):
                try:
                    stop()
                except Exception as exc:  # noqa: BLE001
                    self.log_manager.error(f"Error shutting down service '{service_id}': {exc}", exc_info=True)
