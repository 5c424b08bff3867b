"""Tests for the ConfigManager class."""

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from framework.config_manager import ConfigManager


class TestConfigManagerPaths(unittest.TestCase):
    """Directory layout per platform; directory creation is patched out."""

    def setUp(self):
        patcher = patch("pathlib.Path.mkdir")
        self.mock_mkdir = patcher.start()
        self.addCleanup(patcher.stop)

    @patch('platform.system')
    def test_windows_paths(self, mock_system):
        """Test that Windows paths are set correctly."""
        mock_system.return_value = 'Windows'
        environ = {
            'APPDATA': 'C:\\Users\\Test\\AppData\\Roaming',
            'USERPROFILE': 'C:\\Users\\Test',
            'LOCALAPPDATA': 'C:\\Users\\Test\\AppData\\Local',
        }
        with patch.dict(os.environ, environ):
            config_manager = ConfigManager()

        self.assertEqual(config_manager.config_dir, Path(environ['APPDATA']) / 'RfsSwarm')
        self.assertEqual(config_manager.user_data_dir, Path(environ['USERPROFILE']) / 'Documents' / 'RfsSwarm')
        self.assertEqual(config_manager.cache_dir, Path(environ['LOCALAPPDATA']) / 'RfsSwarm')

    @patch('platform.system')
    def test_macos_paths(self, mock_system):
        """Test that macOS paths are set correctly."""
        mock_system.return_value = 'Darwin'

        with patch('pathlib.Path.home', return_value=Path('/Users/test')):
            config_manager = ConfigManager()

        self.assertEqual(str(config_manager.config_dir), '/Users/test/Library/Application Support/RfsSwarm')
        self.assertEqual(str(config_manager.user_data_dir), '/Users/test/Documents/RfsSwarm')
        self.assertEqual(str(config_manager.cache_dir), '/Users/test/Library/Caches/RfsSwarm')

    @patch('platform.system')
    def test_linux_paths(self, mock_system):
        """Test that Linux paths are set correctly."""
        mock_system.return_value = 'Linux'

        with patch('pathlib.Path.home', return_value=Path('/home/test')):
            config_manager = ConfigManager()

        self.assertEqual(str(config_manager.config_dir), '/home/test/.config/RfsSwarm')
        self.assertEqual(str(config_manager.cache_dir), '/home/test/.cache/RfsSwarm')
        self.assertEqual(self.mock_mkdir.call_count, 3)

    def test_root_overrides_platform(self):
        config_manager = ConfigManager(root=Path('/srv/swarm'))
        self.assertEqual(config_manager.config_dir, Path('/srv/swarm/config'))
        self.assertEqual(config_manager.user_data_dir, Path('/srv/swarm/data'))
        self.assertEqual(config_manager.cache_dir, Path('/srv/swarm/cache'))
        self.assertEqual(config_manager.settings_file, Path('/srv/swarm/config/settings.json'))
        self.assertEqual(config_manager.output_dir, Path('/srv/swarm/data/runs'))


class TestConfigManagerSettings(unittest.TestCase):
    """Settings file handling inside a temporary root."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.root = Path(self._tmp.name)
        self.config_manager = ConfigManager(root=self.root)

    def test_directories_are_created(self):
        for name in ("config", "data", "cache"):
            self.assertTrue((self.root / name).is_dir())

    def test_default_settings(self):
        """Test that default settings are generated correctly."""
        settings = self.config_manager._get_default_settings()

        self.assertEqual(settings['user_data_root'], str(self.root / 'data'))
        self.assertEqual(settings['output_directory'], str(self.root / 'data' / 'runs'))
        self.assertEqual(settings['log_level'], 'INFO')
        self.assertEqual(settings['snapshot_steps'], [0, 5, 10, 40])
        self.assertEqual(settings['convergence_tolerance'], 0.1)
        self.assertEqual(settings['solver'], {'grad_tol': 1e-6, 'max_iters': 200})

    def test_dotted_get(self):
        self.assertEqual(self.config_manager.get('solver.max_iters'), 200)
        self.assertIsNone(self.config_manager.get('solver.unknown'))
        self.assertEqual(self.config_manager.get('log_level.deeper', 'x'), 'x')

    def test_set_persists_and_merges(self):
        self.config_manager.set('solver.grad_tol', 1e-8)
        self.config_manager.set('log_level', 'DEBUG')

        stored = json.loads(self.config_manager.settings_file.read_text(encoding='utf-8'))
        self.assertEqual(stored['solver']['grad_tol'], 1e-8)

        reloaded = ConfigManager(root=self.root)
        self.assertEqual(reloaded.get('solver.grad_tol'), 1e-8)
        self.assertEqual(reloaded.get('solver.max_iters'), 200)
        self.assertEqual(reloaded.get('log_level'), 'DEBUG')

    def test_malformed_settings_fall_back_to_defaults(self):
        self.config_manager.settings_file.write_text('{not json', encoding='utf-8')
        with self.assertLogs('framework.config_manager', level='WARNING'):
            settings = self.config_manager.load_settings()
        self.assertEqual(settings, self.config_manager._get_default_settings())

    def test_non_object_settings_are_ignored(self):
        self.config_manager.settings_file.write_text('[1, 2]', encoding='utf-8')
        with self.assertLogs('framework.config_manager', level='WARNING'):
            settings = self.config_manager.load_settings()
        self.assertEqual(settings['log_level'], 'INFO')


if __name__ == '__main__':
    unittest.main()
