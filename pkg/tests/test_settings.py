import sys
import os
sys.path.append(os.getcwd())

import logging
import unittest
from unittest.mock import patch

from src.utils.errors import BlowUpError, ConfigError, InvariantViolation, SolverError
from src.utils.log import configure_logging
from src.utils.settings import load_settings


class TestSettings(unittest.TestCase):
    @patch("src.utils.settings.load_dotenv")
    def test_defaults(self, _load_dotenv):
        with patch.dict(os.environ, {}, clear=True):
            settings = load_settings()
        self.assertEqual(settings.threads, 1)
        self.assertEqual(settings.eigensolver, "jacobi")
        self.assertEqual(settings.max_basis_size, 1_000_000)

    @patch("src.utils.settings.load_dotenv")
    def test_environment_values(self, _load_dotenv):
        env = {"HERMSPDE_THREADS": "4", "HERMSPDE_EIGENSOLVER": "lapack", "HERMSPDE_LOG_LEVEL": " DEBUG "}
        with patch.dict(os.environ, env, clear=True):
            settings = load_settings()
        self.assertEqual((settings.threads, settings.eigensolver, settings.log_level), (4, "lapack", "DEBUG"))

    @patch("src.utils.settings.load_dotenv")
    def test_invalid_values(self, _load_dotenv):
        for env in ({"HERMSPDE_THREADS": "0"}, {"HERMSPDE_EIGENSOLVER": "qr"}, {"HERMSPDE_MAX_BASIS_SIZE": "many"}):
            with patch.dict(os.environ, env, clear=True):
                with self.assertRaises(ConfigError):
                    load_settings()


class TestErrors(unittest.TestCase):
    def test_exit_codes(self):
        self.assertEqual(ConfigError("x").exit_code, 2)
        self.assertEqual(SolverError("x").exit_code, 3)
        self.assertEqual(BlowUpError(3, 0.5).exit_code, 4)
        self.assertEqual(InvariantViolation("x").exit_code, 5)

    def test_builtin_families(self):
        self.assertIsInstance(ConfigError("x"), ValueError)
        self.assertIsInstance(SolverError("x"), RuntimeError)
        self.assertIsInstance(InvariantViolation("x"), AssertionError)

    def test_blow_up_message(self):
        error = BlowUpError(3, 0.5)
        self.assertEqual((error.path, error.time), (3, 0.5))
        self.assertIn("path 3", str(error))


class TestLogging(unittest.TestCase):
    def test_single_handler(self):
        configure_logging("debug")
        configure_logging("WARNING")
        logger = logging.getLogger("src")
        self.assertEqual(len(logger.handlers), 1)
        self.assertEqual(logger.level, logging.WARNING)


if __name__ == '__main__':
    unittest.main()
