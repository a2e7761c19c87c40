import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from pinnedbeam.config import WORKERS_ENV, RunConfig, worker_count
from pinnedbeam.errors import ConfigError


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        """Test the built-in default configuration."""
        config = RunConfig()
        self.assertEqual(config.solver.omega, 2.5)
        self.assertEqual(config.solver.N0, 4)
        self.assertEqual(config.coefficients.n_x, 512)
        self.assertEqual(config.sieve.gamma_ladder, (0.04, 0.02, 0.01))
        self.assertEqual(config.output.directory, "reports")

    def test_from_mapping(self):
        """Test building a configuration from nested mappings."""
        config = RunConfig.from_mapping(
            {"solver": {"omega": 2.37, "epsilon": 0.0}, "sieve": {"omega_range": [2, 3]}}
        )
        self.assertEqual(config.solver.omega, 2.37)
        self.assertEqual(config.solver.epsilon, 0.0)
        self.assertEqual(config.sieve.omega_range, (2.0, 3.0))

    def test_unknown_section(self):
        """Test that unknown sections are rejected."""
        with self.assertRaises(ConfigError):
            RunConfig.from_mapping({"solvr": {}})

    def test_unknown_key(self):
        """Test that unknown keys are rejected."""
        with self.assertRaises(ConfigError):
            RunConfig.from_mapping({"solver": {"omgea": 2.5}})

    def test_section_must_be_table(self):
        """Test that a scalar section is rejected."""
        with self.assertRaises(ConfigError):
            RunConfig.from_mapping({"solver": 3})

    def test_invalid_names(self):
        """Test that unresolvable built-in names are rejected."""
        for mapping in (
            {"coefficients": {"generator": "cosine"}},
            {"forcing": {"model": "quintic"}},
            {"forcing": {"g": "square"}},
            {"solver": {"inversion": "gmres"}},
            {"solver": {"stage_policy": "ignore"}},
        ):
            with self.subTest(mapping=mapping), self.assertRaises(ConfigError):
                RunConfig.from_mapping(mapping)

    def test_invalid_ranges(self):
        """Test value range validation."""
        for mapping in (
            {"solver": {"tau": 2.0}},
            {"solver": {"tau": 1.0}},
            {"solver": {"gamma": 0.0}},
            {"solver": {"N0": 1}},
            {"solver": {"J": 65}},
            {"solver": {"epsilon": -1e-3}},
            {"coefficients": {"n_x": 32}},
            {"sieve": {"omega_range": [3, 2]}},
            {"sieve": {"gamma_ladder": [0.02, 1.5]}},
            {"sieve": {"smallness": 0.0}},
        ):
            with self.subTest(mapping=mapping), self.assertRaises(ConfigError):
                RunConfig.from_mapping(mapping)

    def test_samples_requires_path(self):
        """Test that the samples generator needs a samples file."""
        with self.assertRaises(ConfigError):
            RunConfig.from_mapping({"coefficients": {"generator": "samples"}})

    def test_with_overrides(self):
        """Test section overrides and that None leaves keys alone."""
        config = RunConfig().with_overrides("solver", omega=2.37, gamma=None)
        self.assertEqual(config.solver.omega, 2.37)
        self.assertEqual(config.solver.gamma, 0.01)
        with self.assertRaises(ConfigError):
            config.with_overrides("nowhere", omega=1.0)
        with self.assertRaises(ConfigError):
            config.with_overrides("solver", tau=3.0)

    def test_to_mapping_round_trip(self):
        """Test that the plain mapping rebuilds an equal configuration."""
        config = RunConfig().with_overrides("coefficients", generator="sine_pair", amplitude=0.1)
        mapping = config.to_mapping()
        self.assertNotIn("n_modes", mapping["coefficients"])
        self.assertIsInstance(mapping["sieve"]["gamma_ladder"], list)
        self.assertEqual(RunConfig.from_mapping(mapping), config)

    def test_digest(self):
        """Test that the digest tracks content only."""
        self.assertEqual(RunConfig().digest, RunConfig().digest)
        self.assertEqual(len(RunConfig().digest), 64)
        self.assertNotEqual(
            RunConfig().digest, RunConfig().with_overrides("solver", omega=2.37).digest
        )

    def test_from_toml(self):
        """Test loading a TOML file."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.toml"
            path.write_text(
                '[coefficients]\ngenerator = "sine_pair"\namplitude = 0.05\n\n'
                "[solver]\nomega = 2.37\nJ = 8\n"
            )
            config = RunConfig.from_toml(path)
        self.assertEqual(config.coefficients.generator, "sine_pair")
        self.assertEqual(config.solver.J, 8)

    def test_from_toml_errors(self):
        """Test that unreadable or malformed files raise ConfigError."""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ConfigError):
                RunConfig.from_toml(Path(tmp) / "missing.toml")
            broken = Path(tmp) / "broken.toml"
            broken.write_text("[solver\nomega = ")
            with self.assertRaises(ConfigError):
                RunConfig.from_toml(broken)


class TestWorkerCount(unittest.TestCase):
    def test_default(self):
        """Test the fallback when the variable is unset."""
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(worker_count(3), 3)

    def test_from_environment(self):
        """Test reading the worker count from the environment."""
        with mock.patch.dict(os.environ, {WORKERS_ENV: "4"}):
            self.assertEqual(worker_count(), 4)

    def test_invalid(self):
        """Test that malformed values raise ConfigError."""
        for raw in ("four", "0"):
            with self.subTest(raw=raw), mock.patch.dict(os.environ, {WORKERS_ENV: raw}):
                with self.assertRaises(ConfigError):
                    worker_count()


if __name__ == "__main__":
    unittest.main()
