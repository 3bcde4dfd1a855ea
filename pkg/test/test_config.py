# tests/test_config.py

import os
import tempfile
import unittest
from unittest.mock import patch

from shuttleqaoa.config import DEFAULTS, Config, load_experiment, parse_experiment
from shuttleqaoa.errors import ConfigError


class TestEnvironmentConfig(unittest.TestCase):
    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            env = Config()
        self.assertEqual(env.OUTPUT_DIR, "results")
        self.assertEqual(env.WORKERS, 1)
        self.assertEqual(env.LOG_LEVEL, "INFO")
        self.assertEqual(env.validate(), [])

    def test_invalid_values_reported(self):
        with patch.dict(os.environ, {"SHUTTLEQAOA_WORKERS": "0", "SHUTTLEQAOA_LOG_LEVEL": "chatty"}):
            env = Config()
        problems = env.validate()
        self.assertEqual(len(problems), 2)

    def test_unparseable_workers_fall_back(self):
        with patch.dict(os.environ, {"SHUTTLEQAOA_WORKERS": "many"}):
            self.assertEqual(Config().WORKERS, 1)


class TestExperimentFile(unittest.TestCase):
    def test_empty_file_gives_defaults(self):
        exp = parse_experiment("")
        self.assertEqual(exp.data, DEFAULTS)
        self.assertEqual(exp.config_hash(), load_experiment(None).config_hash())

    def test_nested_values_merge(self):
        exp = parse_experiment("noise:\n  p_d: 0.002\nvalley:\n  mean_ueV: 150\n")
        self.assertEqual(exp.data["noise"]["p_d"], 0.002)
        self.assertEqual(exp.data["noise"]["p_phi"], DEFAULTS["noise"]["p_phi"])
        self.assertEqual(exp.data["valley"]["mean_ueV"], 150.0)

    def test_unknown_key_has_line(self):
        with self.assertRaises(ConfigError) as cm:
            parse_experiment("seed: 1\nnoise:\n  p_x: 0.1\n", path="bad.yaml")
        self.assertEqual(cm.exception.problems, ["noise.p_x: unknown key (line 3)"])
        self.assertEqual(cm.exception.path, "bad.yaml")

    def test_all_problems_collected(self):
        with self.assertRaises(ConfigError) as cm:
            parse_experiment("seed: -1\nnoise:\n  p_d: 2.0\narchitecture:\n  kind: ring\n")
        self.assertEqual(len(cm.exception.problems), 3)

    def test_yaml_syntax_error(self):
        with self.assertRaises(ConfigError) as cm:
            parse_experiment("seed: 1\nsweep: [1, 2\n")
        self.assertIn("YAML syntax error", cm.exception.problems[0])
        self.assertIn("line", cm.exception.problems[0])

    def test_top_level_must_be_mapping(self):
        with self.assertRaises(ConfigError):
            parse_experiment("- 1\n- 2\n")

    def test_n_range_order(self):
        with self.assertRaises(ConfigError) as cm:
            parse_experiment("decode_stats:\n  N_min: 8\n  N_max: 5\n")
        self.assertIn("decode_stats.N_max", cm.exception.problems[0])

    def test_velocity_range(self):
        exp = parse_experiment("sweep:\n  velocities: {min_mps: 1, max_mps: 100, points: 3}\n")
        for got, want in zip(exp.data["sweep"]["velocities"], (1.0, 10.0, 100.0)):
            self.assertAlmostEqual(got, want)
        with self.assertRaises(ConfigError):
            parse_experiment("sweep:\n  velocities: {min_mps: 10, max_mps: 1}\n")
        self.assertEqual(len(DEFAULTS["sweep"]["velocities"]), 62)

    def test_t2_overrides_reach_grid(self):
        exp = parse_experiment("sweep:\n  architectures: [spin_bus, modular]\n  T2_us: {modular: 20}\n")
        grid = exp.sweep_grid()
        self.assertEqual(grid.T2_us, (("modular", 20.0),))
        with self.assertRaises(ConfigError):
            parse_experiment("sweep:\n  T2_us: {ring: 20}\n")

    def test_infeasible_valley_moments(self):
        exp = parse_experiment("valley:\n  mean_ueV: 50\n  std_ueV: 30\n")
        with self.assertRaises(ConfigError) as cm:
            exp.run_config()
        self.assertTrue(cm.exception.problems[0].startswith("valley:"))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_experiment("/nonexistent/experiment.yaml")


class TestExperimentConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "exp.yaml")
        with open(self.path, "w", encoding="utf-8") as f:
            f.write("seed: 3\nworkers: 2\nsweep:\n  laws: [linear, gaussian]\n")

    def tearDown(self):
        self.tmp.cleanup()

    def test_load_from_file(self):
        exp = load_experiment(self.path)
        self.assertEqual(exp.seed, 3)
        self.assertEqual(exp.workers(), 2)
        self.assertEqual(exp.path, self.path)

    def test_overrides_collapse_axes(self):
        exp = load_experiment(self.path).with_overrides(velocity=5.0, architecture="modular", law="gaussian")
        grid = exp.sweep_grid()
        self.assertEqual(grid.velocities, (5.0,))
        self.assertEqual(grid.architectures, ("modular",))
        self.assertEqual(grid.laws, ("gaussian",))
        self.assertEqual(exp.run_config().velocity, 5.0)
        self.assertEqual(exp.architecture().kind, "modular")

    def test_hash_ignores_execution_settings(self):
        exp = load_experiment(self.path)
        same = exp.with_overrides(workers=8, output_dir="elsewhere")
        other = exp.with_overrides(seed=4)
        self.assertEqual(exp.config_hash(), same.config_hash())
        self.assertNotEqual(exp.config_hash(), other.config_hash())

    def test_output_dir_and_workers_fall_back_to_env(self):
        with patch.dict(os.environ, {"SHUTTLEQAOA_OUTPUT_DIR": "out", "SHUTTLEQAOA_WORKERS": "4"}):
            env = Config()
        exp = load_experiment(None)
        self.assertEqual(exp.output_dir(env), "out")
        self.assertEqual(exp.workers(env), 4)
        self.assertEqual(exp.workers(), 1)

    def test_builders(self):
        exp = load_experiment(None)
        cfg = exp.run_config()
        self.assertEqual(cfg.arch.kind, "spin_bus")
        self.assertEqual(cfg.coherence.T2_ns, 100_000.0)
        ds = exp.decode_stats()
        self.assertEqual(ds["N_values"], list(range(4, 21)))
        opts = exp.verify_options(1.0)
        self.assertEqual(opts.zz_angle_factor, 1.0)
        self.assertEqual(opts.seed, 0)


if __name__ == "__main__":
    unittest.main()
