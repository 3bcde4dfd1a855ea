# tests/test_commands.py

import csv
import logging
import os
import tempfile
import unittest

from click.testing import CliRunner

from shuttleqaoa import create_cli
from shuttleqaoa.services.export import load_json
from shuttleqaoa.services.metrics import METRICS

SWEEP_YAML = """\
seed: 2
sweep:
  velocities: [1.0, 10.0]
  means_ueV: [100.0]
  stds_ueV: [20.0]
noise:
  sources: [gate]
"""

DECODE_YAML = """\
decode_stats:
  N_min: 4
  N_max: 6
  epsilons: [0.037]
  x_max_epsilons: [0.0]
"""


class CommandTestCase(unittest.TestCase):
    def setUp(self):
        # keeps create_cli from installing a stream handler on the runner's captured stderr
        self.handler = logging.NullHandler()
        logging.getLogger().addHandler(self.handler)
        METRICS.reset()
        self.tmp = tempfile.TemporaryDirectory()
        self.runner = CliRunner()
        self.cli = create_cli()

    def tearDown(self):
        logging.getLogger().removeHandler(self.handler)
        self.tmp.cleanup()

    def write_config(self, text, name="exp.yaml"):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def invoke(self, *args):
        return self.runner.invoke(self.cli, list(args), catch_exceptions=False)


class TestScheduleDump(CommandTestCase):
    def test_table(self):
        result = self.invoke("schedule-dump", "--blocks", "constraint")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("wall time at 10 m/s", result.output)
        self.assertIn("46.25 µm/v + 2 T_ZZ", result.output)

    def test_json_to_file(self):
        out = os.path.join(self.tmp.name, "modular.json")
        result = self.invoke("schedule-dump", "--architecture", "modular", "--format", "json", "--output", out)
        self.assertEqual(result.exit_code, 0, result.output)
        payload = load_json(out)
        self.assertEqual(payload["architecture"], "modular")
        self.assertEqual(len(payload["totals"]["qubits"]), 8)
        self.assertNotIn("created_at", payload)

    def test_hop_diff(self):
        result = self.invoke("schedule-dump", "--diff")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("8 differing steps", result.output)

    def test_timeline(self):
        result = self.invoke("schedule-dump", "--format", "timeline")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("eo1", result.output)


class TestVerify(CommandTestCase):
    def test_schedule_suite_passes(self):
        result = self.invoke("verify", "--suite", "schedule")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("checks passed", result.output)
        self.assertNotIn("FAIL", result.output)

    def test_injected_zz_error_fails(self):
        out_dir = os.path.join(self.tmp.name, "report")
        result = self.invoke("verify", "--suite", "circuit", "--inject-zz-error", "--output-dir", out_dir)
        self.assertEqual(result.exit_code, 3, result.output)
        self.assertIn("FAIL", result.output)
        report = load_json(os.path.join(out_dir, "verify_report.json"))
        self.assertFalse(report["data"]["passed"])
        self.assertEqual(report["metadata"]["zz_angle_factor"], 1.0)


class TestSweep(CommandTestCase):
    def test_writes_artifacts(self):
        cfg = self.write_config(SWEEP_YAML)
        out_dir = os.path.join(self.tmp.name, "out")
        result = self.invoke("sweep", "--config", cfg, "--output-dir", out_dir)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("2 points", result.output)

        with open(os.path.join(out_dir, "sweep.csv"), encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0][0], "schema_version")
        self.assertEqual(rows[0][-1], "config_hash")
        self.assertEqual(len(rows), 3)

        data = load_json(os.path.join(out_dir, "sweep.json"))
        self.assertEqual(len(data["data"]["points"]), 2)
        self.assertEqual(data["metadata"]["config_hash"], rows[1][-1])
        self.assertEqual(len(data["data"]["optima"]), 1)
        plot = load_json(os.path.join(out_dir, "sweep_plot.json"))
        self.assertEqual(plot["data"][0]["velocity_mps"], [1.0, 10.0])

    def test_single_velocity_override(self):
        cfg = self.write_config(SWEEP_YAML)
        out_dir = os.path.join(self.tmp.name, "single")
        result = self.invoke("sweep", "--config", cfg, "--output-dir", out_dir, "--velocity", "3", "--prefix", "one")
        self.assertEqual(result.exit_code, 0, result.output)
        data = load_json(os.path.join(out_dir, "one.json"))
        self.assertEqual([p["velocity_mps"] for p in data["data"]["points"]], [3.0])


class TestDecodeStats(CommandTestCase):
    def test_without_monte_carlo(self):
        cfg = self.write_config(DECODE_YAML)
        out_dir = os.path.join(self.tmp.name, "ds")
        result = self.invoke("decode-stats", "--config", cfg, "--output-dir", out_dir, "--no-mc")
        self.assertEqual(result.exit_code, 0, result.output)
        for name in ("p_fail_N.csv", "p_fail_2N.csv", "x_max.csv", "decode_stats.json"):
            self.assertTrue(os.path.isfile(os.path.join(out_dir, name)), name)
        self.assertFalse(os.path.exists(os.path.join(out_dir, "mc.csv")))
        data = load_json(os.path.join(out_dir, "decode_stats.json"))["data"]
        self.assertEqual([p["x_max"] for p in data["x_max"]], [1.0, 1.0])
        self.assertEqual([p["N"] for p in data["p_fail"]["N"]], [4, 5, 6])
        self.assertEqual(len(data["n_ok_distributions"]), 4)
        self.assertIn("x_max=1.000", result.output)

    def test_single_size_rejected(self):
        cfg = self.write_config("decode_stats:\n  N_min: 5\n  N_max: 5\n")
        result = self.invoke("decode-stats", "--config", cfg, "--output-dir", self.tmp.name, "--no-mc")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("N_max must exceed N_min", result.output)


class TestErrors(CommandTestCase):
    def test_bad_config_exits_one(self):
        cfg = self.write_config("noise:\n  p_x: 0.1\n")
        result = self.invoke("sweep", "--config", cfg)
        self.assertEqual(result.exit_code, 1)
        self.assertIn("noise.p_x: unknown key (line 2)", result.output)
        self.assertIn("in %s" % cfg, result.output)

    def test_missing_config(self):
        result = self.invoke("schedule-dump", "--config", os.path.join(self.tmp.name, "nope.yaml"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("file not found", result.output)


if __name__ == "__main__":
    unittest.main()
