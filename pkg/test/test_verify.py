# tests/test_verify.py

import unittest

from shuttleqaoa.errors import VerificationError
from shuttleqaoa.services.metrics import METRICS
from shuttleqaoa.services.verify import CheckResult, VerificationReport, VerifyOptions, run_verification


class TestSuites(unittest.TestCase):
    def setUp(self):
        METRICS.reset()

    def test_circuit_suite(self):
        report = run_verification(VerifyOptions(suites=("circuit",)))
        self.assertTrue(report.passed, report.table())
        self.assertEqual(METRICS.get("verify.fail"), 0)

    def test_wrong_zz_factor_caught(self):
        with self.assertLogs("shuttleqaoa.services.verify", level="WARNING"):
            report = run_verification(VerifyOptions(suites=("circuit",), zz_angle_factor=1.0))
        failed = report.failed()
        self.assertIn("circuit/constraint 2x3 open", failed)
        self.assertIn("circuit/QAOA round 2x3", failed)
        self.assertNotIn("circuit/SWAP = 3 CNOT", failed)
        with self.assertRaises(VerificationError) as cm:
            report.raise_for_failures()
        self.assertEqual(cm.exception.exit_code, 3)

    def test_channels_suite(self):
        report = run_verification(VerifyOptions(suites=("channels",), channel_trials=300, seed=4))
        self.assertTrue(report.passed, report.table())
        self.assertEqual(len(report.checks), 3)

    def test_quadrature_suite(self):
        opts = VerifyOptions(suites=("quadrature",), quadrature_cases=2, quadrature_samples=200_000, z_tolerance=5.0)
        report = run_verification(opts)
        self.assertTrue(report.passed, report.table())

    def test_decoding_suite(self):
        opts = VerifyOptions(suites=("decoding",), mc_trials=5000, mc_sizes=(4,), z_tolerance=5.0)
        report = run_verification(opts)
        self.assertTrue(report.passed, report.table())
        self.assertEqual(len(report.checks), 4)

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_verification(VerifyOptions(suites=("astrology",)))


class TestReport(unittest.TestCase):
    def test_table_and_dict(self):
        report = VerificationReport()
        report.add(CheckResult("schedule", "ok", True, 1.0, "exact"))
        with self.assertLogs("shuttleqaoa.services.verify", level="WARNING"):
            report.add(CheckResult("schedule", "bad", False, 2.0, "exact"))
        self.assertFalse(report.passed)
        self.assertEqual(report.failed(), ["schedule/bad"])
        self.assertIn("1/2 checks passed", report.table())
        self.assertEqual(report.to_dict()["checks"][1]["name"], "bad")


if __name__ == "__main__":
    unittest.main()
