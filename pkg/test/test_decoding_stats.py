# tests/test_decoding_stats.py

import math
import unittest

import numpy as np

from shuttleqaoa.services.decoding_stats import (TreeStatsConfig, expected_incorrect_trees, incorrect_counts,
                                                 incorrect_per_error, incorrect_tree_table,
                                                 incorrect_trees_for, monte_carlo_trees, n_for_rule,
                                                 n_ok_distribution, p_fail, p_fail_curve, threshold_n_ok,
                                                 thresholds_non_decreasing, x_max, x_max_table)
from shuttleqaoa.services.metrics import METRICS
from shuttleqaoa.services.parity import LogicalProblem, all_spanning_trees, parity_map
from shuttleqaoa.services.trees import SpanningTreeSet, enumerate_spanning_trees

N_RANGE = range(4, 21)


class TestRecursion(unittest.TestCase):
    def test_hand_cases(self):
        cfg = TreeStatsConfig(4, 4)
        self.assertEqual(incorrect_per_error(cfg), 2.0)
        self.assertEqual(expected_incorrect_trees(cfg, 1), 2.0)
        self.assertEqual(expected_incorrect_trees(cfg, 2), 3.0)
        self.assertEqual(expected_incorrect_trees(cfg, 0), 0.0)

    def test_closed_form(self):
        for N in (5, 8, 13):
            for rule in ("N", "2N"):
                cfg = TreeStatsConfig.for_rule(N, rule)
                table = incorrect_tree_table(cfg)
                m = np.arange(table.size)
                np.testing.assert_allclose(table, cfg.n * (1 - (1 - 2.0 / N) ** m), rtol=1e-12, atol=1e-12)

    def test_bounded_and_monotone(self):
        table = incorrect_tree_table(TreeStatsConfig(10, 20))
        self.assertTrue(np.all(np.diff(table) >= 0))
        self.assertLessEqual(table[-1], 20)

    def test_rules_and_validation(self):
        self.assertEqual(n_for_rule(7, "N"), 7)
        self.assertEqual(n_for_rule(7, "2N"), 14)
        with self.assertRaises(ValueError):
            n_for_rule(7, "3N")
        with self.assertRaises(ValueError):
            TreeStatsConfig(2, 2)
        with self.assertRaises(ValueError):
            TreeStatsConfig(5, 5, x=0.0)
        with self.assertRaises(ValueError):
            expected_incorrect_trees(TreeStatsConfig(5, 5), -1)


class TestThresholds(unittest.TestCase):
    def test_distribution_normalized(self):
        dist = n_ok_distribution(TreeStatsConfig(8, 16, epsilon=0.037))
        self.assertAlmostEqual(float(dist.probs.sum()), 1.0, places=12)
        self.assertTrue(np.all(np.diff(dist.support) > 0))
        self.assertTrue(np.all(dist.probs > 0))

    def test_error_free_distribution(self):
        cfg = TreeStatsConfig(6, 6, epsilon=0.0)
        dist = n_ok_distribution(cfg)
        self.assertEqual(dist.support.tolist(), [6])
        self.assertEqual(threshold_n_ok(cfg), 6)

    def test_threshold_drops_with_x(self):
        cfg = TreeStatsConfig(10, 20, x=0.5, epsilon=0.037)
        loose = threshold_n_ok(TreeStatsConfig(10, 20, x=0.99, epsilon=0.037))
        self.assertLessEqual(loose, threshold_n_ok(cfg))

    def test_p_fail_range(self):
        for N in (4, 10, 20):
            pf = p_fail(TreeStatsConfig.for_rule(N, "2N", 0.9, 0.037))
            self.assertGreaterEqual(pf, 0.0)
            self.assertLessEqual(pf, 1.0)

    def test_p_fail_curve(self):
        points = p_fail_curve(N_RANGE, "2N", 0.037)
        self.assertEqual([p.N for p in points], list(N_RANGE))
        self.assertTrue(all(p.n == 2 * p.N for p in points))
        self.assertLess(points[-1].p_fail, points[0].p_fail)
        for prev, cur in zip(points, points[1:]):
            self.assertEqual(cur.jump, cur.p_fail > prev.p_fail)

    def test_error_free_curve_strictly_decreasing(self):
        points = p_fail_curve(range(4, 10), "N", 0.0)
        for p in points:
            self.assertEqual(p.threshold, p.n)
            self.assertAlmostEqual(p.p_fail, 0.5 ** p.K)
        self.assertTrue(all(b.p_fail < a.p_fail for a, b in zip(points, points[1:])))


class TestXMax(unittest.TestCase):
    def test_edges(self):
        self.assertEqual(x_max(N_RANGE, "N", 0.0), 1.0)
        self.assertEqual(x_max(N_RANGE, "N", 0.5), 0.0)

    def test_smaller_errors_allow_larger_x(self):
        self.assertGreaterEqual(x_max(N_RANGE, "2N", 0.01), x_max(N_RANGE, "2N", 0.2))
        self.assertGreater(x_max(N_RANGE, "2N", 0.01), 0.0)

    def test_result_satisfies_predicate(self):
        x = x_max(N_RANGE, "N", 0.01)
        if x > 0:
            self.assertTrue(thresholds_non_decreasing(N_RANGE, "N", 0.01, x))

    def test_table(self):
        rows = x_max_table(N_RANGE, "N", [0.0, 0.5])
        self.assertEqual([r.x_max for r in rows], [1.0, 0.0])
        self.assertEqual((rows[0].N_min, rows[0].N_max), (4, 20))
        with self.assertRaises(ValueError):
            x_max([5], "N", 0.1)


class TestMonteCarlo(unittest.TestCase):
    def setUp(self):
        METRICS.reset()

    def test_agrees_with_recursion(self):
        for N in (4, 5, 6, 8):
            for rule in ("N", "2N"):
                cfg = TreeStatsConfig.for_rule(N, rule, epsilon=0.05)
                stats = monte_carlo_trees(cfg, trials=4000, seed=0)
                self.assertEqual([p.m for p in stats.per_m], [1, 2, 3, 4, 5])
                self.assertLessEqual(stats.max_z(), 3.0, stats.to_dict())
        self.assertEqual(METRICS.get("mc.trials"), 8 * 4000 * 6)

    def test_constant_counts_have_finite_z(self):
        # expected is 1.9999999999999996 in floating point while every trial counts 2
        stats = monte_carlo_trees(TreeStatsConfig(6, 6, epsilon=0.05), trials=500, seed=0, m_values=(1,))
        self.assertTrue(math.isfinite(stats.per_m[0].z), stats.to_dict())
        self.assertLessEqual(abs(stats.per_m[0].z), 3.0)

    def test_reproducible(self):
        cfg = TreeStatsConfig(5, 5, epsilon=0.05)
        a = monte_carlo_trees(cfg, trials=3000, seed=9, m_values=(2,))
        b = monte_carlo_trees(cfg, trials=3000, seed=9, m_values=(2,))
        self.assertEqual(a.to_dict(), b.to_dict())

    def test_fixed_error_sets(self):
        layout = parity_map(LogicalProblem.complete(4, seed=0))
        first, second = all_spanning_trees(layout)[:2]
        trees = SpanningTreeSet(layout, [first, second])
        self.assertEqual(incorrect_trees_for(trees, []), 0)
        self.assertEqual(incorrect_trees_for(trees, range(layout.n_physical)), 2)
        q = first[0]
        self.assertEqual(incorrect_trees_for(trees, [q]), 1 + int(q in second))

    def test_counts_bounded(self):
        trees = enumerate_spanning_trees(parity_map(LogicalProblem.complete(5, seed=0)), 5, seed=0)
        counts = incorrect_counts(trees, 3, 500, np.random.default_rng(0))
        self.assertEqual(counts.shape, (500,))
        self.assertTrue(np.all((counts >= 1) & (counts <= 5)))

    def test_needs_trials(self):
        with self.assertRaises(ValueError):
            monte_carlo_trees(TreeStatsConfig(4, 4), trials=1)


if __name__ == "__main__":
    unittest.main()
