# tests/test_simulation.py

import math
import unittest

import numpy as np

from shuttleqaoa.errors import ConfigError
from shuttleqaoa.services.architectures import ArchitectureSpec
from shuttleqaoa.services.channels import GateErrorParams
from shuttleqaoa.services.metrics import METRICS
from shuttleqaoa.services.simulation import (LAYERS_PER_ROUND, RunConfig, SweepGrid, budget_fidelity,
                                             build_schedule, epsilon, error_budget, evaluate,
                                             layer_error_rates, max_depth, max_depth_from_budget,
                                             optimal_velocity, readout_fidelity, run_schedule, sweep)
from shuttleqaoa.services.quantum_core import DensityMatrix, apply_unitary, build_gate
from shuttleqaoa.services.valley import ValleyDistribution, shuttle_dephasing_prob, shuttle_relaxation_prob


class TestRunConfig(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            RunConfig(noise_sources=frozenset({"cosmic"}))
        with self.assertRaises(ValueError):
            RunConfig(rounds=0)
        with self.assertRaises(ValueError):
            RunConfig(faults=((0, 1, "W"),))
        with self.assertRaises(ValueError):
            RunConfig(fidelity_mode="trace")

    def test_default_fidelity_mode(self):
        self.assertEqual(RunConfig().fidelity_mode, "state")

    def test_helpers(self):
        cfg = RunConfig().with_velocity(3.0).with_law("gaussian").with_sources("gate")
        self.assertEqual(cfg.velocity, 3.0)
        self.assertEqual(cfg.coherence.dephasing_law, "gaussian")
        self.assertEqual(cfg.noise_sources, frozenset({"gate"}))


class TestEvaluate(unittest.TestCase):
    def setUp(self):
        METRICS.reset()
        self.cfg = RunConfig()

    def test_noiseless_run(self):
        res = evaluate(self.cfg.with_sources())
        self.assertAlmostEqual(res.F, 1.0, places=9)
        self.assertAlmostEqual(res.p_1q, 0.0, places=9)
        self.assertAlmostEqual(res.F_r, 1.0, places=9)
        self.assertEqual(res.F_m, 1.0)
        self.assertAlmostEqual(res.epsilon, 0.0, places=9)
        self.assertEqual(METRICS.get("sim.runs"), 1)

    def test_gate_noise_only(self):
        res = evaluate(self.cfg.with_sources("gate"))
        self.assertLess(res.F, 1.0)
        self.assertGreater(res.epsilon, 0.0)
        self.assertLess(res.epsilon, 0.2)
        self.assertTrue(res.rho_err.check(herm_atol=1e-10, trace_atol=1e-8, psd_atol=1e-8))

    def test_spam_enters_through_measurement_fidelity(self):
        res = evaluate(self.cfg.with_sources("spam"))
        self.assertAlmostEqual(res.F_m, 0.999 * (1 - 1e-5))
        self.assertGreater(res.epsilon, 1 - res.F_m - 1e-12)

    def test_x_fault_after_init_is_orthogonal(self):
        res = evaluate(self.cfg.with_sources().replace(faults=((0, 0, "X"),)))
        self.assertLess(res.F, 1e-6)

    def test_modular_runs(self):
        cfg = self.cfg.replace(arch=ArchitectureSpec("modular")).with_sources("gate")
        res = evaluate(cfg)
        self.assertEqual(build_schedule(cfg).n_qubits, 8)
        self.assertGreater(res.epsilon, evaluate(self.cfg.with_sources("gate")).epsilon)

    def test_more_rounds_more_error(self):
        one = evaluate(self.cfg.with_sources("gate"))
        two = evaluate(self.cfg.with_sources("gate").replace(rounds=2))
        self.assertGreater(two.epsilon, one.epsilon)

    def test_deterministic(self):
        cfg = self.cfg.with_sources("gate", "idle")
        self.assertEqual(evaluate(cfg).epsilon, evaluate(cfg).epsilon)

    def test_valley_ordering(self):
        base = self.cfg.with_velocity(10.0)
        good = evaluate(base.replace(valley=ValleyDistribution.from_moments(200.0, 20.0)))
        bad = evaluate(base.replace(valley=ValleyDistribution.from_moments(50.0, 20.0)))
        self.assertLessEqual(good.epsilon, bad.epsilon)

    def test_optimal_velocity_is_interior(self):
        eps = [evaluate(self.cfg.with_velocity(v)).epsilon for v in (0.1, 10.0, 100.0)]
        self.assertLess(eps[1], eps[0])
        self.assertLess(eps[1], eps[2])


class TestBudgetAndReadout(unittest.TestCase):
    def setUp(self):
        self.cfg = RunConfig().with_sources("gate")
        self.schedule = build_schedule(self.cfg)

    def test_budget_entries(self):
        entries = error_budget(self.schedule, self.cfg)
        self.assertTrue(entries)
        self.assertEqual({e.source for e in entries}, {"gate"})
        self.assertTrue(all(e.error >= 0.0 for e in entries))
        self.assertEqual(budget_fidelity([]), 1.0)

    def test_budget_matches_simulation(self):
        cfg = RunConfig(gate=GateErrorParams(p_d=1e-3, p_phi=0.0, p_b=0.0)).with_sources("gate")
        entries = error_budget(build_schedule(cfg), cfg)
        self.assertAlmostEqual(budget_fidelity(entries), evaluate(cfg).F, delta=1e-4)

    def test_readout_fidelity(self):
        rho_id, _ = run_schedule(self.schedule, self.cfg)
        self.assertAlmostEqual(readout_fidelity(rho_id, self.schedule, self.cfg.with_sources()), 1.0)
        idle = RunConfig().with_sources("idle")
        self.assertLess(readout_fidelity(rho_id, self.schedule, idle, mode="state"), 1.0)

    def test_readout_fidelity_closed_form(self):
        cfg = RunConfig().with_velocity(10.0).with_sources("idle", "shuttle")
        schedule = build_schedule(cfg)
        plus = DensityMatrix.basis(4)
        for q in range(4):
            plus = apply_unitary(plus, build_gate("H"), [q])
        # 10 µm at 10 m/s idles 1 µs; each measurement idles T_r = 5 µs
        shuttle_wait = (1 - 0.01) * (1 - 1e-6)
        measure_wait = (1 - 0.05) * (1 - 5e-6)
        p_deph = shuttle_dephasing_prob(10_000.0, 10.0, cfg.valley, cfg.shuttle, cfg.coherence)
        p_relax = shuttle_relaxation_prob(10_000.0, 10.0, cfg.coherence, cfg.shuttle)
        per_qubit = []
        for k in range(4):
            c = math.sqrt((shuttle_wait * measure_wait) ** k * (1 - p_deph) * (1 - p_relax))
            per_qubit.append((1 + c) / 2)
        expected = float(np.prod(per_qubit)) ** 0.25
        self.assertAlmostEqual(readout_fidelity(plus, schedule, cfg), expected, places=9)

    def test_epsilon(self):
        self.assertAlmostEqual(epsilon(0.1, 0.9, 1.0), 0.19)
        with self.assertRaises(ValueError):
            epsilon(0.1, 1.2, 1.0)


class TestDepth(unittest.TestCase):
    def test_max_depth(self):
        self.assertAlmostEqual(max_depth(0.5, 0.01, 0.5, 0.01, 0.1), math.log(10.0) / 0.02)
        with self.assertRaises(ValueError):
            max_depth(0.5, 0.0, 0.5, 0.0, 0.1)
        with self.assertRaises(ValueError):
            max_depth(0.5, 0.01, 0.5, 0.01, 0.0)

    def test_layer_error_rates(self):
        cfg = RunConfig().with_sources("gate")
        f1, p1, f2, p2 = layer_error_rates(build_schedule(cfg), cfg)
        self.assertAlmostEqual(f1 + f2, 1.0)
        self.assertGreater(p1, 0.0)
        self.assertGreater(p2, 0.0)

    def test_depth_from_budget(self):
        cfg = RunConfig().with_sources("gate")
        d, rounds = max_depth_from_budget(cfg, 0.1)
        self.assertGreater(d, 0.0)
        self.assertAlmostEqual(rounds, d / LAYERS_PER_ROUND)

    def test_layer_errors_spread_over_round(self):
        cfg = RunConfig().with_sources("gate", "idle")
        schedule = build_schedule(cfg)
        f1, p1, f2, p2 = layer_error_rates(schedule, cfg)
        total = sum(e.error for e in error_budget(schedule, cfg))
        self.assertAlmostEqual(f1 * p1 + f2 * p2, total / (schedule.n_qubits * LAYERS_PER_ROUND), places=12)


class TestBusBands(unittest.TestCase):
    """Default bus at E_v = 200 ± 30 µeV."""

    @classmethod
    def setUpClass(cls):
        cls.base = RunConfig().replace(valley=ValleyDistribution.from_moments(200.0, 30.0))
        cls.velocities = np.geomspace(1.0, 100.0, 21)
        cls.linear = [evaluate(cls.base.with_velocity(v)).epsilon for v in cls.velocities]
        gaussian = cls.base.with_law("gaussian")
        cls.gaussian = [evaluate(gaussian.with_velocity(v)).epsilon for v in cls.velocities]

    def test_linear_optimum_in_band(self):
        i = int(np.argmin(self.linear))
        self.assertTrue(0 < i < len(self.velocities) - 1)
        v_opt, eps_opt = optimal_velocity(self.velocities, self.linear)
        self.assertGreaterEqual(eps_opt, 0.02)
        self.assertLessEqual(eps_opt, 0.06)

    def test_gaussian_never_worse(self):
        for lin, gau in zip(self.linear, self.gaussian):
            self.assertLessEqual(gau, lin + 1e-9)

    def test_depth_at_optimum_in_band(self):
        v_opt, _ = optimal_velocity(self.velocities, self.linear)
        d, rounds = max_depth_from_budget(self.base.with_velocity(v_opt), 0.1)
        self.assertGreaterEqual(d, 200.0)
        self.assertLessEqual(d, 400.0)
        self.assertAlmostEqual(rounds, d / LAYERS_PER_ROUND)


class TestOptimalVelocity(unittest.TestCase):
    def test_parabola_vertex(self):
        v = [1.0, 2.0, 4.0, 5.0]
        v_opt, eps_opt = optimal_velocity(v, [(x - 3.0) ** 2 for x in v])
        self.assertAlmostEqual(v_opt, 3.0)
        self.assertAlmostEqual(eps_opt, 0.0)

    def test_edge_minimum_warns(self):
        with self.assertLogs("shuttleqaoa.services.simulation", level="WARNING"):
            v_opt, eps_opt = optimal_velocity([1.0, 2.0, 3.0], [0.1, 0.2, 0.3])
        self.assertEqual((v_opt, eps_opt), (1.0, 0.1))

    def test_rejects_mismatch(self):
        with self.assertRaises(ValueError):
            optimal_velocity([1.0, 2.0], [0.1])


class TestSweep(unittest.TestCase):
    def setUp(self):
        self.base = RunConfig().with_sources("gate", "idle")

    def test_grid_order_independent_of_workers(self):
        grid = SweepGrid(velocities=(1.0, 10.0), means=(100.0,), stds=(20.0,))
        serial = sweep(self.base, grid, workers=1)
        threaded = sweep(self.base, grid, workers=2)
        self.assertEqual(serial.points, threaded.points)
        self.assertEqual([p.velocity_mps for p in serial.points], [1.0, 10.0])

    def test_infeasible_moments_skipped(self):
        grid = SweepGrid(velocities=(10.0,), means=(50.0,), stds=(20.0, 30.0))
        with self.assertLogs("shuttleqaoa.services.simulation", level="WARNING"):
            cfgs = grid.points(self.base)
        self.assertEqual(len(cfgs), 1)
        with self.assertRaises(ConfigError):
            sweep(self.base, SweepGrid(velocities=(10.0,), means=(50.0,), stds=(30.0,)))

    def test_families_and_slice(self):
        grid = SweepGrid(velocities=(10.0, 1.0), means=(100.0, 200.0), stds=(20.0,),
                         architectures=("spin_bus",), T2_us=(("spin_bus", 50.0),))
        result = sweep(self.base, grid)
        self.assertEqual(len(result), 4)
        fams = result.families()
        self.assertEqual(len(fams), 2)
        for pts in fams.values():
            self.assertEqual([p.velocity_mps for p in pts], [1.0, 10.0])
        sl = result.slice(mean_Ev=200.0)
        self.assertEqual(len(sl), 2)
        self.assertTrue(all(p.T2_us == 50.0 for p in result.points))

    def test_empty_axis_rejected(self):
        with self.assertRaises(ValueError):
            SweepGrid(velocities=())


if __name__ == "__main__":
    unittest.main()
