# tests/test_parity.py

import itertools
import unittest

import numpy as np

from shuttleqaoa.services.parity import (CONSTRAINT_TAGS, CircuitStep, GateOp, LogicalProblem,
                                         all_spanning_trees, circuit_unitary, constraint_circuit,
                                         constraint_unitary, decode_spanning_tree, is_spanning_tree,
                                         parity_bits_from_logical, parity_map, qaoa_round_circuit,
                                         qaoa_unitary, rectangular_layout, unit_cell_layout)
from shuttleqaoa.services.quantum_core import unitary_equal_up_to_phase


class TestParityMapping(unittest.TestCase):
    def test_counts(self):
        for N in (4, 5, 6, 7):
            layout = parity_map(LogicalProblem.complete(N, seed=1))
            K = N * (N - 1) // 2
            self.assertEqual(layout.n_physical, K)
            self.assertEqual(layout.n_constraints(), K - N + 1)
            self.assertEqual(len(layout.triangles), N - 2)

    def test_plaquettes_close(self):
        layout = parity_map(LogicalProblem.complete(6, seed=2))
        for p in layout.plaquettes:
            self.assertTrue(layout.is_closed_cycle(p))

    def test_field_strengths_follow_couplings(self):
        problem = LogicalProblem.complete(4, couplings=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
        layout = parity_map(problem)
        self.assertEqual(sorted(layout.field_strengths.values()), [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])

    def test_rejects_small_or_incomplete(self):
        with self.assertRaises(ValueError):
            parity_map(LogicalProblem.complete(2))
        with self.assertRaises(ValueError):
            parity_map(LogicalProblem(4, {(0, 1): 1.0}))
        with self.assertRaises(ValueError):
            LogicalProblem(3, {(2, 1): 1.0})

    def test_local_fields_dropped_with_warning(self):
        problem = LogicalProblem(3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}, local_fields={0: 0.5})
        with self.assertLogs("shuttleqaoa.services.parity", level="WARNING"):
            parity_map(problem)

    def test_unit_cells(self):
        bus = unit_cell_layout("spin_bus")
        modular = unit_cell_layout("modular_hop")
        self.assertEqual((bus.n_physical, len(bus.plaquettes)), (4, 4))
        self.assertEqual((modular.n_physical, len(modular.plaquettes)), (8, 8))
        self.assertTrue(bus.periodic)
        with self.assertRaises(ValueError):
            unit_cell_layout("ring")


class TestConstraintCircuit(unittest.TestCase):
    def test_tags(self):
        circuit = constraint_circuit(rectangular_layout(2, 3), 0.4)
        self.assertEqual(circuit.tags(), list(CONSTRAINT_TAGS))

    def test_open_layout_matches_exponential(self):
        layout = rectangular_layout(2, 3)
        for omega in (0.3, 1.1):
            u = circuit_unitary(constraint_circuit(layout, omega))
            self.assertTrue(unitary_equal_up_to_phase(u, constraint_unitary(layout, omega)))

    def test_periodic_cells_match_exponential(self):
        for kind in ("spin_bus", "modular"):
            layout = unit_cell_layout(kind)
            u = circuit_unitary(constraint_circuit(layout, 0.7))
            self.assertTrue(unitary_equal_up_to_phase(u, constraint_unitary(layout, 0.7)), kind)

    def test_wrong_zz_angle_detected(self):
        layout = rectangular_layout(2, 3)
        u = circuit_unitary(constraint_circuit(layout, 0.3, zz_angle_factor=1.0))
        self.assertFalse(unitary_equal_up_to_phase(u, constraint_unitary(layout, 0.3)))

    def test_qaoa_round(self):
        layout = rectangular_layout(2, 3, field_strengths={0: 0.5, 4: -1.0})
        u = circuit_unitary(qaoa_round_circuit(layout, 0.3, 0.4, 0.5))
        self.assertTrue(unitary_equal_up_to_phase(u, qaoa_unitary(layout, 0.3, 0.4, 0.5)))

    def test_step_rejects_reused_qubit(self):
        with self.assertRaises(ValueError):
            CircuitStep("x", [GateOp("CNOT", (0, 1)), GateOp("ZZ", (1, 2), angle=0.1)])


class TestDecoding(unittest.TestCase):
    def setUp(self):
        self.layout = parity_map(LogicalProblem.complete(4, seed=0))

    def test_all_trees_of_k4(self):
        trees = all_spanning_trees(self.layout)
        self.assertEqual(len(trees), 16)
        self.assertTrue(all(is_spanning_tree(self.layout, t) for t in trees))

    def test_every_tree_recovers_configuration(self):
        trees = all_spanning_trees(self.layout)
        for spins in itertools.product((1, -1), repeat=4):
            bits = parity_bits_from_logical(spins, self.layout)
            gauge = tuple(s * spins[0] for s in spins)
            for t in trees:
                self.assertEqual(decode_spanning_tree(bits, self.layout, t), gauge)

    def test_error_outside_tree_is_harmless(self):
        spins = (1, -1, -1, 1)
        bits = parity_bits_from_logical(spins, self.layout)
        tree = all_spanning_trees(self.layout)[0]
        outside = next(q for q in range(self.layout.n_physical) if q not in tree)
        inside = tree[0]
        flipped_out = list(bits)
        flipped_out[outside] ^= 1
        flipped_in = list(bits)
        flipped_in[inside] ^= 1
        self.assertEqual(decode_spanning_tree(flipped_out, self.layout, tree), spins)
        self.assertNotEqual(decode_spanning_tree(flipped_in, self.layout, tree), spins)

    def test_rejects_non_tree(self):
        with self.assertRaises(ValueError):
            decode_spanning_tree(np.zeros(6), self.layout, (0, 1))


if __name__ == "__main__":
    unittest.main()
