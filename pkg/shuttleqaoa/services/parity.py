# shuttleqaoa/services/parity.py
"""
Parity (LHZ) mapping of all-to-all Ising problems and the constant-depth
QAOA circuits that run on it.

Grid convention: qubit (r, c) sits in row r, column c. A square plaquette is
named by its top-left corner and covers (r, c), (r, c+1), (r+1, c),
(r+1, c+1). The constraint circuit works ribbon by ribbon (rows r, r+1):
CNOTs from the top row into the bottom row, ZZ between bottom-row neighbors,
CNOTs again. Periodic layouts wrap columns and rows; an operand reached
through the wrap carries an image offset (dcol, drow).
"""

import itertools
import logging
import math

import networkx as nx
import numpy as np
from scipy import linalg

from .quantum_core import HADAMARD, PAULI_X, PAULI_Z, build_gate, embed

log = logging.getLogger(__name__)

# ZZ(a) = exp(-i a/2 ZZ), so a factor 2 turns the plaquette angle into the gate angle.
ZZ_ANGLE_FACTOR = 2.0

EVEN_TAGS = ("eo1", "eo2", "eo3", "eo4")
ODD_TAGS = ("oe1", "oe2", "oe3", "oe4")
CONSTRAINT_TAGS = EVEN_TAGS + ODD_TAGS


class LogicalProblem:
    """Ising problem sum J_i z_i + sum J_ij z_i z_j on N logical spins."""
    __slots__ = ("n_logical", "pair_couplings", "local_fields")

    def __init__(self, n_logical, pair_couplings, local_fields=None):
        self.n_logical = int(n_logical)
        self.pair_couplings = {}
        for (i, j), J in dict(pair_couplings).items():
            i, j = int(i), int(j)
            if not 0 <= i < j < self.n_logical:
                raise ValueError("coupling key (%d, %d) needs 0 <= i < j < %d" % (i, j, self.n_logical))
            self.pair_couplings[(i, j)] = float(J)
        self.local_fields = {}
        for i, h in dict(local_fields or {}).items():
            if not 0 <= int(i) < self.n_logical:
                raise ValueError("field index %r out of range" % (i,))
            self.local_fields[int(i)] = float(h)

    @classmethod
    def complete(cls, n_logical, seed=None, couplings=None):
        """All-to-all problem; random couplings in [-1, 1] unless given."""
        rng = np.random.default_rng(seed)
        pairs = list(itertools.combinations(range(int(n_logical)), 2))
        if couplings is None:
            couplings = rng.uniform(-1.0, 1.0, size=len(pairs))
        return cls(n_logical, dict(zip(pairs, couplings)))

    def to_dict(self):
        return {
            "n_logical": self.n_logical,
            "pair_couplings": [[i, j, J] for (i, j), J in sorted(self.pair_couplings.items())],
            "local_fields": {str(i): h for i, h in sorted(self.local_fields.items())},
        }

    def __repr__(self):
        return "LogicalProblem(N=%d, couplings=%d)" % (self.n_logical, len(self.pair_couplings))


class ParityLayout:
    """
    Physical-qubit grid with logical-pair labels and plaquette constraints.

    `grid` maps (row, col) -> physical index; `plaquettes` are 4-tuples of
    physical indices (TL, TR, BL, BR) keyed by their top-left corner in
    `corners`; triangles are recorded but no circuit enforces them.
    """
    __slots__ = ("n_logical", "labels", "field_strengths", "grid", "positions",
                 "n_rows", "n_cols", "periodic", "plaquettes", "corners", "triangles",
                 "degeneracy")

    def __init__(self, n_logical, labels, grid, field_strengths=None, periodic=False,
                 corners=None, triangles=None, degeneracy=1):
        self.n_logical = int(n_logical)
        self.labels = {int(q): tuple(sorted(lab)) for q, lab in labels.items()}
        self.grid = {tuple(rc): int(q) for rc, q in grid.items()}
        self.positions = {q: rc for rc, q in self.grid.items()}
        if sorted(self.positions) != list(range(len(self.labels))):
            raise ValueError("grid must place each physical qubit exactly once")
        self.n_rows = 1 + max(r for r, _ in self.grid)
        self.n_cols = 1 + max(c for _, c in self.grid)
        self.periodic = bool(periodic)
        if self.periodic and (self.n_cols % 2 or self.n_rows % 2):
            raise ValueError("periodic layouts need an even number of rows and columns")
        fs = field_strengths or {}
        self.field_strengths = {q: float(fs.get(q, 1.0)) for q in self.labels}
        self.corners = list(corners) if corners is not None else self._square_corners()
        self.plaquettes = [self.plaquette_qubits(r, c) for r, c in self.corners]
        self.triangles = [tuple(t) for t in (triangles or [])]
        self.degeneracy = int(degeneracy)
        for p in self.plaquettes:
            if not self.is_closed_cycle(p):
                raise ValueError("plaquette %s does not close a parity cycle" % (p,))

    @property
    def n_physical(self):
        return len(self.labels)

    # ---- geometry ----

    def _wrap(self, r, c):
        """(physical index, image offset) of grid site (r, c), or None."""
        dr, dc = 0, 0
        if self.periodic:
            dc, c = divmod(c, self.n_cols)
            dr, r = divmod(r, self.n_rows)
        q = self.grid.get((r, c))
        return None if q is None else (q, (dc, dr))

    def site(self, r, c):
        return self._wrap(r, c)

    def _square_corners(self):
        corners = []
        rows = range(self.n_rows) if self.periodic else range(self.n_rows - 1)
        cols = range(self.n_cols) if self.periodic else range(self.n_cols - 1)
        for r in rows:
            for c in cols:
                cells = [self._wrap(r + a, c + b) for a in (0, 1) for b in (0, 1)]
                if all(cells):
                    corners.append((r, c))
        return corners

    def plaquette_qubits(self, r, c):
        return tuple(self._wrap(r + a, c + b)[0] for a in (0, 1) for b in (0, 1))

    def is_closed_cycle(self, qubits):
        counts = {}
        for q in qubits:
            for i in self.labels[q]:
                counts[i] = counts.get(i, 0) + 1
        return all(v % 2 == 0 for v in counts.values())

    def n_constraints(self):
        return len(self.plaquettes) + len(self.triangles)

    def rows(self):
        return {q: rc[0] for q, rc in self.positions.items()}

    def logical_graph(self):
        """Logical nodes with one edge per physical qubit (edge attribute `qubit`)."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n_logical))
        for q, (i, j) in sorted(self.labels.items()):
            g.add_edge(i, j, qubit=q)
        return g

    def to_dict(self):
        return {
            "n_logical": self.n_logical,
            "labels": {str(q): list(lab) for q, lab in sorted(self.labels.items())},
            "rows": {str(q): rc[0] for q, rc in sorted(self.positions.items())},
            "cols": {str(q): rc[1] for q, rc in sorted(self.positions.items())},
            "field_strengths": {str(q): J for q, J in sorted(self.field_strengths.items())},
            "plaquettes": [list(p) for p in self.plaquettes],
            "triangles": [list(t) for t in self.triangles],
            "periodic": self.periodic,
            "degeneracy": self.degeneracy,
        }

    def __repr__(self):
        return "ParityLayout(N=%d, K=%d, plaquettes=%d, periodic=%s)" % (
            self.n_logical, self.n_physical, len(self.plaquettes), self.periodic)


def parity_map(problem):
    """
    LHZ layout of a complete-graph problem: qubit (i, j) at row i, column j,
    squares for j >= i + 2, boundary triangles (i, i+1, i+2) recorded only.
    """
    N = problem.n_logical
    if N < 3:
        raise ValueError("parity mapping needs N >= 3, got %d" % N)
    pairs = list(itertools.combinations(range(N), 2))
    missing = [p for p in pairs if p not in problem.pair_couplings]
    if missing:
        raise ValueError("complete graph required; missing couplings %s" % missing[:5])
    index = {p: k for k, p in enumerate(pairs)}
    labels = {k: p for p, k in index.items()}
    grid = {p: k for p, k in index.items()}
    fields = {index[p]: problem.pair_couplings[p] for p in pairs}
    corners = [(i, j) for i in range(N - 3) for j in range(i + 2, N - 1)]
    triangles = [(index[(i, i + 1)], index[(i, i + 2)], index[(i + 1, i + 2)]) for i in range(N - 2)]
    layout = ParityLayout(N, labels, grid, fields, periodic=False, corners=corners,
                          triangles=triangles, degeneracy=1)
    K = layout.n_physical
    if layout.n_constraints() != K - N + layout.degeneracy:
        raise ValueError("constraint count %d != K - N + D" % layout.n_constraints())
    if problem.local_fields:
        log.warning("local fields dropped by the pair-only parity mapping: %s", problem.local_fields)
    return layout


def rectangular_layout(n_rows, n_cols, periodic=False, index_map=None, field_strengths=None):
    """
    R x C grid labelled as a bipartite logical graph: (r, c) -> (r, R + c).
    `index_map` overrides the row-major physical numbering.
    """
    R, C = int(n_rows), int(n_cols)
    if R < 1 or C < 1:
        raise ValueError("grid needs at least one row and column")
    grid = {}
    labels = {}
    for r in range(R):
        for c in range(C):
            q = int(index_map[(r, c)]) if index_map else r * C + c
            grid[(r, c)] = q
            labels[q] = (r, R + c)
    return ParityLayout(R + C, labels, grid, field_strengths, periodic=periodic, degeneracy=0)


# Unit-cell numbering (physical index per grid site).
SPIN_BUS_CELL = {(0, 0): 2, (0, 1): 3, (1, 0): 1, (1, 1): 0}
MODULAR_CELL = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3,
                (0, 2): 4, (0, 3): 5, (1, 2): 6, (1, 3): 7}
QUBIT_NAMES = {
    "spin_bus": ("q1", "q2", "q3", "q4"),
    "modular": ("1a", "2a", "3a", "4a", "1b", "2b", "3b", "4b"),
}


def unit_cell_layout(kind):
    """Periodic unit cell of an architecture: 2x2 spin bus, 2x4 modular."""
    if kind == "spin_bus":
        return rectangular_layout(2, 2, periodic=True, index_map=SPIN_BUS_CELL)
    if kind in ("modular", "modular_hop"):
        return rectangular_layout(2, 4, periodic=True, index_map=MODULAR_CELL)
    raise ValueError("unknown architecture kind %r" % (kind,))


# ---- circuits ----

class GateOp:
    __slots__ = ("name", "angle", "qubits", "offsets")

    def __init__(self, name, qubits, angle=None, offsets=None):
        self.name = name
        self.angle = None if angle is None else float(angle)
        self.qubits = tuple(int(q) for q in qubits)
        self.offsets = tuple(tuple(o) for o in (offsets or [(0, 0)] * len(self.qubits)))

    def to_dict(self):
        return {"gate": self.name, "angle": self.angle, "qubits": list(self.qubits),
                "offsets": [list(o) for o in self.offsets]}

    def __repr__(self):
        if self.angle is None:
            return "%s%s" % (self.name, self.qubits)
        return "%s(%.4g)%s" % (self.name, self.angle, self.qubits)


class CircuitStep:
    """Parallel gates sharing a tag; no qubit appears twice."""
    __slots__ = ("tag", "ops")

    def __init__(self, tag, ops):
        self.tag = tag
        self.ops = list(ops)
        seen = set()
        for op in self.ops:
            for q in op.qubits:
                if q in seen:
                    raise ValueError("qubit %d used twice in step %s" % (q, tag))
                seen.add(q)

    def to_dict(self):
        return {"tag": self.tag, "ops": [op.to_dict() for op in self.ops]}

    def __repr__(self):
        return "CircuitStep(%s, %s)" % (self.tag, self.ops)


class AbstractCircuit:
    __slots__ = ("n_qubits", "steps")

    def __init__(self, n_qubits, steps=None):
        self.n_qubits = int(n_qubits)
        self.steps = list(steps or [])
        for step in self.steps:
            for op in step.ops:
                if any(not 0 <= q < self.n_qubits for q in op.qubits):
                    raise ValueError("step %s addresses a qubit outside 0..%d" % (step.tag, self.n_qubits - 1))

    def extend(self, steps):
        return AbstractCircuit(self.n_qubits, self.steps + list(steps))

    def tags(self):
        return [s.tag for s in self.steps]

    def to_dict(self):
        return {"n_qubits": self.n_qubits, "steps": [s.to_dict() for s in self.steps]}

    def __repr__(self):
        return "AbstractCircuit(n_qubits=%d, steps=%d)" % (self.n_qubits, len(self.steps))


def _ribbon_half(layout, parity, angle, tags):
    """CNOT / ZZ(even corners) / ZZ(odd corners) / CNOT on ribbons whose top row has `parity`."""
    cnots = {}
    zz = ([], [])
    for (r, c) in layout.corners:
        if r % 2 != parity:
            continue
        for dc in (0, 1):
            top = layout.site(r, c + dc)
            bottom = layout.site(r + 1, c + dc)
            cnots.setdefault((r, top[0]), GateOp("CNOT", (top[0], bottom[0]), offsets=(top[1], bottom[1])))
        left = layout.site(r + 1, c)
        right = layout.site(r + 1, c + 1)
        zz[c % 2].append(GateOp("ZZ", (left[0], right[0]), angle=angle, offsets=(left[1], right[1])))
    cnot_ops = [cnots[k] for k in sorted(cnots)]
    return [
        CircuitStep(tags[0], cnot_ops),
        CircuitStep(tags[1], zz[0]),
        CircuitStep(tags[2], zz[1]),
        CircuitStep(tags[3], [GateOp(op.name, op.qubits, offsets=op.offsets) for op in cnot_ops]),
    ]


def constraint_steps(layout, omega, zz_angle_factor=ZZ_ANGLE_FACTOR):
    angle = zz_angle_factor * float(omega)
    return _ribbon_half(layout, 0, angle, EVEN_TAGS) + _ribbon_half(layout, 1, angle, ODD_TAGS)


def constraint_circuit(layout, omega, zz_angle_factor=ZZ_ANGLE_FACTOR):
    """Eight steps implementing exp(-i omega sum_l C_l) on all square plaquettes."""
    return AbstractCircuit(layout.n_physical, constraint_steps(layout, omega, zz_angle_factor))


def _all_qubits(layout, name, angle_of=None):
    ops = []
    for q in range(layout.n_physical):
        angle = None if angle_of is None else angle_of(q)
        ops.append(GateOp(name, (q,), angle=angle))
    return ops


def qaoa_circuit(layout, rounds, zz_angle_factor=ZZ_ANGLE_FACTOR):
    """
    State preparation H^n once, then per (beta, gamma, omega) round:
    Rx(2 beta) driver, constraint circuit, Rz(2 gamma J) problem phase.
    """
    rounds = list(rounds)
    if not rounds:
        raise ValueError("at least one QAOA round required")
    steps = [CircuitStep("prep", _all_qubits(layout, "H"))]
    for beta, gamma, omega in rounds:
        steps.append(CircuitStep("driver", _all_qubits(layout, "Rx", lambda q: 2.0 * beta)))
        steps.extend(constraint_steps(layout, omega, zz_angle_factor))
        steps.append(CircuitStep("problem", _all_qubits(
            layout, "Rz", lambda q: 2.0 * gamma * layout.field_strengths[q])))
    return AbstractCircuit(layout.n_physical, steps)


def qaoa_round_circuit(layout, beta, gamma, omega, zz_angle_factor=ZZ_ANGLE_FACTOR):
    return qaoa_circuit(layout, [(beta, gamma, omega)], zz_angle_factor)


# ---- matrix oracles ----

def plaquette_operator(layout, plaquette):
    n = layout.n_physical
    diag = np.ones(2 ** n)
    idx = np.arange(2 ** n)
    for q in set(plaquette):
        # a qubit repeated in a periodic plaquette contributes Z^2 = I
        if plaquette.count(q) % 2:
            diag = diag * (1.0 - 2.0 * ((idx >> q) & 1))
    return np.diag(diag).astype(complex)


def constraint_hamiltonian(layout):
    n = layout.n_physical
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for p in layout.plaquettes:
        h += plaquette_operator(layout, p)
    return h


def constraint_unitary(layout, omega):
    return linalg.expm(-1j * float(omega) * constraint_hamiltonian(layout))


def circuit_unitary(circuit):
    """Dense product of every gate in the circuit (image offsets ignored)."""
    n = circuit.n_qubits
    u = np.eye(2 ** n, dtype=complex)
    for step in circuit.steps:
        for op in step.ops:
            gate = build_gate(op.name, op.angle)
            u = embed(gate.matrix, op.qubits, n) @ u
    return u


def qaoa_unitary(layout, beta, gamma, omega):
    """exp(-i gamma sum J Z) exp(-i omega sum C) exp(-i beta sum X) H^n."""
    n = layout.n_physical
    dim = 2 ** n
    driver = np.zeros((dim, dim), dtype=complex)
    problem = np.zeros((dim, dim), dtype=complex)
    prep = np.eye(dim, dtype=complex)
    for q in range(n):
        driver += embed(PAULI_X, [q], n)
        problem += layout.field_strengths[q] * embed(PAULI_Z, [q], n)
        prep = embed(HADAMARD, [q], n) @ prep
    return (linalg.expm(-1j * gamma * problem) @ constraint_unitary(layout, omega)
            @ linalg.expm(-1j * beta * driver) @ prep)


# ---- decoding ----

def parity_bits_from_logical(spins, layout):
    """Physical readout of a logical configuration: bit = 1 where the pair disagrees."""
    s = list(spins)
    if len(s) != layout.n_logical:
        raise ValueError("expected %d spins, got %d" % (layout.n_logical, len(s)))
    return [0 if s[i] == s[j] else 1 for q, (i, j) in sorted(layout.labels.items())]


def tree_graph(layout, tree):
    g = nx.Graph()
    g.add_nodes_from(range(layout.n_logical))
    for q in tree:
        i, j = layout.labels[int(q)]
        if g.has_edge(i, j):
            return None
        g.add_edge(i, j, qubit=int(q))
    return g


def is_spanning_tree(layout, tree):
    if len(set(tree)) != layout.n_logical - 1:
        return False
    g = tree_graph(layout, tree)
    return g is not None and nx.is_tree(g)


def decode_spanning_tree(bits, layout, tree):
    """
    Logical spins (+1/-1) from the parity bits on one spanning tree, with
    logical spin 0 fixed to +1.
    """
    if not is_spanning_tree(layout, tree):
        raise ValueError("qubits %s do not form a spanning tree of the logical graph" % (list(tree),))
    g = tree_graph(layout, tree)
    spins = [0] * layout.n_logical
    spins[0] = 1
    for u, v in nx.bfs_edges(g, 0):
        bit = int(bits[g.edges[u, v]["qubit"]])
        spins[v] = spins[u] * (-1 if bit else 1)
    return tuple(spins)


def all_spanning_trees(layout):
    """Every spanning tree as a sorted tuple of physical qubits (small N only)."""
    N = layout.n_logical
    if math.comb(layout.n_physical, N - 1) > 2_000_000:
        raise ValueError("too many candidate subsets for exhaustive enumeration")
    return [t for t in itertools.combinations(sorted(layout.labels), N - 1) if is_spanning_tree(layout, t)]
