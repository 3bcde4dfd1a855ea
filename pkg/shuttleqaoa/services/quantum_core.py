# shuttleqaoa/services/quantum_core.py

import logging
import math

import numpy as np

log = logging.getLogger(__name__)

# Basis index of an n-qubit state is sum(bit_q << q): qubit 0 is the least
# significant bit. In the (2,)*n tensor view qubit q therefore lives on axis
# n - 1 - q. A k-qubit gate acting on `targets` uses the same convention
# locally: its matrix index is sum(bit(targets[j]) << j).

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
PAULIS = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

MAX_QUBITS = 10


class DensityMatrix:
    """Density matrix of n qubits, stored dense (2^n x 2^n)."""
    __slots__ = ("n_qubits", "matrix")

    def __init__(self, matrix, n_qubits=None, validate=False):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square, got shape %s" % (m.shape,))
        n = int(round(math.log2(m.shape[0]))) if m.shape[0] > 0 else 0
        if 2 ** n != m.shape[0]:
            raise ValueError("dimension %d is not a power of two" % m.shape[0])
        if n_qubits is not None and int(n_qubits) != n:
            raise ValueError("n_qubits=%s does not match dimension %d" % (n_qubits, m.shape[0]))
        if n > MAX_QUBITS:
            raise ValueError("%d qubits exceeds the dense limit of %d" % (n, MAX_QUBITS))
        self.n_qubits = n
        self.matrix = m
        if validate:
            self.check()

    @classmethod
    def basis(cls, n_qubits, index=0):
        dim = 2 ** int(n_qubits)
        if not 0 <= index < dim:
            raise ValueError("basis index %d out of range for %d qubits" % (index, n_qubits))
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1.0
        return cls(m)

    @classmethod
    def from_pure(cls, psi):
        v = np.asarray(psi, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero state vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def random(cls, n_qubits, rng, rank=None):
        """Random mixed state from a Ginibre matrix (used by property tests)."""
        dim = 2 ** int(n_qubits)
        rank = dim if rank is None else int(rank)
        g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
        m = g @ g.conj().T
        return cls(m / np.trace(m).real)

    def copy(self):
        return DensityMatrix(self.matrix.copy())

    def trace(self):
        return complex(np.trace(self.matrix))

    def purity(self):
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def populations(self):
        return np.clip(np.real(np.diag(self.matrix)), 0.0, None)

    def check(self, herm_atol=1e-12, trace_atol=1e-10, psd_atol=1e-10):
        m = self.matrix
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=herm_atol):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > trace_atol:
            raise ValueError("density matrix trace %.3e != 1" % np.trace(m).real)
        w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if w.min() < -psd_atol:
            raise ValueError("density matrix has negative eigenvalue %.3e" % w.min())
        return True

    def __repr__(self):
        return "DensityMatrix(n_qubits=%d, trace=%.12f)" % (self.n_qubits, self.trace().real)


class UnitaryGate:
    """
    Named unitary on 1 or 2 qubits. Composite gates (ZZ, CNOT, SWAP) keep
    their primitive decomposition in `primitives`, a list of
    (UnitaryGate, local target positions) in application order.
    """
    __slots__ = ("name", "angle", "matrix", "arity", "primitives")

    def __init__(self, name, matrix, angle=None, primitives=None):
        m = np.asarray(matrix, dtype=complex)
        if m.shape not in ((2, 2), (4, 4)):
            raise ValueError("gate %s must be 2x2 or 4x4, got %s" % (name, m.shape))
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0.0, atol=1e-12):
            raise ValueError("gate %s is not unitary" % name)
        self.name = str(name)
        self.angle = None if angle is None else float(angle)
        self.matrix = m
        self.arity = 1 if m.shape[0] == 2 else 2
        self.primitives = list(primitives or [])

    @property
    def is_composite(self):
        return bool(self.primitives)

    def __repr__(self):
        if self.angle is None:
            return "UnitaryGate(%s)" % self.name
        return "UnitaryGate(%s, %.6g)" % (self.name, self.angle)


class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""
    __slots__ = ("operators", "label", "arity")

    def __init__(self, operators, label="channel", atol=1e-10):
        ops = tuple(np.asarray(k, dtype=complex) for k in operators)
        if not ops:
            raise ValueError("channel %s has no Kraus operators" % label)
        shape = ops[0].shape
        if shape not in ((2, 2), (4, 4)) or any(k.shape != shape for k in ops):
            raise ValueError("channel %s: operators must share a 2x2 or 4x4 shape" % label)
        self.operators = ops
        self.label = str(label)
        self.arity = 1 if shape[0] == 2 else 2
        if not self.is_trace_preserving(atol):
            raise ValueError("channel %s violates sum K^dag K = I" % label)

    def completeness(self):
        return sum(k.conj().T @ k for k in self.operators)

    def is_trace_preserving(self, atol=1e-10):
        s = self.completeness()
        return bool(np.allclose(s, np.eye(s.shape[0]), rtol=0.0, atol=atol))

    def compose(self, after, label=None):
        """Channel that applies `self` first and then `after`."""
        if after.arity != self.arity:
            raise ValueError("cannot compose channels of arity %d and %d" % (self.arity, after.arity))
        ops = []
        for b in after.operators:
            for a in self.operators:
                k = b @ a
                if np.any(np.abs(k) > 0.0):
                    ops.append(k)
        return KrausChannel(ops, label or "%s+%s" % (self.label, after.label))

    def __repr__(self):
        return "KrausChannel(%s, %d ops)" % (self.label, len(self.operators))


# ---- tensor kernels ----

def _check_targets(targets, n_qubits, arity):
    t = [int(q) for q in targets]
    if len(t) != arity:
        raise ValueError("arity mismatch: %d targets for a %d-qubit operator" % (len(t), arity))
    if len(set(t)) != len(t):
        raise ValueError("targets must be distinct: %s" % (t,))
    for q in t:
        if not 0 <= q < n_qubits:
            raise ValueError("qubit index %d out of range for %d qubits" % (q, n_qubits))
    return t


def _axes(targets, n_qubits, offset):
    k = len(targets)
    return [offset + n_qubits - 1 - targets[k - 1 - a] for a in range(k)]


def _contract(op, tensor, axes):
    k = len(axes)
    opt = op.reshape((2,) * (2 * k))
    out = np.tensordot(opt, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _sandwich(matrix, n_qubits, op, targets):
    """op . rho . op^dag restricted to targets, on the raw matrix."""
    dim = 2 ** n_qubits
    tensor = matrix.reshape((2,) * (2 * n_qubits))
    tensor = _contract(op, tensor, _axes(targets, n_qubits, 0))
    tensor = _contract(op.conj(), tensor, _axes(targets, n_qubits, n_qubits))
    return tensor.reshape(dim, dim)


def apply_matrix(rho, matrix, targets):
    """Conjugate rho by an arbitrary local unitary matrix."""
    m = np.asarray(matrix, dtype=complex)
    arity = 1 if m.shape[0] == 2 else 2
    t = _check_targets(targets, rho.n_qubits, arity)
    return DensityMatrix(_sandwich(rho.matrix, rho.n_qubits, m, t))


def apply_unitary(rho, gate, targets):
    """U_emb rho U_emb^dag with the gate embedded on `targets`."""
    t = _check_targets(targets, rho.n_qubits, gate.arity)
    return DensityMatrix(_sandwich(rho.matrix, rho.n_qubits, gate.matrix, t))


def apply_channel(rho, channel, targets):
    """sum_k K_k rho K_k^dag with the channel embedded on `targets`."""
    t = _check_targets(targets, rho.n_qubits, channel.arity)
    out = None
    for k in channel.operators:
        term = _sandwich(rho.matrix, rho.n_qubits, k, t)
        out = term if out is None else out + term
    return DensityMatrix(out)


def embed(matrix, targets, n_qubits):
    """Full 2^n x 2^n operator of a local matrix (oracle use only)."""
    m = np.asarray(matrix, dtype=complex)
    arity = 1 if m.shape[0] == 2 else 2
    t = _check_targets(targets, n_qubits, arity)
    dim = 2 ** n_qubits
    ident = np.eye(dim, dtype=complex).reshape((2,) * (2 * n_qubits))
    return _contract(m, ident, _axes(t, n_qubits, 0)).reshape(dim, dim)


def partial_trace(rho, keep):
    """Reduced density matrix on the qubits in `keep` (kept in ascending order)."""
    n = rho.n_qubits
    keep = sorted(int(q) for q in keep)
    drop = [q for q in range(n) if q not in keep]
    tensor = rho.matrix.reshape((2,) * (2 * n))
    # lowest qubit first: it owns the highest remaining axis
    for q in sorted(drop):
        axis = n - 1 - q
        cur = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + cur)
    d = 2 ** len(keep)
    return DensityMatrix(tensor.reshape(d, d))


# ---- fidelity ----

def _psd_sqrt(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = np.where(w < 0.0, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho_id, rho_err):
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, clipped to [0, 1]."""
    a = rho_id.matrix if isinstance(rho_id, DensityMatrix) else np.asarray(rho_id, dtype=complex)
    b = rho_err.matrix if isinstance(rho_err, DensityMatrix) else np.asarray(rho_err, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch: %s vs %s" % (a.shape, b.shape))
    s = _psd_sqrt(a)
    inner = s @ b @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    w = np.where(w < 0.0, 0.0, w)
    f = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(f, 0.0), 1.0)


def population_fidelity(rho_id, rho_err):
    """Classical fidelity of the computational-basis populations."""
    p = rho_id.populations()
    q = rho_err.populations()
    f = float(np.sum(np.sqrt(p * q)) ** 2)
    return min(max(f, 0.0), 1.0)


def single_qubit_error_prob(F, n_qubits):
    if not 0.0 <= F <= 1.0:
        raise ValueError("fidelity %r outside [0, 1]" % F)
    if int(n_qubits) < 1:
        raise ValueError("n_qubits must be >= 1")
    return 1.0 - F ** (1.0 / int(n_qubits))


# ---- gates ----

def _rz(alpha):
    return np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])


def _rx(theta):
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _cp(alpha):
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * alpha)]).astype(complex)


def _compose_local(primitives, arity):
    dim = 2 ** arity
    u = np.eye(dim, dtype=complex)
    for gate, local in primitives:
        u = embed(gate.matrix, local, arity) @ u
    return u


_PRIMITIVE_1Q = {"H": lambda a: HADAMARD, "X": lambda a: PAULI_X, "Y": lambda a: PAULI_Y,
                 "Z": lambda a: PAULI_Z, "Rz": _rz, "Rx": _rx}
ANGLED = {"Rz", "Rx", "CP", "ZZ"}
GATE_NAMES = tuple(sorted(set(_PRIMITIVE_1Q) | {"CP", "ZZ", "CNOT", "SWAP", "custom"}))


def build_gate(name, angle=None, matrix=None):
    """
    Construct a gate. Composite gates are built from their primitives so the
    noise pipeline can attach one channel per primitive:
      ZZ(a)   = CP(-2a) . Rz(a) x Rz(a)        (= exp(-i a/2 Z x Z) up to phase)
      CNOT    = H_t . CP(pi) . H_t              (targets = [control, target])
      SWAP    = CNOT(j,i) . CNOT(i,j) . CNOT(j,i)
    """
    if name in ANGLED and angle is None:
        raise ValueError("gate %s requires an angle" % name)
    if name in _PRIMITIVE_1Q:
        return UnitaryGate(name, _PRIMITIVE_1Q[name](angle), angle=angle if name in ANGLED else None)
    if name == "CP":
        return UnitaryGate("CP", _cp(angle), angle=angle)
    if name == "ZZ":
        prims = [(build_gate("Rz", angle), (0,)), (build_gate("Rz", angle), (1,)),
                 (build_gate("CP", -2.0 * angle), (0, 1))]
        return UnitaryGate("ZZ", _compose_local(prims, 2), angle=angle, primitives=prims)
    if name == "CNOT":
        h = build_gate("H")
        prims = [(h, (1,)), (build_gate("CP", math.pi), (0, 1)), (h, (1,))]
        return UnitaryGate("CNOT", _compose_local(prims, 2), primitives=prims)
    if name == "SWAP":
        prims = []
        cnot = build_gate("CNOT")
        for local in ((1, 0), (0, 1), (1, 0)):
            for g, sub in cnot.primitives:
                prims.append((g, tuple(local[s] for s in sub)))
        return UnitaryGate("SWAP", _compose_local(prims, 2), primitives=prims)
    if name == "custom":
        if matrix is None:
            raise ValueError("custom gate requires a matrix")
        return UnitaryGate("custom", matrix)
    raise ValueError("unknown gate name: %r" % (name,))


def primitive_sequence(gate):
    """[(primitive gate, local positions)] for any gate, composites expanded."""
    if gate.is_composite:
        return list(gate.primitives)
    return [(gate, tuple(range(gate.arity)))]


def unitary_equal_up_to_phase(u, v, atol=1e-9):
    """True when |tr(U^dag V)|/dim = 1 within atol."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        return False
    overlap = abs(np.trace(u.conj().T @ v)) / u.shape[0]
    return bool(abs(overlap - 1.0) <= atol)


__all__ = (
    "DensityMatrix", "UnitaryGate", "KrausChannel",
    "apply_unitary", "apply_channel", "apply_matrix", "embed", "partial_trace",
    "fidelity", "population_fidelity", "single_qubit_error_prob",
    "build_gate", "primitive_sequence", "unitary_equal_up_to_phase",
    "PAULIS", "HADAMARD", "GATE_NAMES",
)
