# shuttleqaoa/services/channels.py

import logging
import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import I2, PAULI_X, PAULI_Y, PAULI_Z, KrausChannel

log = logging.getLogger(__name__)

NS_PER_US = 1_000.0
NS_PER_S = 1_000_000_000.0


def check_probability(p, name="p"):
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise ValueError("%s must be a number, got %r" % (name, p))
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError("%s=%r outside [0, 1]" % (name, p))
    return value


def clamp_probability(p, label, upper=1.0):
    """Clamp a perturbative probability estimate, warning when it overflows."""
    if p > upper:
        log.warning("%s probability %.4g clamped to %.4g", label, p, upper)
        return upper
    return max(float(p), 0.0)


# ---- parameter blocks ----

@dataclass(frozen=True)
class GateErrorParams:
    p_d: float = 1e-3
    p_phi: float = 1e-3
    p_b: float = 1e-6

    def __post_init__(self):
        for name in ("p_d", "p_phi", "p_b"):
            check_probability(getattr(self, name), name)


@dataclass(frozen=True)
class CoherenceParams:
    """Times in ns. Infinite times switch the corresponding process off."""
    T1_ns: float = 1.0 * NS_PER_S
    T2_ns: float = 100.0 * NS_PER_US
    dephasing_law: str = "linear"

    def __post_init__(self):
        if not self.T1_ns > 0 or not self.T2_ns > 0:
            raise ValueError("T1 and T2 must be positive")
        if self.dephasing_law not in ("linear", "gaussian"):
            raise ValueError("dephasing_law must be 'linear' or 'gaussian', got %r" % self.dephasing_law)
        if math.isfinite(self.T1_ns) and self.T2_ns > 2.0 * self.T1_ns:
            raise ValueError("unphysical coherence: T2 > 2 T1")


@dataclass(frozen=True)
class SpamParams:
    F_m: float = 0.999
    charge_detect_error: float = 1e-5
    T_r_ns: float = 5.0 * NS_PER_US

    def __post_init__(self):
        check_probability(self.F_m, "F_m")
        check_probability(self.charge_detect_error, "charge_detect_error")
        if not self.T_r_ns > 0:
            raise ValueError("T_r must be positive")


# ---- elementary channels ----

def identity_channel():
    return KrausChannel([I2], "identity")


def depolarizing_channel(p):
    p = check_probability(p)
    return KrausChannel([
        math.sqrt(1.0 - p) * I2,
        math.sqrt(p / 3.0) * PAULI_X,
        math.sqrt(p / 3.0) * PAULI_Y,
        math.sqrt(p / 3.0) * PAULI_Z,
    ], "depolarizing(%.3g)" % p)


def dephasing_channel(p):
    p = check_probability(p)
    return KrausChannel([math.sqrt(1.0 - p) * I2, math.sqrt(p) * PAULI_Z], "dephasing(%.3g)" % p)


def bit_flip_channel(p):
    p = check_probability(p)
    return KrausChannel([math.sqrt(1.0 - p) * I2, math.sqrt(p) * PAULI_X], "bit_flip(%.3g)" % p)


def amplitude_damping_channel(p):
    p = check_probability(p)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return KrausChannel([k0, k1], "amplitude_damping(%.3g)" % p)


def phase_damping_channel(lam):
    """Coherences scale by sqrt(1 - lam); lam = 1 dephases completely."""
    lam = check_probability(lam, "lambda")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - lam)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, math.sqrt(lam)]], dtype=complex)
    return KrausChannel([k0, k1], "phase_damping(%.3g)" % lam)


def pauli_channel(name):
    """Deterministic Pauli fault (used for fault injection)."""
    return KrausChannel([{"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}[name]], "fault(%s)" % name)


def dephasing_relaxation_channel(p_phi, p_relax, label):
    """
    Phase damping with lambda = p_phi followed by amplitude damping. Both
    probabilities are expected clamped to [0, 1] already.
    """
    ch = phase_damping_channel(p_phi)
    return ch.compose(amplitude_damping_channel(p_relax), label)


# ---- idle ----

def idle_probabilities(t_ns, coherence):
    """(p_phi, p_relax) for an idle period of t_ns."""
    t = float(t_ns)
    if t < 0:
        raise ValueError("idle time must be >= 0, got %r" % t_ns)
    ratio = t / coherence.T2_ns
    if ratio > 0.5:
        log.warning("idle time %.4g ns exceeds T2/2 (%.4g ns)", t, coherence.T2_ns / 2.0)
    p_phi = ratio if coherence.dephasing_law == "linear" else ratio * ratio
    p_relax = t / coherence.T1_ns
    return clamp_probability(p_phi, "idle dephasing"), clamp_probability(p_relax, "idle relaxation")


def idle_channel(t_ns, coherence):
    if t_ns == 0:
        return identity_channel()
    p_phi, p_relax = idle_probabilities(t_ns, coherence)
    return dephasing_relaxation_channel(p_phi, p_relax, "idle(%.4g ns)" % t_ns)


# ---- gates ----

def gate_error_channels(primitive_name, params):
    """
    Error channels attached after a primitive, as (channel, local positions):
    depolarizing for every single-qubit primitive; phase flip then bit flip on
    each qubit of a CP.
    """
    if primitive_name == "CP":
        ch = dephasing_channel(params.p_phi).compose(bit_flip_channel(params.p_b), "cp_error")
        return [(ch, (0,)), (ch, (1,))]
    return [(depolarizing_channel(params.p_d), (0,))]


def hop_channel(hop_error):
    """Single hop between neighboring dots: error split evenly into dephasing and bit flip."""
    half = check_probability(hop_error, "hop_error") / 2.0
    return dephasing_channel(half).compose(bit_flip_channel(half), "hop(%.3g)" % hop_error)


# ---- SPAM ----

class SpamModel:
    """Classical readout confusion plus an initialization bit flip."""
    __slots__ = ("params", "confusion", "init_flip")

    def __init__(self, params):
        self.params = params
        self.confusion = 1.0 - params.F_m * (1.0 - params.charge_detect_error)
        self.init_flip = 1.0 - params.F_m

    @property
    def measurement_fidelity(self):
        return 1.0 - self.confusion

    def init_channel(self):
        return bit_flip_channel(self.init_flip)

    def agreement_probability(self):
        """Probability that two independent readouts of the same spin agree."""
        q = self.confusion
        return (1.0 - q) ** 2 + q * q

    def sample_readout(self, bits, shots, rng):
        """Noisy readouts of a fixed bitstring, shape (shots, len(bits))."""
        b = np.asarray(bits, dtype=np.int8)
        flips = rng.random((int(shots), b.size)) < self.confusion
        return np.bitwise_xor(b[None, :], flips.astype(np.int8))

    def __repr__(self):
        return "SpamModel(confusion=%.4g, init_flip=%.4g)" % (self.confusion, self.init_flip)


def spam_channels(params):
    model = SpamModel(params)
    return model.init_channel(), model
