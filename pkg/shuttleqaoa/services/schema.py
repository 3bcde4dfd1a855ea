# shuttleqaoa/services/schema.py

import logging
import math

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _as_float(value, name):
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise ValueError("%s must be a number, got %r" % (name, value))
    if math.isnan(f):
        raise ValueError("%s is NaN" % name)
    return f


def _prob(value, name):
    f = _as_float(value, name)
    if not 0.0 <= f <= 1.0:
        raise ValueError("%s=%r outside [0, 1]" % (name, f))
    return f


class _Record:
    """Flat record: constructor keywords match CSV columns."""
    __slots__ = ()
    FIELDS = ()

    def to_dict(self):
        return {k: getattr(self, k) for k in self.FIELDS}

    @classmethod
    def from_dict(cls, data):
        if data is None:
            raise ValueError("%s.from_dict received None" % cls.__name__)
        missing = [k for k in cls.FIELDS if k not in data]
        if missing:
            raise ValueError("%s missing fields %s" % (cls.__name__, missing))
        return cls(**{k: data[k] for k in cls.FIELDS})

    def row(self):
        return [getattr(self, k) for k in self.FIELDS]

    def __eq__(self, other):
        return type(other) is type(self) and self.to_dict() == other.to_dict()

    def __repr__(self):
        inner = " ".join("%s=%s" % (k, getattr(self, k)) for k in self.FIELDS[:4])
        return "<%s %s>" % (type(self).__name__, inner)


class SweepPoint(_Record):
    """One grid point of a velocity / valley-distribution sweep."""
    FIELDS = ("architecture", "law", "mean_Ev", "std_Ev", "velocity_mps", "T2_us",
              "F", "p_1q", "F_r", "F_m", "epsilon")
    __slots__ = FIELDS

    def __init__(self, architecture, law, mean_Ev, std_Ev, velocity_mps, T2_us, F, p_1q, F_r, F_m, epsilon):
        self.architecture = str(architecture)
        self.law = str(law)
        self.mean_Ev = _as_float(mean_Ev, "mean_Ev")
        self.std_Ev = _as_float(std_Ev, "std_Ev")
        self.velocity_mps = _as_float(velocity_mps, "velocity_mps")
        self.T2_us = _as_float(T2_us, "T2_us")
        self.F = _prob(F, "F")
        self.p_1q = _prob(p_1q, "p_1q")
        self.F_r = _prob(F_r, "F_r")
        self.F_m = _prob(F_m, "F_m")
        self.epsilon = _prob(epsilon, "epsilon")

    def family(self):
        return (self.architecture, self.law, self.mean_Ev, self.std_Ev, self.T2_us)


class PFailPoint(_Record):
    FIELDS = ("N", "K", "n", "rule", "x", "epsilon", "threshold", "p_fail", "jump")
    __slots__ = FIELDS

    def __init__(self, N, K, n, rule, x, epsilon, threshold, p_fail, jump=False):
        self.N = int(N)
        self.K = int(K)
        self.n = int(n)
        self.rule = str(rule)
        self.x = _prob(x, "x")
        self.epsilon = _prob(epsilon, "epsilon")
        self.threshold = int(threshold)
        self.p_fail = _prob(p_fail, "p_fail")
        self.jump = bool(jump) if not isinstance(jump, str) else jump.lower() == "true"


class XMaxPoint(_Record):
    FIELDS = ("rule", "epsilon", "x_max", "N_min", "N_max")
    __slots__ = FIELDS

    def __init__(self, rule, epsilon, x_max, N_min, N_max):
        self.rule = str(rule)
        self.epsilon = _prob(epsilon, "epsilon")
        self.x_max = _prob(x_max, "x_max")
        self.N_min = int(N_min)
        self.N_max = int(N_max)


class McPoint(_Record):
    """Recursion vs Monte Carlo comparison at one error count m."""
    FIELDS = ("N", "n", "m", "expected", "mc_mean", "mc_se", "z", "trials")
    __slots__ = FIELDS

    def __init__(self, N, n, m, expected, mc_mean, mc_se, z, trials):
        self.N = int(N)
        self.n = int(n)
        self.m = int(m)
        self.expected = _as_float(expected, "expected")
        self.mc_mean = _as_float(mc_mean, "mc_mean")
        self.mc_se = _as_float(mc_se, "mc_se")
        self.z = _as_float(z, "z")
        self.trials = int(trials)
