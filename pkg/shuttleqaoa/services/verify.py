# shuttleqaoa/services/verify.py
"""
Oracle suites run by the `verify` command. Each check records the measured
value, the tolerance it was held to and whether it passed.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import VerificationError
from .architectures import ArchitectureSpec, Duration, compile_schedule, schedule_totals, variant_diff
from .channels import (CoherenceParams, amplitude_damping_channel, bit_flip_channel, dephasing_channel,
                       depolarizing_channel, hop_channel, idle_channel)
from .decoding_stats import TreeStatsConfig, expected_incorrect_trees, monte_carlo_trees, x_max
from .metrics import METRICS
from .parity import (ZZ_ANGLE_FACTOR, circuit_unitary, constraint_circuit, constraint_unitary, qaoa_round_circuit,
                     qaoa_unitary, rectangular_layout, unit_cell_layout)
from .quantum_core import DensityMatrix, apply_channel, build_gate, unitary_equal_up_to_phase
from .valley import ValleyDistribution, mean_valley_excitation, mean_valley_excitation_mc

log = logging.getLogger(__name__)

SUITES = ("circuit", "schedule", "quadrature", "channels", "decoding")
OMEGAS = (0.0, 0.3, 1.1, math.pi / 2, 2.7)

CNOT_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
SWAP_MATRIX = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

BUS_DISTANCES = ("42.5", "62.5", "26.25", "61.25")
BUS_IDLES = ("46.25", "26.25", "62.5", "27.5")
MODULAR_DISTANCES = (40, 60, 40, 60) * 2
MODULAR_IDLES = (80, 60, 80, 60) * 2
WALL_DIFFERENCE_UM = 10


@dataclass
class VerifyOptions:
    zz_angle_factor: float = ZZ_ANGLE_FACTOR
    unitary_atol: float = 1e-9
    quadrature_cases: int = 10
    quadrature_samples: int = 10_000_000
    channel_trials: int = 10_000
    mc_trials: int = 100_000
    mc_sizes: tuple = (4, 5, 6, 8)
    z_tolerance: float = 3.0
    seed: int = 0
    suites: tuple = SUITES


class CheckResult:
    __slots__ = ("suite", "name", "passed", "value", "tolerance", "detail")

    def __init__(self, suite, name, passed, value=None, tolerance=None, detail=""):
        self.suite = suite
        self.name = name
        self.passed = bool(passed)
        self.value = value
        self.tolerance = tolerance
        self.detail = detail

    def to_dict(self):
        return {"suite": self.suite, "name": self.name, "passed": self.passed,
                "value": self.value, "tolerance": self.tolerance, "detail": self.detail}

    def __repr__(self):
        return "CheckResult(%s/%s %s)" % (self.suite, self.name, "ok" if self.passed else "FAIL")


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, check):
        self.checks.append(check)
        METRICS.increment("verify.pass" if check.passed else "verify.fail")
        if not check.passed:
            log.warning("check failed: %s/%s value=%s tol=%s %s", check.suite, check.name,
                        check.value, check.tolerance, check.detail)
        return check

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return ["%s/%s" % (c.suite, c.name) for c in self.checks if not c.passed]

    def raise_for_failures(self):
        if not self.passed:
            raise VerificationError(self.failed())

    def table(self):
        lines = ["%-10s %-44s %-6s %-14s %s" % ("suite", "check", "result", "value", "tolerance")]
        for c in self.checks:
            value = "%.4g" % c.value if isinstance(c.value, float) else str(c.value)
            lines.append("%-10s %-44s %-6s %-14s %s" % (c.suite, c.name, "PASS" if c.passed else "FAIL",
                                                         value, c.tolerance))
        lines.append("%d/%d checks passed" % (sum(c.passed for c in self.checks), len(self.checks)))
        return "\n".join(lines)

    def to_dict(self):
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _phase_distance(u, v):
    return abs(abs(np.trace(np.asarray(u).conj().T @ np.asarray(v))) / u.shape[0] - 1.0)


# ---- suites ----

def check_circuits(report, opts):
    atol = opts.unitary_atol
    alpha = math.pi / 7
    z = np.diag([1.0, -1.0])
    zz_target = np.diag(np.exp(-0.5j * alpha * np.diag(np.kron(z, z))))
    for name, gate, target in (("ZZ(pi/7) decomposition", build_gate("ZZ", alpha), zz_target),
                               ("CNOT = H CP(pi) H", build_gate("CNOT"), CNOT_MATRIX),
                               ("SWAP = 3 CNOT", build_gate("SWAP"), SWAP_MATRIX)):
        d = _phase_distance(gate.matrix, target)
        report.add(CheckResult("circuit", name, d <= atol, d, atol))

    layouts = (("2x3 open", rectangular_layout(2, 3)),
               ("spin-bus cell", unit_cell_layout("spin_bus")),
               ("modular cell", unit_cell_layout("modular")))
    for label, layout in layouts:
        worst = 0.0
        for omega in OMEGAS:
            u = circuit_unitary(constraint_circuit(layout, omega, opts.zz_angle_factor))
            worst = max(worst, _phase_distance(u, constraint_unitary(layout, omega)))
        report.add(CheckResult("circuit", "constraint %s" % label, worst <= atol, worst, atol,
                               "omega in %s" % (list(round(o, 4) for o in OMEGAS),)))

    layout = rectangular_layout(2, 3, field_strengths={q: 0.25 * (q + 1) for q in range(6)})
    u = circuit_unitary(qaoa_round_circuit(layout, 0.3, 0.4, 0.5, opts.zz_angle_factor))
    d = _phase_distance(u, qaoa_unitary(layout, 0.3, 0.4, 0.5))
    report.add(CheckResult("circuit", "QAOA round 2x3", d <= atol, d, atol))


def _totals(kind, blocks=("constraint",)):
    spec = ArchitectureSpec(kind)
    layout = unit_cell_layout(kind)
    sched = compile_schedule(qaoa_round_circuit(layout, 0.3, 0.4, 0.5), spec, readout=False)
    return sched, schedule_totals(sched, blocks)


def check_schedules(report, opts):
    _, bus = _totals("spin_bus")
    dist = [Fraction(d) for d in BUS_DISTANCES]
    idle = [Duration(Fraction(i), {"T_ZZ": 2}) for i in BUS_IDLES]
    report.add(CheckResult("schedule", "spin-bus distances", bus.distances() == dist,
                           [float(d) for d in bus.distances()], "exact"))
    report.add(CheckResult("schedule", "spin-bus idles", bus.idles() == idle,
                           [repr(i) for i in bus.idles()], "exact"))

    swap_sched, mod = _totals("modular")
    report.add(CheckResult("schedule", "modular distances",
                           mod.distances() == [Fraction(d) for d in MODULAR_DISTANCES],
                           [float(d) for d in mod.distances()], "exact"))
    mod_idle = [Duration(i, {"T_ZZ": 2, "T_CNOT": 2}) for i in MODULAR_IDLES]
    report.add(CheckResult("schedule", "modular idles", mod.idles() == mod_idle,
                           [repr(i) for i in mod.idles()], "exact"))
    swaps = [t.counts["SWAP"] for t in mod.qubits]
    report.add(CheckResult("schedule", "modular SWAP count", swaps == [10] * 8, swaps, "10 per qubit"))

    hop_sched, hop = _totals("modular_hop")
    counts = [(t.counts["SWAP"], t.counts["hop"]) for t in hop.qubits]
    report.add(CheckResult("schedule", "hop variant SWAP/hop count", counts == [(2, 8)] * 8, counts,
                           "2 SWAP + 8 hop"))
    diff = variant_diff(swap_sched, hop_sched)
    only_swaps = all(kind_a == "gate" and label_a.startswith("L") for _, label_a, kind_a, _, _ in diff)
    report.add(CheckResult("schedule", "hop variant touches only SWAP layers", only_swaps and len(diff) == 8,
                           len(diff), "8 layers"))

    round_blocks = ("sqg_in", "constraint", "sqg_out")
    bus_wall = schedule_totals(_totals("spin_bus")[0], round_blocks).wall
    mod_wall = schedule_totals(swap_sched, round_blocks).wall
    delta = mod_wall.per_v_um - bus_wall.per_v_um
    report.add(CheckResult("schedule", "round wall time bus vs modular", delta == WALL_DIFFERENCE_UM,
                           float(delta), "%d µm/v" % WALL_DIFFERENCE_UM,
                           "bus %r, modular %r" % (bus_wall, mod_wall)))


def check_quadrature(report, opts):
    rng = np.random.default_rng(opts.seed)
    worst = 0.0
    for k in range(int(opts.quadrature_cases)):
        mean = float(rng.uniform(50.0, 200.0))
        std = float(rng.uniform(10.0, 25.0))
        v = float(10 ** rng.uniform(0.0, 1.7))
        dist = ValleyDistribution.from_moments(mean, std)
        quad = mean_valley_excitation(dist, v, 20.0)
        mc, se = mean_valley_excitation_mc(dist, v, 20.0, opts.quadrature_samples, seed=opts.seed + k)
        z = abs(quad - mc) / se if se > 0 else 0.0
        worst = max(worst, z)
        log.debug("quadrature case %d: Ev=%.1f±%.1f v=%.3g quad=%.6g mc=%.6g z=%.2f",
                  k, mean, std, v, quad, mc, z)
    report.add(CheckResult("quadrature", "quadrature vs Monte Carlo (%d cases)" % opts.quadrature_cases,
                           worst <= opts.z_tolerance, worst, "%.1f SE" % opts.z_tolerance))


def _random_channel(rng):
    kind = int(rng.integers(0, 6))
    p = float(rng.uniform(0.0, 1.0))
    if kind == 0:
        return depolarizing_channel(p)
    if kind == 1:
        return dephasing_channel(p)
    if kind == 2:
        return bit_flip_channel(p)
    if kind == 3:
        return amplitude_damping_channel(p)
    if kind == 4:
        return hop_channel(p)
    coh = CoherenceParams(T1_ns=1e9, T2_ns=1e5, dephasing_law=("linear", "gaussian")[int(rng.integers(0, 2))])
    return idle_channel(float(rng.uniform(0.0, 5e4)), coh)


def check_channels(report, opts):
    rng = np.random.default_rng(opts.seed)
    worst_trace = worst_herm = worst_eig = 0.0
    for _ in range(int(opts.channel_trials)):
        n = int(rng.integers(1, 4))
        rho = DensityMatrix.random(n, rng)
        ch = _random_channel(rng)
        out = apply_channel(rho, ch, [int(rng.integers(0, n))]).matrix
        worst_trace = max(worst_trace, abs(np.trace(out) - 1.0))
        worst_herm = max(worst_herm, float(np.max(np.abs(out - out.conj().T))))
        worst_eig = max(worst_eig, -float(np.linalg.eigvalsh((out + out.conj().T) / 2.0).min()))
    report.add(CheckResult("channels", "trace preserved", worst_trace <= 1e-10, float(worst_trace), 1e-10))
    report.add(CheckResult("channels", "Hermiticity preserved", worst_herm <= 1e-12, worst_herm, 1e-12))
    report.add(CheckResult("channels", "positivity preserved", worst_eig <= 1e-10, worst_eig, 1e-10))


def check_decoding(report, opts):
    cfg = TreeStatsConfig(4, 4)
    hand = (expected_incorrect_trees(cfg, 1), expected_incorrect_trees(cfg, 2))
    report.add(CheckResult("decoding", "N=4 n=4 recursion hand cases", hand == (2.0, 3.0), hand, "exact"))
    N_range = range(4, 21)
    edges = (x_max(N_range, "N", 0.0), x_max(N_range, "N", 0.5))
    report.add(CheckResult("decoding", "x_max at eps 0 and 1/2", edges == (1.0, 0.0), edges, "exact"))
    for N in opts.mc_sizes:
        for rule_n in (N, 2 * N):
            stats = monte_carlo_trees(TreeStatsConfig(N, rule_n, epsilon=0.05), trials=opts.mc_trials,
                                      seed=opts.seed)
            z = stats.max_z()
            report.add(CheckResult("decoding", "recursion vs Monte Carlo N=%d n=%d" % (N, rule_n),
                                   z <= opts.z_tolerance, z, "%.1f SE" % opts.z_tolerance))


SUITE_RUNNERS = {
    "circuit": check_circuits,
    "schedule": check_schedules,
    "quadrature": check_quadrature,
    "channels": check_channels,
    "decoding": check_decoding,
}


def run_verification(opts=None):
    opts = opts or VerifyOptions()
    unknown = set(opts.suites) - set(SUITES)
    if unknown:
        raise ValueError("unknown verify suites: %s" % sorted(unknown))
    report = VerificationReport()
    for suite in SUITES:
        if suite not in opts.suites:
            continue
        with METRICS.timer("verify.%s" % suite):
            SUITE_RUNNERS[suite](report, opts)
    return report
