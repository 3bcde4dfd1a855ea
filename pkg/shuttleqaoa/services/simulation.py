# shuttleqaoa/services/simulation.py
"""
Noisy execution of compiled schedules on the unit-cell density matrix and
the derived figures of merit: F, p_1q, F_r, epsilon, optimal velocity and
maximal circuit depth.
"""

import dataclasses
import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericalError
from .architectures import ArchitectureSpec, compile_schedule
from .channels import (CoherenceParams, GateErrorParams, SpamModel, SpamParams, gate_error_channels,
                       hop_channel, idle_channel, pauli_channel)
from .metrics import METRICS
from .parity import ZZ_ANGLE_FACTOR, qaoa_circuit, unit_cell_layout
from .quantum_core import (MAX_QUBITS, DensityMatrix, apply_channel, apply_unitary, build_gate, fidelity,
                           population_fidelity, primitive_sequence, single_qubit_error_prob)
from .schema import SweepPoint
from .valley import ShuttleParams, ValleyDistribution, shuttle_channel

log = logging.getLogger(__name__)

COHERENT_BLOCKS = ("init", "sqg_in", "constraint", "sqg_out")
NOISE_SOURCES = ("gate", "idle", "shuttle", "spam", "hop")
FIDELITY_MODES = ("state", "populations")
DEFAULT_ANGLES = (0.3, 0.4, 0.5)
DEFAULT_VELOCITIES = tuple(float(v) for v in np.geomspace(0.1, 100.0, 62))
LAYERS_PER_ROUND = 9


def _default_valley():
    return ValleyDistribution.from_moments(100.0, 20.0)


@dataclass(frozen=True)
class RunConfig:
    arch: ArchitectureSpec = field(default_factory=ArchitectureSpec)
    gate: GateErrorParams = field(default_factory=GateErrorParams)
    coherence: CoherenceParams = field(default_factory=CoherenceParams)
    shuttle: ShuttleParams = field(default_factory=ShuttleParams)
    valley: ValleyDistribution = field(default_factory=_default_valley)
    spam: SpamParams = field(default_factory=SpamParams)
    angles: tuple = DEFAULT_ANGLES
    rounds: int = 1
    noise_sources: frozenset = frozenset(NOISE_SOURCES)
    faults: tuple = ()
    fidelity_mode: str = "state"
    zz_angle_factor: float = ZZ_ANGLE_FACTOR

    def __post_init__(self):
        unknown = set(self.noise_sources) - set(NOISE_SOURCES)
        if unknown:
            raise ValueError("unknown noise sources: %s" % sorted(unknown))
        if self.fidelity_mode not in FIDELITY_MODES:
            raise ValueError("fidelity_mode must be one of %s" % (FIDELITY_MODES,))
        if int(self.rounds) < 1:
            raise ValueError("rounds must be >= 1")
        if len(self.angles) != 3:
            raise ValueError("angles must be (beta, gamma, omega)")
        for f in self.faults:
            if len(f) != 3 or f[2] not in ("X", "Y", "Z"):
                raise ValueError("fault must be (step_index, qubit, 'X'|'Y'|'Z'), got %r" % (f,))

    @property
    def velocity(self):
        return self.shuttle.velocity_mps

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)

    def with_velocity(self, v):
        return self.replace(shuttle=dataclasses.replace(self.shuttle, velocity_mps=float(v)))

    def with_law(self, law):
        return self.replace(coherence=dataclasses.replace(self.coherence, dephasing_law=law))

    def with_sources(self, *sources):
        return self.replace(noise_sources=frozenset(sources))


@functools.lru_cache(maxsize=64)
def _schedule(arch, angles, rounds, zz_angle_factor):
    layout = unit_cell_layout(arch.kind)
    circuit = qaoa_circuit(layout, [tuple(angles)] * rounds, zz_angle_factor)
    return compile_schedule(circuit, arch, readout=True)


def build_schedule(cfg):
    """Schedule (with readout) for the unit cell of cfg.arch; cached."""
    return _schedule(cfg.arch, tuple(cfg.angles), int(cfg.rounds), float(cfg.zz_angle_factor))


class Action:
    """A unitary (applied to the ideal state only when `ideal`) or an error channel."""
    __slots__ = ("kind", "gate", "channel", "targets", "ideal", "source", "step", "block")

    def __init__(self, kind, targets, step, block, gate=None, channel=None, ideal=True, source=None):
        self.kind = kind
        self.gate = gate
        self.channel = channel
        self.targets = tuple(targets)
        self.ideal = ideal
        self.source = source
        self.step = step
        self.block = block

    def __repr__(self):
        what = self.gate.name if self.kind == "unitary" else self.channel.label
        return "Action(%s %s on %s, step %d)" % (self.kind, what, self.targets, self.step)


_RELABEL_SWAP = build_gate("SWAP")


def _op_actions(op, k, block, cfg, on):
    gate = build_gate(op.name, op.angle)
    logical_frame = op.name == "SWAP"
    for prim, local in primitive_sequence(gate):
        targets = [op.qubits[i] for i in local]
        yield Action("unitary", targets, k, block, gate=prim, ideal=not logical_frame)
        if on("gate"):
            for ch, sub in gate_error_channels(prim.name, cfg.gate):
                yield Action("channel", [targets[i] for i in sub], k, block, channel=ch, source="gate")
    if logical_frame:
        # undo the physical exchange: the logical state stays put, only the noise remains
        yield Action("unitary", op.qubits, k, block, gate=_RELABEL_SWAP, ideal=False)


def _transfer_actions(q, k, block, cfg):
    """SWAP onto an empty sensor dot: only the transferred qubit picks up the primitive errors."""
    for prim, local in primitive_sequence(_RELABEL_SWAP):
        for ch, sub in gate_error_channels(prim.name, cfg.gate):
            if local[sub[0]] == 0:
                yield Action("channel", [q], k, block, channel=ch, source="gate")


def iter_actions(schedule, cfg, blocks=COHERENT_BLOCKS, measured=None):
    """
    Walk the schedule in time order. Qubits in `measured` (updated in place
    by measure steps) no longer receive channels.
    """
    gt = schedule.spec.gate_times()
    v = cfg.velocity
    sources = cfg.noise_sources
    on = sources.__contains__
    measured = set() if measured is None else measured
    spam = SpamModel(cfg.spam)
    faults = {}
    for k, q, p in cfg.faults:
        faults.setdefault(int(k), []).append((int(q), p))

    for k, step in enumerate(schedule.steps):
        if blocks is not None and step.block not in blocks:
            continue
        for op in step.ops:
            for act in _op_actions(op, k, step.block, cfg, on):
                yield act
        for q, evs in enumerate(step.events):
            if q in measured:
                continue
            for e in evs:
                ch, src = None, e.kind
                if e.kind == "idle" and on("idle"):
                    ch = idle_channel(e.duration.evaluate(v, gt), cfg.coherence)
                elif e.kind == "shuttle" and on("shuttle"):
                    ch = shuttle_channel(float(e.distance_um) * 1000.0, v, cfg.shuttle, cfg.valley, cfg.coherence)
                elif e.kind == "hop" and on("hop"):
                    ch = hop_channel(schedule.spec.hop_error)
                elif e.kind == "init" and on("spam"):
                    ch, src = spam.init_channel(), "spam"
                elif e.kind == "transfer" and on("gate"):
                    for act in _transfer_actions(q, k, step.block, cfg):
                        yield act
                if ch is not None:
                    yield Action("channel", [q], k, step.block, channel=ch, source=src)
        for q, evs in enumerate(step.events):
            if any(e.kind == "measure" for e in evs):
                measured.add(q)
        for q, pauli in faults.get(k, ()):
            yield Action("channel", [q], k, step.block, channel=pauli_channel(pauli), source="fault")


def _check_size(n):
    if n > MAX_QUBITS:
        raise ValueError("%d qubits exceed the dense-simulation limit of %d" % (n, MAX_QUBITS))


def run_schedule(schedule, cfg, blocks=COHERENT_BLOCKS):
    """(rho_id, rho_err): unitaries only vs unitaries plus every enabled channel."""
    n = schedule.n_qubits
    _check_size(n)
    rho_id = DensityMatrix.basis(n)
    rho_err = rho_id.copy()
    applied = 0
    for act in iter_actions(schedule, cfg, blocks):
        if act.kind == "unitary":
            if act.ideal:
                rho_id = apply_unitary(rho_id, act.gate, act.targets)
            rho_err = apply_unitary(rho_err, act.gate, act.targets)
        else:
            rho_err = apply_channel(rho_err, act.channel, act.targets)
            applied += 1
    METRICS.increment("sim.runs")
    METRICS.increment("sim.channels_applied", applied)
    return rho_id, rho_err


class BudgetEntry:
    __slots__ = ("step", "block", "source", "qubits", "error")

    def __init__(self, step, block, source, qubits, error):
        self.step = step
        self.block = block
        self.source = source
        self.qubits = qubits
        self.error = error

    def __repr__(self):
        return "BudgetEntry(%d %s/%s %s e=%.3g)" % (self.step, self.block, self.source, self.qubits, self.error)


def error_budget(schedule, cfg, blocks=COHERENT_BLOCKS):
    """
    First-order infidelity 1 - tr(rho C(rho)) of every channel, evaluated on
    the noiseless trajectory.
    """
    n = schedule.n_qubits
    _check_size(n)
    rho = DensityMatrix.basis(n)
    out = []
    for act in iter_actions(schedule, cfg, blocks):
        if act.kind == "unitary":
            rho = apply_unitary(rho, act.gate, act.targets)
            continue
        after = apply_channel(rho, act.channel, act.targets)
        e = 1.0 - float(np.real(np.vdot(rho.matrix, after.matrix)))
        out.append(BudgetEntry(act.step, act.block, act.source, act.targets, max(e, 0.0)))
    return out


def budget_fidelity(entries):
    """Product-of-channels fidelity estimate."""
    return float(np.prod([1.0 - e.error for e in entries])) if entries else 1.0


def readout_fidelity(rho_pre, schedule, cfg, mode=None):
    """
    Per-qubit fidelity of the readout-step idle/shuttle/transfer noise,
    F_multi ** (1/n), with channels only on qubits not yet measured. Mode
    "state" takes the Uhlmann fidelity of the multi-qubit state, "populations"
    only compares computational-basis populations.
    """
    mode = mode or cfg.fidelity_mode
    n = schedule.n_qubits
    rho = rho_pre
    measured = set()
    for act in iter_actions(schedule, cfg, blocks=("readout",), measured=measured):
        if act.kind == "channel":
            rho = apply_channel(rho, act.channel, act.targets)
        else:
            rho = apply_unitary(rho, act.gate, act.targets)
    f = population_fidelity(rho_pre, rho) if mode == "populations" else fidelity(rho_pre, rho)
    return f ** (1.0 / n)


def epsilon(p_1q, F_r, F_m):
    """Probability of an error on one qubit after a round: 1 - (1 - p_1q) F_r F_m."""
    for name, val in (("p_1q", p_1q), ("F_r", F_r), ("F_m", F_m)):
        if not 0.0 <= val <= 1.0:
            raise ValueError("%s=%r outside [0, 1]" % (name, val))
    return 1.0 - (1.0 - p_1q) * F_r * F_m


class RunResult:
    __slots__ = ("F", "p_1q", "F_r", "F_m", "epsilon", "rho_id", "rho_err")

    def __init__(self, F, p_1q, F_r, F_m, eps, rho_id=None, rho_err=None):
        self.F = F
        self.p_1q = p_1q
        self.F_r = F_r
        self.F_m = F_m
        self.epsilon = eps
        self.rho_id = rho_id
        self.rho_err = rho_err

    def to_dict(self):
        return {"F": self.F, "p_1q": self.p_1q, "F_r": self.F_r, "F_m": self.F_m, "epsilon": self.epsilon}

    def __repr__(self):
        return "RunResult(F=%.6f, p_1q=%.4g, F_r=%.6f, eps=%.4g)" % (self.F, self.p_1q, self.F_r, self.epsilon)


def evaluate(cfg, schedule=None):
    """Full pipeline for one configuration."""
    schedule = schedule or build_schedule(cfg)
    rho_id, rho_err = run_schedule(schedule, cfg)
    try:
        rho_err.check(herm_atol=1e-10, trace_atol=1e-8, psd_atol=1e-8)
    except ValueError as exc:
        raise NumericalError("noisy state left the density-matrix set: %s" % exc)
    F = fidelity(rho_id, rho_err)
    p_1q = single_qubit_error_prob(F, schedule.n_qubits)
    F_r = readout_fidelity(rho_id, schedule, cfg)
    F_m = SpamModel(cfg.spam).measurement_fidelity if "spam" in cfg.noise_sources else 1.0
    return RunResult(F, p_1q, F_r, F_m, epsilon(p_1q, F_r, F_m), rho_id, rho_err)


# ---- sweeps ----

@dataclass(frozen=True)
class SweepGrid:
    velocities: tuple = DEFAULT_VELOCITIES
    means: tuple = (50.0, 100.0, 200.0)
    stds: tuple = (20.0, 30.0)
    laws: tuple = ("linear",)
    architectures: tuple = ("spin_bus",)
    # T2 per architecture kind in µs; missing kinds keep the base config
    T2_us: tuple = ()

    def __post_init__(self):
        for name in ("velocities", "means", "stds", "laws", "architectures"):
            if not getattr(self, name):
                raise ValueError("sweep grid axis %s is empty" % name)

    def points(self, base):
        t2 = dict(self.T2_us)
        out = []
        for arch in self.architectures:
            for law in self.laws:
                for mean in self.means:
                    for std in self.stds:
                        try:
                            dist = ValleyDistribution.from_moments(mean, std)
                        except ValueError as exc:
                            if arch == self.architectures[0] and law == self.laws[0]:
                                log.warning("skipping Ev=%g±%g: %s", mean, std, exc)
                            METRICS.increment("sweep.points_skipped", len(self.velocities))
                            continue
                        coh = base.coherence
                        if arch in t2:
                            coh = dataclasses.replace(coh, T2_ns=float(t2[arch]) * 1000.0)
                        cfg = base.replace(arch=base.arch.with_kind(arch) if arch != base.arch.kind else base.arch,
                                           valley=dist, coherence=dataclasses.replace(coh, dephasing_law=law))
                        for v in self.velocities:
                            out.append(cfg.with_velocity(v))
        return out

    def size(self):
        """Grid size before moment pairs no Rice distribution can have are dropped."""
        return (len(self.velocities) * len(self.means) * len(self.stds) * len(self.laws)
                * len(self.architectures))


class SweepResult:
    __slots__ = ("points", "metadata")

    def __init__(self, points, metadata=None):
        self.points = list(points)
        self.metadata = dict(metadata or {})

    def families(self):
        fam = {}
        for p in self.points:
            fam.setdefault(p.family(), []).append(p)
        for pts in fam.values():
            pts.sort(key=lambda p: p.velocity_mps)
        return fam

    def slice(self, architecture=None, law=None, mean_Ev=None, std_Ev=None):
        pts = [p for p in self.points
               if (architecture is None or p.architecture == architecture)
               and (law is None or p.law == law)
               and (mean_Ev is None or p.mean_Ev == mean_Ev)
               and (std_Ev is None or p.std_Ev == std_Ev)]
        return sorted(pts, key=lambda p: p.velocity_mps)

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return "SweepResult(points=%d)" % len(self.points)


def _point(cfg):
    with METRICS.timer("sweep.point"):
        try:
            res = evaluate(cfg)
        except Exception:
            METRICS.increment("sweep.points_error")
            raise
    METRICS.increment("sweep.points_ok")
    log.info("%s %s Ev=%g±%g v=%.4g m/s: eps=%.5f", cfg.arch.kind, cfg.coherence.dephasing_law,
             cfg.valley.mean_Ev, cfg.valley.std_Ev, cfg.velocity, res.epsilon)
    return SweepPoint(cfg.arch.kind, cfg.coherence.dephasing_law, cfg.valley.mean_Ev, cfg.valley.std_Ev,
                      cfg.velocity, cfg.coherence.T2_ns / 1000.0, res.F, res.p_1q, res.F_r, res.F_m,
                      min(max(res.epsilon, 0.0), 1.0))


def sweep(base, grid, workers=1):
    """Evaluate every grid point; results keep grid order whatever the worker count."""
    cfgs = grid.points(base)
    if not cfgs:
        raise ConfigError(["sweep: no grid point has feasible valley moments"])
    if workers <= 1:
        points = [_point(c) for c in cfgs]
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            points = list(pool.map(_point, cfgs))
    return SweepResult(points)


def optimal_velocity(velocities, epsilons):
    """
    Grid argmin refined by the vertex of the parabola through the minimum and
    its neighbors (in linear v). Ties go to the smaller velocity; a minimum on
    the grid edge is returned as is, with a warning.
    """
    v = np.asarray(velocities, dtype=float)
    e = np.asarray(epsilons, dtype=float)
    if v.size == 0 or v.size != e.size:
        raise ValueError("need matching non-empty velocity and epsilon arrays")
    order = np.argsort(v, kind="stable")
    v, e = v[order], e[order]
    i = int(np.argmin(e))
    if i == 0 or i == v.size - 1:
        log.warning("minimum at the grid edge v=%.4g m/s; slice is monotone", v[i])
        return float(v[i]), float(e[i])
    x0, x1, x2 = v[i - 1:i + 2]
    y0, y1, y2 = e[i - 1:i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a <= 0:
        return float(x1), float(y1)
    c = y0 - a * x0 * x0 - b * x0
    vx = -b / (2.0 * a)
    vx = min(max(vx, x0), x2)
    return float(vx), float(a * vx * vx + b * vx + c)


def max_depth(f1, p1, f2, p2, eps_target):
    """Layers until the accumulated error reaches eps_target: log(1/eps) / 2(f1 p1 + f2 p2)."""
    if not 0.0 < eps_target <= 1.0:
        raise ValueError("eps_target must lie in (0, 1], got %r" % eps_target)
    rate = f1 * p1 + f2 * p2
    if not rate > 0:
        raise ValueError("f1 p1 + f2 p2 must be positive")
    return math.log(1.0 / eps_target) / (2.0 * rate)


TWO_QUBIT_SYMBOLS = ("T_ZZ", "T_CNOT", "T_SWAP", "T_2q")


def layer_error_rates(schedule, cfg):
    """
    (f1, p1, f2, p2): shares of single- and two-qubit gate layers in the
    coherent blocks and the per-qubit error per layer of each kind, with one
    QAOA round spanning LAYERS_PER_ROUND layers. Channel errors are
    attributed by block: init and single-qubit blocks feed p1, the constraint
    block feeds p2.
    """
    n1 = n2 = 0
    for s in schedule.steps:
        if s.block not in COHERENT_BLOCKS or s.kind != "gate":
            continue
        if any(sym in s.duration.terms for sym in TWO_QUBIT_SYMBOLS):
            n2 += 1
        else:
            n1 += 1
    e1 = e2 = 0.0
    for entry in error_budget(schedule, cfg):
        if entry.block == "constraint":
            e2 += entry.error
        else:
            e1 += entry.error
    nq = schedule.n_qubits
    total = n1 + n2
    if not total:
        raise ValueError("schedule has no gate layers")
    layers = LAYERS_PER_ROUND * int(cfg.rounds)
    p1 = e1 * total / (n1 * nq * layers) if n1 else 0.0
    p2 = e2 * total / (n2 * nq * layers) if n2 else 0.0
    return n1 / total, p1, n2 / total, p2


def max_depth_from_budget(cfg, eps_target=0.1, schedule=None):
    """(D_max, rounds) with rounds = D_max / layers per QAOA round."""
    schedule = schedule or build_schedule(cfg)
    f1, p1, f2, p2 = layer_error_rates(schedule, cfg)
    d = max_depth(f1, p1, f2, p2, eps_target)
    return d, d / LAYERS_PER_ROUND
