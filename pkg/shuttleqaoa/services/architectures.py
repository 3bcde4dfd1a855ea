# shuttleqaoa/services/architectures.py
"""
Compile unit-cell QAOA circuits into lock-step timed schedules for the
spin-bus and modular shuttling architectures.

Every step is a barrier: the step lasts as long as its slowest qubit and
all other qubits are padded with idle time. Durations are kept symbolic
(a µm/v coefficient plus gate-time terms) so totals compare exactly.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ArchitectureError
from .channels import check_probability
from .parity import CONSTRAINT_TAGS, QUBIT_NAMES, GateOp

log = logging.getLogger(__name__)

KINDS = ("spin_bus", "modular", "modular_hop")
BLOCKS = ("init", "sqg_in", "constraint", "sqg_out", "readout")
SYMBOLS = ("T_1q", "T_2q", "T_ZZ", "T_CNOT", "T_SWAP", "T_hop", "T_r")

SINGLE_QUBIT_GATES = ("H", "X", "Y", "Z", "Rx", "Rz")
GATE_SYMBOL = {"ZZ": "T_ZZ", "CNOT": "T_CNOT", "SWAP": "T_SWAP", "CP": "T_2q"}
GATE_SYMBOL.update({g: "T_1q" for g in SINGLE_QUBIT_GATES})


def _um(*values):
    return tuple(Fraction(str(v)) for v in values)


class Duration:
    """per_v_um / v + sum coeff * T_symbol; exact rational coefficients."""
    __slots__ = ("per_v_um", "terms")

    def __init__(self, per_v_um=0, terms=None):
        self.per_v_um = Fraction(per_v_um)
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}
        unknown = set(self.terms) - set(SYMBOLS)
        if unknown:
            raise ValueError("unknown duration symbols: %s" % sorted(unknown))

    @classmethod
    def gate(cls, symbol, count=1):
        return cls(0, {symbol: count})

    @classmethod
    def shuttle(cls, distance_um):
        return cls(distance_um)

    def __add__(self, other):
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return Duration(self.per_v_um + other.per_v_um, terms)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, k):
        return Duration(self.per_v_um * k, {s: c * k for s, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Duration) and self.per_v_um == other.per_v_um and self.terms == other.terms

    def __hash__(self):
        return hash((self.per_v_um, tuple(sorted(self.terms.items()))))

    def is_zero(self):
        return self.per_v_um == 0 and not self.terms

    def evaluate(self, v_mps, gate_times):
        """Nanoseconds at velocity v (m/s == nm/ns)."""
        ns = 0.0
        if self.per_v_um:
            if not v_mps or v_mps <= 0:
                raise ValueError("a shuttle duration needs a positive velocity")
            ns += float(self.per_v_um) * 1000.0 / float(v_mps)
        for sym, c in self.terms.items():
            ns += float(c) * float(gate_times[sym])
        return ns

    def to_dict(self):
        return {"per_v_um": float(self.per_v_um),
                "gate_terms": {k: float(c) for k, c in sorted(self.terms.items())}}

    def __repr__(self):
        parts = []
        if self.per_v_um:
            parts.append("%s µm/v" % _fmt(self.per_v_um))
        for sym in SYMBOLS:
            if sym in self.terms:
                c = self.terms[sym]
                parts.append(sym if c == 1 else "%s %s" % (_fmt(c), sym))
        return " + ".join(parts) if parts else "0"


def _fmt(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else ("%g" % float(x))


ZERO = Duration()


@dataclass(frozen=True)
class ArchitectureSpec:
    kind: str = "spin_bus"
    T_1q_ns: float = 100.0
    T_2q_ns: float = 50.0
    T_r_ns: float = 5000.0
    T_hop_ns: float = 50.0
    readout_path_um: float = None
    hop_error: float = 0.004

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("architecture kind must be one of %s, got %r" % (KINDS, self.kind))
        for name in ("T_1q_ns", "T_2q_ns", "T_r_ns", "T_hop_ns"):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be positive" % name)
        check_probability(self.hop_error, "hop_error")
        if self.readout_path_um is None:
            object.__setattr__(self, "readout_path_um", 10.0 if self.kind == "spin_bus" else 0.0)
        if self.readout_path_um < 0:
            raise ValueError("readout_path_um must be >= 0")

    @property
    def n_qubits(self):
        return 4 if self.kind == "spin_bus" else 8

    @property
    def T_ZZ_ns(self):
        return self.T_2q_ns + self.T_1q_ns

    @property
    def T_CNOT_ns(self):
        return self.T_2q_ns + 2.0 * self.T_1q_ns

    @property
    def T_SWAP_ns(self):
        return 3.0 * self.T_CNOT_ns

    def gate_times(self):
        return {"T_1q": self.T_1q_ns, "T_2q": self.T_2q_ns, "T_ZZ": self.T_ZZ_ns,
                "T_CNOT": self.T_CNOT_ns, "T_SWAP": self.T_SWAP_ns, "T_hop": self.T_hop_ns,
                "T_r": self.T_r_ns}

    def with_kind(self, kind):
        return ArchitectureSpec(kind, self.T_1q_ns, self.T_2q_ns, self.T_r_ns, self.T_hop_ns,
                                None, self.hop_error)


class Event:
    """One qubit's activity inside a step."""
    __slots__ = ("kind", "qubit", "duration", "distance_um", "op", "role")

    def __init__(self, kind, qubit, duration, distance_um=0, op=None, role=None):
        self.kind = kind
        self.qubit = int(qubit)
        self.duration = duration
        self.distance_um = Fraction(distance_um)
        self.op = op
        self.role = role

    def to_dict(self, v_mps=None, gate_times=None):
        d = {"kind": self.kind, "qubit": self.qubit, "duration": self.duration.to_dict()}
        if self.distance_um:
            d["distance_um"] = float(self.distance_um)
        if self.role:
            d["role"] = self.role
        if self.op is not None:
            d["gate"] = self.op.name
        if v_mps is not None:
            d["duration_ns"] = self.duration.evaluate(v_mps, gate_times)
            if self.distance_um:
                d["distance_nm"] = float(self.distance_um) * 1000.0
        return d

    def __repr__(self):
        return "Event(%s, q%d, %r)" % (self.kind, self.qubit, self.duration)


class Step:
    """
    Barrier step. `events[q]` is the tuple of events of qubit q; their
    durations always add up to the step duration.
    """
    __slots__ = ("block", "kind", "label", "duration", "events", "ops")

    def __init__(self, block, kind, label, duration, events, ops=None):
        if block not in BLOCKS:
            raise ValueError("unknown block %r" % (block,))
        self.block = block
        self.kind = kind
        self.label = label
        self.duration = duration
        self.events = [tuple(e) for e in events]
        self.ops = list(ops or [])
        for q, evs in enumerate(self.events):
            total = ZERO
            for e in evs:
                total = total + e.duration
            if total != duration:
                raise ArchitectureError("step %s: qubit %d busy for %r, step lasts %r"
                                        % (label, q, total, duration))

    def to_dict(self, v_mps=None, gate_times=None):
        d = {"block": self.block, "kind": self.kind, "label": self.label,
             "duration": self.duration.to_dict(),
             "events": [[e.to_dict(v_mps, gate_times) for e in evs] for evs in self.events]}
        if self.ops:
            d["ops"] = [op.to_dict() for op in self.ops]
        if v_mps is not None:
            d["duration_ns"] = self.duration.evaluate(v_mps, gate_times)
        return d

    def __repr__(self):
        return "Step(%s/%s %s, %r)" % (self.block, self.kind, self.label, self.duration)


class Schedule:
    __slots__ = ("kind", "n_qubits", "steps", "qubit_names", "spec")

    def __init__(self, spec, steps, qubit_names=None):
        self.spec = spec
        self.kind = spec.kind
        self.n_qubits = spec.n_qubits
        self.steps = list(steps)
        self.qubit_names = tuple(qubit_names or QUBIT_NAMES["spin_bus" if self.kind == "spin_bus" else "modular"])

    def extend(self, steps):
        return Schedule(self.spec, self.steps + list(steps), self.qubit_names)

    def blocks(self):
        return sorted({s.block for s in self.steps}, key=BLOCKS.index)

    def wall_time(self, blocks=None):
        total = ZERO
        for s in self.steps:
            if blocks is None or s.block in blocks:
                total = total + s.duration
        return total

    def to_dict(self, v_mps=None):
        gt = self.spec.gate_times()
        return {"kind": self.kind, "qubits": list(self.qubit_names),
                "gate_times_ns": gt, "velocity_mps": v_mps,
                "wall_time": self.wall_time().to_dict(),
                "steps": [s.to_dict(v_mps, gt if v_mps is not None else None) for s in self.steps]}

    def __repr__(self):
        return "Schedule(%s, steps=%d)" % (self.kind, len(self.steps))


# ---- step builders ----

def _gate_step(block, label, ops, n_qubits):
    if not ops:
        return None
    symbols = {GATE_SYMBOL.get(op.name) for op in ops}
    if None in symbols or len(symbols) != 1:
        raise ArchitectureError("step %s mixes gate durations or has unknown gates: %s" % (label, ops))
    dur = Duration.gate(symbols.pop())
    busy = {}
    for op in ops:
        for pos, q in enumerate(op.qubits):
            if op.name == "CNOT":
                role = ("control", "target")[pos]
            elif op.name in ("ZZ", "SWAP", "CP"):
                role = op.name.lower()
            else:
                role = "single"
            busy[q] = Event("gate", q, dur, op=op, role=role)
    events = [(busy[q],) if q in busy else (Event("idle", q, dur),) for q in range(n_qubits)]
    return Step(block, "gate", label, dur, events, ops)


def _shuttle_step(block, label, distances):
    dist = _um(*distances)
    longest = max(dist)
    if longest == 0:
        return None
    dur = Duration.shuttle(longest)
    events = []
    for q, L in enumerate(dist):
        evs = []
        if L:
            evs.append(Event("shuttle", q, Duration.shuttle(L), distance_um=L))
        if L != longest:
            evs.append(Event("idle", q, Duration.shuttle(longest - L)))
        events.append(tuple(evs))
    return Step(block, "shuttle", label, dur, events)


def _uniform_step(block, kind, label, dur, active, n_qubits, role=None):
    """`active` qubits carry a `kind` event, the rest idle for the same time."""
    events = []
    for q in range(n_qubits):
        if q in active:
            events.append((Event(kind, q, dur, role=role),))
        elif dur.is_zero():
            events.append(())
        else:
            events.append((Event("idle", q, dur),))
    return Step(block, kind, label, dur, events)


def init_steps(spec):
    n = spec.n_qubits
    events = [(Event("init", q, ZERO, role="init"),) for q in range(n)]
    return [Step("init", "init", "init", ZERO, events)]


# ---- site model ----

def _check_colocated(sites, op, label):
    if len(op.qubits) < 2:
        return
    where = set()
    for q, (ox, oy) in zip(op.qubits, op.offsets):
        zone, ix, iy = sites[q]
        where.add((zone, ix + ox, iy + oy))
    if len(where) != 1:
        raise ArchitectureError("step %s: %s operands are not co-located (%s)" % (label, op, sorted(where)))


class _Compiler:
    """Replays one architecture's move table against a circuit."""

    # subclasses define: START, CONSTRAINT (sequence), SQG_IN_SHUTTLE, SQG_OUT_SHUTTLES

    def __init__(self, spec):
        self.spec = spec
        self.n = spec.n_qubits
        self.sites = dict(self.START)
        self.steps = []

    def add(self, step):
        if step is not None:
            self.steps.append(step)

    def gate(self, block, label, ops):
        for op in ops:
            _check_colocated(self.sites, op, label)
        self.add(_gate_step(block, label, ops, self.n))

    def shuttle(self, block, label, distances, moves=None):
        self.add(_shuttle_step(block, label, distances))
        for q, site in (moves or {}).items():
            self.sites[q] = site

    def sqg(self, block, steps):
        shuttles = self.SQG_SHUTTLES[block]
        if shuttles:
            self.shuttle(block, "%s.shuttle" % block, shuttles[0])
        for st in steps:
            self.gate(block, st.tag, st.ops)
        for extra in shuttles[1:]:
            self.shuttle(block, "%s.return" % block, extra)

    def constraint(self, by_tag):
        raise NotImplementedError

    def run(self, circuit):
        if circuit.n_qubits != self.n:
            raise ArchitectureError("%s unit cell has %d qubits, circuit has %d"
                                    % (self.spec.kind, self.n, circuit.n_qubits))
        steps = list(circuit.steps)
        i = 0
        while i < len(steps):
            tag = steps[i].tag
            if tag in ("prep", "driver"):
                j = i
                while j < len(steps) and steps[j].tag in ("prep", "driver"):
                    j += 1
                self.sqg("sqg_in", steps[i:j])
                i = j
            elif tag in CONSTRAINT_TAGS:
                block = steps[i:i + len(CONSTRAINT_TAGS)]
                if [s.tag for s in block] != list(CONSTRAINT_TAGS):
                    raise ArchitectureError("constraint block must run %s in order, got %s"
                                            % (CONSTRAINT_TAGS, [s.tag for s in block]))
                self.constraint({s.tag: s.ops for s in block})
                i += len(CONSTRAINT_TAGS)
            elif tag == "problem":
                self.sqg("sqg_out", [steps[i]])
                i += 1
            else:
                raise ArchitectureError("unsupported circuit step %r" % (tag,))
        return self.steps


class _SpinBusCompiler(_Compiler):
    # q1..q4 = indices 0..3
    START = {0: ("mz_b", 0, 0), 1: ("mz_a", 0, 0), 2: ("mz_a", 0, 0), 3: ("mz_b", 0, 0)}
    SQG_SHUTTLES = {
        "sqg_in": [(8.75, 2.5, 6.25, 6.25)],
        "sqg_out": [(8.75, 2.5, 6.25, 6.25), (1.25, 2.5, 1.25, 3.75)],
    }
    # (shuttle label, distances µm, site moves) before each constraint gate step
    MOVES = {
        "eo1": None,
        "eo2": ("EO2", (5, 5, 0, 0), {0: ("mz_a", 0, 0)}),
        "eo3": ("EO3", (12.5, 0, 0, 12.5), {0: ("mz_a", 1, 0)}),
        "eo4": ("EO4", (12.5, 2.5, 5, 0), {0: ("mz_b", 0, 0)}),
        "oe1": ("OE1", (0, 17.5, 2.5, 17.5), {1: ("mz_a", 0, 1), 3: ("mz_b", 0, -1)}),
        "oe2": ("OE2", (0, 5, 5, 0), {2: ("mz_b", 0, -1)}),
        "oe3": ("OE3.1", (0, 8.75, 0, 8.75), {3: ("mz_b", 1, -1)}),
        "oe4": ("OE3.2", (0, 5, 5, 8.75), {3: ("mz_b", 0, -1), 2: ("mz_a", 0, 0)}),
    }
    RETURN = ("OE4", (12.5, 18.75, 8.75, 13.75))

    def constraint(self, by_tag):
        for tag in CONSTRAINT_TAGS:
            move = self.MOVES[tag]
            if move:
                self.shuttle("constraint", move[0], move[1], move[2])
            self.gate("constraint", tag, by_tag[tag])
        self.shuttle("constraint", self.RETURN[0], self.RETURN[1], dict(self.START))


class _ModularCompiler(_Compiler):
    # 1a 2a 3a 4a 1b 2b 3b 4b = indices 0..7; register a holds 0..3
    START = {q: ("reg_a" if q < 4 else "reg_b", 0, 0) for q in range(8)}
    SQG_SHUTTLES = {"sqg_in": [], "sqg_out": []}
    ROW_MOVE = (0, 0, 10, 15, 0, 0, 10, 15)
    TOP_MOVE = (20, 30, 0, 0, 20, 30, 0, 0)
    # SWAP layers that the hop variant trades for single-dot hops
    HOP_LAYERS = frozenset((1, 2, 3, 4, 7, 8, 9, 10))

    def __init__(self, spec, variant):
        super().__init__(spec)
        self.variant = variant
        self.layer = 0

    def _row_sites(self, iy):
        return {q: ("reg_a" if q < 4 else "reg_b", 0, iy) for q in (2, 3, 6, 7)}

    def swap_layer(self):
        self.layer += 1
        k = self.layer
        label = "L%d" % k
        if self.variant == "hop" and k in self.HOP_LAYERS:
            dur = Duration.gate("T_hop")
            self.add(_uniform_step("constraint", "hop", label, dur, range(self.n), self.n, role="hop"))
            return
        pairs = ((0, 1), (2, 3)) if k % 2 else ((0, 2), (1, 3))
        ops = [GateOp("SWAP", (base + a, base + b)) for base in (0, 4) for a, b in pairs]
        self.add(_gate_step("constraint", label, ops, self.n))

    def cnot_by_register(self, tag, ops, order):
        for reg in order:
            part = [op for op in ops if (op.qubits[0] < 4) == (reg == "a")]
            self.gate("constraint", "%s.%s" % (tag, reg), part)

    def constraint(self, by_tag):
        self.layer = 0
        self.gate("constraint", "eo1", by_tag["eo1"])
        self.gate("constraint", "eo2", by_tag["eo2"])
        self.shuttle("constraint", "M1", self.ROW_MOVE, {6: ("reg_a", 0, 0), 7: ("reg_a", 1, 0)})
        self.gate("constraint", "eo3", by_tag["eo3"])
        self.shuttle("constraint", "M2", self.ROW_MOVE, {6: ("reg_b", 0, 0), 7: ("reg_b", 0, 0)})
        self.gate("constraint", "eo4", by_tag["eo4"])

        self.shuttle("constraint", "M3", self.ROW_MOVE, self._row_sites(1))
        self.swap_layer()
        self.swap_layer()
        self.cnot_by_register("oe1", by_tag["oe1"], "a")
        self.swap_layer()
        self.swap_layer()
        self.cnot_by_register("oe1", by_tag["oe1"], "b")
        self.gate("constraint", "oe2", by_tag["oe2"])
        self.shuttle("constraint", "M4", self.TOP_MOVE, {4: ("reg_a", 0, 0), 5: ("reg_a", 1, 0)})
        self.swap_layer()
        self.gate("constraint", "oe3", by_tag["oe3"])
        self.swap_layer()
        self.shuttle("constraint", "M5", self.TOP_MOVE, {4: ("reg_b", 0, 0), 5: ("reg_b", 0, 0)})
        self.swap_layer()
        self.swap_layer()
        self.cnot_by_register("oe4", by_tag["oe4"], "b")
        self.swap_layer()
        self.swap_layer()
        self.cnot_by_register("oe4", by_tag["oe4"], "a")
        self.shuttle("constraint", "M6", self.ROW_MOVE, self._row_sites(0))


def compile_spin_bus(circuit, spec):
    if spec.kind != "spin_bus":
        raise ArchitectureError("spin-bus compiler given a %s spec" % spec.kind)
    steps = init_steps(spec) + _SpinBusCompiler(spec).run(circuit)
    return Schedule(spec, steps)


def compile_modular(circuit, spec, variant=None):
    variant = variant or ("hop" if spec.kind == "modular_hop" else "swap")
    if variant not in ("swap", "hop"):
        raise ValueError("modular variant must be 'swap' or 'hop', got %r" % variant)
    if spec.kind == "spin_bus":
        raise ArchitectureError("modular compiler given a spin_bus spec")
    steps = init_steps(spec) + _ModularCompiler(spec, variant).run(circuit)
    return Schedule(spec, steps)


def append_readout(schedule, spec=None):
    """
    Spin bus: each qubit in turn shuttles to the readout zone and is measured
    while the others idle. Modular: position 1 of both registers is read
    first, positions 2..4 are brought to the sensor by one SWAP transfer each.
    """
    spec = spec or schedule.spec
    n = schedule.n_qubits
    steps = []
    t_r = Duration.gate("T_r")
    if schedule.kind == "spin_bus":
        path = Fraction(str(spec.readout_path_um))
        for q in range(n):
            name = schedule.qubit_names[q]
            if path:
                dist = [path if k == q else 0 for k in range(n)]
                steps.append(_shuttle_step("readout", "readout.%s.shuttle" % name, dist))
            steps.append(_uniform_step("readout", "measure", "readout.%s" % name, t_r, {q}, n, role="measured"))
    else:
        for pos in range(4):
            group = {pos, pos + 4}
            if pos:
                steps.append(_uniform_step("readout", "transfer", "readout.pos%d.transfer" % (pos + 1),
                                           Duration.gate("T_SWAP"), group, n, role="transferred"))
            steps.append(_uniform_step("readout", "measure", "readout.pos%d" % (pos + 1), t_r, group, n,
                                       role="measured"))
    return schedule.extend(steps)


def compile_schedule(circuit, spec, readout=True):
    if spec.kind == "spin_bus":
        sched = compile_spin_bus(circuit, spec)
    else:
        sched = compile_modular(circuit, spec)
    return append_readout(sched, spec) if readout else sched


# ---- totals ----

COUNT_KEYS = ("CNOT_control", "CNOT_target", "ZZ", "SWAP", "1q", "hop", "measure", "transfer")


@dataclass
class QubitTotals:
    distance_um: Fraction = Fraction(0)
    idle: Duration = field(default_factory=Duration)
    counts: dict = field(default_factory=lambda: {k: 0 for k in COUNT_KEYS})

    def to_dict(self):
        return {"distance_um": float(self.distance_um), "idle": self.idle.to_dict(),
                "idle_expr": repr(self.idle), "counts": dict(self.counts)}


class ScheduleTotals:
    __slots__ = ("qubits", "wall", "qubit_names", "blocks")

    def __init__(self, qubits, wall, qubit_names, blocks=None):
        self.qubits = qubits
        self.wall = wall
        self.qubit_names = qubit_names
        self.blocks = blocks

    def distances(self):
        return [t.distance_um for t in self.qubits]

    def idles(self):
        return [t.idle for t in self.qubits]

    def to_dict(self):
        return {"blocks": list(self.blocks) if self.blocks else None,
                "wall": self.wall.to_dict(), "wall_expr": repr(self.wall),
                "qubits": {name: t.to_dict() for name, t in zip(self.qubit_names, self.qubits)}}

    def table(self):
        lines = ["%-6s %12s  %-40s %s" % ("qubit", "shuttle µm", "idle", "counts")]
        for name, t in zip(self.qubit_names, self.qubits):
            counts = " ".join("%s=%d" % (k, c) for k, c in t.counts.items() if c)
            lines.append("%-6s %12s  %-40s %s" % (name, _fmt(t.distance_um), repr(t.idle), counts))
        lines.append("wall: %r" % self.wall)
        return "\n".join(lines)

    def __repr__(self):
        return "ScheduleTotals(wall=%r)" % self.wall


def schedule_totals(schedule, blocks=None):
    """Per-qubit sums of shuttle distance, idle time and gate counts."""
    totals = [QubitTotals() for _ in range(schedule.n_qubits)]
    for step in schedule.steps:
        if blocks is not None and step.block not in blocks:
            continue
        for q, evs in enumerate(step.events):
            t = totals[q]
            for e in evs:
                if e.kind == "shuttle":
                    t.distance_um += e.distance_um
                elif e.kind == "idle":
                    t.idle = t.idle + e.duration
                elif e.kind == "gate":
                    if e.role == "control":
                        t.counts["CNOT_control"] += 1
                    elif e.role == "target":
                        t.counts["CNOT_target"] += 1
                    elif e.role == "zz":
                        t.counts["ZZ"] += 1
                    elif e.role == "swap":
                        t.counts["SWAP"] += 1
                    elif e.role == "single":
                        t.counts["1q"] += 1
                elif e.kind in ("hop", "measure", "transfer"):
                    t.counts[e.kind] += 1
    return ScheduleTotals(totals, schedule.wall_time(blocks), schedule.qubit_names, blocks)


# ---- diagnostics ----

def variant_diff(swap_schedule, hop_schedule):
    """Steps that differ between two schedules, as (index, label_a, kind_a, label_b, kind_b)."""
    if len(swap_schedule.steps) != len(hop_schedule.steps):
        raise ArchitectureError("schedules differ in length: %d vs %d"
                                % (len(swap_schedule.steps), len(hop_schedule.steps)))
    out = []
    for k, (a, b) in enumerate(zip(swap_schedule.steps, hop_schedule.steps)):
        same = (a.kind == b.kind and a.label == b.label and a.duration == b.duration
                and [[(e.kind, e.duration, e.distance_um, e.role) for e in evs] for evs in a.events]
                == [[(e.kind, e.duration, e.distance_um, e.role) for e in evs] for evs in b.events])
        if not same:
            out.append((k, a.label, a.kind, b.label, b.kind))
    return out


def timeline(schedule, v_mps=None):
    """Human-readable one-line-per-step dump."""
    gt = schedule.spec.gate_times()
    lines = []
    t = 0.0
    for k, step in enumerate(schedule.steps):
        if v_mps is not None:
            dt = step.duration.evaluate(v_mps, gt)
            when = "%10.1f ns +%9.1f" % (t, dt)
            t += dt
        else:
            when = "%-26r" % (step.duration,)
        acts = []
        for q, evs in enumerate(step.events):
            busy = [e for e in evs if e.kind != "idle"]
            if not busy:
                continue
            e = busy[0]
            tag = e.kind if e.kind != "shuttle" else "shuttle %s µm" % _fmt(e.distance_um)
            if e.op is not None:
                tag = "%s:%s" % (e.op.name, e.role)
            acts.append("%s[%s]" % (schedule.qubit_names[q], tag))
        lines.append("%3d %-10s %-18s %s  %s" % (k, step.block, step.label, when, " ".join(acts)))
    return "\n".join(lines)
