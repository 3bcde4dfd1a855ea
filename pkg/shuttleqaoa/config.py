# shuttleqaoa/config.py

import copy
import logging
import os
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .services.architectures import KINDS, ArchitectureSpec
from .services.cache import CacheManager
from .services.channels import NS_PER_S, NS_PER_US, CoherenceParams, GateErrorParams, SpamParams
from .services.decoding_stats import RULES
from .services.simulation import FIDELITY_MODES, NOISE_SOURCES, RunConfig, SweepGrid
from .services.valley import ShuttleParams, ValleyDistribution
from .services.verify import SUITES, VerifyOptions

log = logging.getLogger(__name__)

LAWS = ("linear", "gaussian")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Config:
    """Process-level settings from the environment."""
    def __init__(self):
        self.BASE_DIR = Path(__file__).resolve().parent.parent
        self.CONFIG_DIR = self.BASE_DIR / "configs"

        self.OUTPUT_DIR = os.getenv("SHUTTLEQAOA_OUTPUT_DIR", "results").strip() or "results"

        try:
            self.WORKERS = int(os.getenv("SHUTTLEQAOA_WORKERS", "1"))
        except Exception:
            self.WORKERS = 1

        self.LOG_LEVEL = os.getenv("SHUTTLEQAOA_LOG_LEVEL", "INFO").strip().upper() or "INFO"

    def validate(self):
        """List of problems; empty when the environment is usable."""
        errors = []
        if self.WORKERS < 1:
            errors.append("SHUTTLEQAOA_WORKERS must be >= 1")
        if self.LOG_LEVEL not in LOG_LEVELS:
            errors.append("SHUTTLEQAOA_LOG_LEVEL must be one of %s" % ", ".join(LOG_LEVELS))
        return errors


# ---- experiment files ----

def _float(lo=None, hi=None, lo_open=False):
    def check(value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return None, "expected a number, got %r" % (value,)
        v = float(value)
        if lo is not None and (v < lo or (lo_open and v == lo)):
            return None, "must be %s %g" % (">" if lo_open else ">=", lo)
        if hi is not None and v > hi:
            return None, "must be <= %g" % hi
        return v, None
    return check


def _int(lo=None):
    def check(value):
        if isinstance(value, bool) or not isinstance(value, int):
            return None, "expected an integer, got %r" % (value,)
        if lo is not None and value < lo:
            return None, "must be >= %d" % lo
        return value, None
    return check


def _choice(options):
    def check(value):
        if value not in options:
            return None, "must be one of %s, got %r" % (list(options), value)
        return value, None
    return check


def _optional(inner):
    def check(value):
        return (None, None) if value is None else inner(value)
    return check


def _list(inner, min_len=1):
    def check(value):
        if not isinstance(value, list):
            return None, "expected a list, got %r" % (value,)
        if len(value) < min_len:
            return None, "needs at least %d entries" % min_len
        out = []
        for k, item in enumerate(value):
            v, err = inner(item)
            if err:
                return None, "entry %d: %s" % (k, err)
            out.append(v)
        return out, None
    return check


def _string(value):
    if not isinstance(value, str) or not value.strip():
        return None, "expected a non-empty string"
    return value, None


def _velocities(value):
    """Explicit list, or {min_mps, max_mps, points} log-spaced."""
    if isinstance(value, list):
        return _list(_float(0.0, lo_open=True))(value)
    if isinstance(value, dict):
        unknown = set(value) - {"min_mps", "max_mps", "points"}
        if unknown:
            return None, "unknown keys %s" % sorted(unknown)
        lo, e1 = _float(0.0, lo_open=True)(value.get("min_mps", 0.1))
        hi, e2 = _float(0.0, lo_open=True)(value.get("max_mps", 100.0))
        n, e3 = _int(1)(value.get("points", 62))
        err = e1 or e2 or e3
        if err:
            return None, err
        if hi < lo:
            return None, "max_mps must be >= min_mps"
        return [float(v) for v in np.geomspace(lo, hi, n)], None
    return None, "expected a list or a {min_mps, max_mps, points} mapping"


def _t2_overrides(value):
    if not isinstance(value, dict):
        return None, "expected a mapping architecture -> T2 in µs"
    out = {}
    for k, v in value.items():
        if k not in KINDS:
            return None, "unknown architecture %r" % (k,)
        f, err = _float(0.0, lo_open=True)(v)
        if err:
            return None, "%s: %s" % (k, err)
        out[k] = f
    return out, None


PROB = _float(0.0, 1.0)
POSITIVE = _float(0.0, lo_open=True)

SCHEMA = {
    "seed": _int(0),
    "workers": _int(1),
    "output_dir": _string,
    "velocity_mps": POSITIVE,
    "architecture": {
        "kind": _choice(KINDS),
        "T_1q_ns": POSITIVE,
        "T_2q_ns": POSITIVE,
        "T_hop_ns": POSITIVE,
        "readout_path_um": _optional(_float(0.0)),
        "hop_error": PROB,
    },
    "noise": {
        "p_d": PROB,
        "p_phi": PROB,
        "p_b": PROB,
        "T1_s": POSITIVE,
        "T2_us": POSITIVE,
        "dephasing_law": _choice(LAWS),
        "F_m": PROB,
        "charge_detect_error": PROB,
        "T_r_us": POSITIVE,
        "dot_size_nm": POSITIVE,
        "noise_corr_length_um": POSITIVE,
        "transverse_flip_rate": PROB,
        "sources": _list(_choice(NOISE_SOURCES), min_len=0),
        "fidelity_mode": _choice(FIDELITY_MODES),
    },
    "valley": {
        "mean_ueV": POSITIVE,
        "std_ueV": POSITIVE,
    },
    "angles": {
        "beta": _float(),
        "gamma": _float(),
        "omega": _float(),
        "rounds": _int(1),
    },
    "sweep": {
        "velocities": _velocities,
        "means_ueV": _list(POSITIVE),
        "stds_ueV": _list(POSITIVE),
        "laws": _list(_choice(LAWS)),
        "architectures": _list(_choice(KINDS)),
        "T2_us": _t2_overrides,
    },
    "decode_stats": {
        "N_min": _int(3),
        "N_max": _int(3),
        "rules": _list(_choice(RULES)),
        "x": _float(0.0, 1.0, lo_open=True),
        "epsilons": _list(PROB),
        "x_max_epsilons": _list(PROB),
        "mc_trials": _int(2),
        "mc_sizes": _list(_int(3)),
        "mc_epsilon": PROB,
    },
    "verify": {
        "suites": _list(_choice(SUITES)),
        "quadrature_cases": _int(1),
        "quadrature_samples": _int(2),
        "channel_trials": _int(1),
        "mc_trials": _int(2),
        "z_tolerance": POSITIVE,
    },
}

DEFAULTS = {
    "seed": 0,
    "workers": None,
    "output_dir": None,
    "velocity_mps": 10.0,
    "architecture": {
        "kind": "spin_bus",
        "T_1q_ns": 100.0,
        "T_2q_ns": 50.0,
        "T_hop_ns": 50.0,
        "readout_path_um": None,
        "hop_error": 0.004,
    },
    "noise": {
        "p_d": 1e-3,
        "p_phi": 1e-3,
        "p_b": 1e-6,
        "T1_s": 1.0,
        "T2_us": 100.0,
        "dephasing_law": "linear",
        "F_m": 0.999,
        "charge_detect_error": 1e-5,
        "T_r_us": 5.0,
        "dot_size_nm": 20.0,
        "noise_corr_length_um": 1.0,
        "transverse_flip_rate": 1e-4,
        "sources": list(NOISE_SOURCES),
        "fidelity_mode": "state",
    },
    "valley": {"mean_ueV": 100.0, "std_ueV": 20.0},
    "angles": {"beta": 0.3, "gamma": 0.4, "omega": 0.5, "rounds": 1},
    "sweep": {
        "velocities": [float(v) for v in np.geomspace(0.1, 100.0, 62)],
        "means_ueV": [50.0, 100.0, 200.0],
        "stds_ueV": [20.0, 30.0],
        "laws": ["linear"],
        "architectures": ["spin_bus"],
        "T2_us": {},
    },
    "decode_stats": {
        "N_min": 4,
        "N_max": 20,
        "rules": ["N", "2N"],
        "x": 0.9,
        "epsilons": [0.037],
        "x_max_epsilons": [float(e) for e in np.linspace(0.0, 0.2, 10)],
        "mc_trials": 100_000,
        "mc_sizes": [4, 5, 6, 8],
        "mc_epsilon": 0.05,
    },
    "verify": {
        "suites": list(SUITES),
        "quadrature_cases": 10,
        "quadrature_samples": 10_000_000,
        "channel_trials": 10_000,
        "mc_trials": 100_000,
        "z_tolerance": 3.0,
    },
}


def _line_index(text):
    """Dotted key path -> 1-based line of the key in the YAML source."""
    index = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return index

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for key, val in node.value:
                path = "%s.%s" % (prefix, key.value) if prefix else str(key.value)
                index[path] = key.start_mark.line + 1
                walk(val, path)

    if root is not None:
        walk(root, "")
    return index


def _validate(data, schema, prefix, problems, lines):
    out = {}
    for key, value in data.items():
        path = "%s.%s" % (prefix, key) if prefix else str(key)
        where = " (line %d)" % lines[path] if path in lines else ""
        if key not in schema:
            problems.append("%s: unknown key%s" % (path, where))
            continue
        rule = schema[key]
        if isinstance(rule, dict):
            if not isinstance(value, dict):
                problems.append("%s: expected a mapping%s" % (path, where))
                continue
            out[key] = _validate(value, rule, path, problems, lines)
        else:
            v, err = rule(value)
            if err:
                problems.append("%s: %s%s" % (path, err, where))
            else:
                out[key] = v
    return out


def _merge(base, overlay):
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict) and key != "T2_us":
            _merge(base[key], value)
        else:
            base[key] = value
    return base


def parse_experiment(text, path=None):
    """Validated, defaults-filled experiment from YAML text."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = " at line %d" % (mark.line + 1) if mark is not None else ""
        raise ConfigError(["YAML syntax error%s: %s" % (line, getattr(exc, "problem", exc))], path)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a mapping"], path)
    problems = []
    clean = _validate(raw, SCHEMA, "", problems, _line_index(text))
    data = _merge(copy.deepcopy(DEFAULTS), clean)
    ds = data["decode_stats"]
    if ds["N_max"] < ds["N_min"]:
        problems.append("decode_stats.N_max: must be >= N_min")
    if problems:
        raise ConfigError(problems, path)
    return ExperimentConfig(data, path)


def load_experiment(path=None):
    """Experiment config from a YAML file; None gives the defaults."""
    if path is None:
        return ExperimentConfig(copy.deepcopy(DEFAULTS))
    if not os.path.isfile(path):
        raise ConfigError(["file not found"], path)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_experiment(text, path)


class ExperimentConfig:
    """Resolved experiment settings plus builders for the service objects."""
    __slots__ = ("data", "path")

    def __init__(self, data, path=None):
        self.data = data
        self.path = path

    def with_overrides(self, seed=None, workers=None, output_dir=None, velocity=None, architecture=None,
                       law=None):
        """Copy with command-line values applied; sweep axes collapse to the given value."""
        data = copy.deepcopy(self.data)
        if seed is not None:
            data["seed"] = int(seed)
        if workers is not None:
            data["workers"] = int(workers)
        if output_dir is not None:
            data["output_dir"] = str(output_dir)
        if velocity is not None:
            data["velocity_mps"] = float(velocity)
            data["sweep"]["velocities"] = [float(velocity)]
        if architecture is not None:
            data["architecture"]["kind"] = architecture
            data["sweep"]["architectures"] = [architecture]
        if law is not None:
            data["noise"]["dephasing_law"] = law
            data["sweep"]["laws"] = [law]
        return ExperimentConfig(data, self.path)

    @property
    def seed(self):
        return self.data["seed"]

    def workers(self, env=None):
        """File or flag value, else the environment, else 1."""
        if self.data["workers"] is not None:
            return self.data["workers"]
        return env.WORKERS if env is not None else 1

    def output_dir(self, env=None):
        return self.data["output_dir"] or (env.OUTPUT_DIR if env is not None else "results")

    def config_hash(self):
        """Hash of everything that can change results; workers and output location excluded."""
        return CacheManager.config_hash({k: v for k, v in self.data.items() if k not in ("workers", "output_dir")})

    def _build(self, field, fn):
        try:
            return fn()
        except ValueError as exc:
            raise ConfigError(["%s: %s" % (field, exc)], self.path)

    def architecture(self):
        a = self.data["architecture"]
        return self._build("architecture", lambda: ArchitectureSpec(
            a["kind"], a["T_1q_ns"], a["T_2q_ns"], self.data["noise"]["T_r_us"] * NS_PER_US, a["T_hop_ns"],
            a["readout_path_um"], a["hop_error"]))

    def run_config(self):
        n = self.data["noise"]
        v = self.data["valley"]
        ang = self.data["angles"]
        gate = self._build("noise", lambda: GateErrorParams(n["p_d"], n["p_phi"], n["p_b"]))
        coherence = self._build("noise", lambda: CoherenceParams(n["T1_s"] * NS_PER_S, n["T2_us"] * NS_PER_US,
                                                                  n["dephasing_law"]))
        shuttle = self._build("noise", lambda: ShuttleParams(n["dot_size_nm"], n["noise_corr_length_um"] * 1000.0,
                                                             self.data["velocity_mps"], n["transverse_flip_rate"]))
        spam = self._build("noise", lambda: SpamParams(n["F_m"], n["charge_detect_error"], n["T_r_us"] * NS_PER_US))
        valley = self._build("valley", lambda: ValleyDistribution.from_moments(v["mean_ueV"], v["std_ueV"]))
        return self._build("noise", lambda: RunConfig(
            arch=self.architecture(), gate=gate, coherence=coherence, shuttle=shuttle, valley=valley, spam=spam,
            angles=(ang["beta"], ang["gamma"], ang["omega"]), rounds=ang["rounds"],
            noise_sources=frozenset(n["sources"]), fidelity_mode=n["fidelity_mode"]))

    def sweep_grid(self):
        s = self.data["sweep"]
        return self._build("sweep", lambda: SweepGrid(
            velocities=tuple(s["velocities"]), means=tuple(s["means_ueV"]), stds=tuple(s["stds_ueV"]),
            laws=tuple(s["laws"]), architectures=tuple(s["architectures"]),
            T2_us=tuple(sorted(s["T2_us"].items()))))

    def decode_stats(self):
        ds = dict(self.data["decode_stats"])
        ds["N_values"] = list(range(ds["N_min"], ds["N_max"] + 1))
        return ds

    def verify_options(self, zz_angle_factor=None):
        vf = self.data["verify"]
        opts = VerifyOptions(quadrature_cases=vf["quadrature_cases"], quadrature_samples=vf["quadrature_samples"],
                             channel_trials=vf["channel_trials"], mc_trials=vf["mc_trials"],
                             z_tolerance=vf["z_tolerance"], seed=self.seed, suites=tuple(vf["suites"]))
        if zz_angle_factor is not None:
            opts.zz_angle_factor = float(zz_angle_factor)
        return opts

    def to_dict(self):
        return copy.deepcopy(self.data)

    def __repr__(self):
        return "ExperimentConfig(path=%s, hash=%s)" % (self.path, self.config_hash()[:12])
