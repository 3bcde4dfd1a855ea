# shuttleqaoa/services/decoding_stats.py
"""
Spanning-tree decoding statistics: expected number of incorrect trees under
m physical errors, the binomial acceptance threshold, the probability of
accepting a random outcome and the largest x that keeps the threshold
non-decreasing in N. A Monte Carlo over concrete balanced tree sets checks
the recursion.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .metrics import METRICS
from .parity import LogicalProblem, parity_map
from .schema import McPoint, PFailPoint, XMaxPoint
from .trees import enumerate_spanning_trees

log = logging.getLogger(__name__)

RULES = ("N", "2N")
CDF_SLACK = 1e-12
FLOOR_SLACK = 1e-9
X_TOLERANCE = 1e-3
RANDOM_EPSILON = 0.5
MC_CHUNK = 100_000


def n_for_rule(N, rule):
    if rule == "N":
        return int(N)
    if rule == "2N":
        return 2 * int(N)
    raise ValueError("tree-count rule must be one of %s, got %r" % (RULES, rule))


@dataclass(frozen=True)
class TreeStatsConfig:
    N: int
    n: int
    x: float = 0.9
    epsilon: float = 0.01

    def __post_init__(self):
        if int(self.N) < 3:
            raise ValueError("N must be >= 3, got %r" % self.N)
        if int(self.n) < 1:
            raise ValueError("n must be >= 1, got %r" % self.n)
        if not 0.0 < self.x <= 1.0:
            raise ValueError("x must lie in (0, 1], got %r" % self.x)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1], got %r" % self.epsilon)

    @property
    def K(self):
        return self.N * (self.N - 1) // 2

    @classmethod
    def for_rule(cls, N, rule, x=0.9, epsilon=0.01):
        return cls(int(N), n_for_rule(N, rule), x, epsilon)


def incorrect_per_error(cfg):
    """<n_inc>(1) for trees spread evenly over the K physical qubits."""
    N, K, n = cfg.N, cfg.K, cfg.n
    return (2 * n) // N + (n * (N - 1) % K) / K


def incorrect_tree_table(cfg, m_max=None):
    """<n_inc>(m) for m = 0..m_max (default K)."""
    m_max = cfg.K if m_max is None else int(m_max)
    if m_max < 0:
        raise ValueError("m must be >= 0")
    one = incorrect_per_error(cfg)
    table = np.zeros(m_max + 1)
    for m in range(1, m_max + 1):
        prev = table[m - 1]
        table[m] = prev + max(1.0 - prev / cfg.n, 0.0) * one
    return table


def expected_incorrect_trees(cfg, m):
    if int(m) < 0:
        raise ValueError("m must be >= 0, got %r" % m)
    return float(incorrect_tree_table(cfg, int(m))[int(m)])


class NOkDistribution:
    """Distribution of the (floored) number of correct trees; support ascending."""
    __slots__ = ("support", "probs", "epsilon")

    def __init__(self, support, probs, epsilon):
        self.support = np.asarray(support, dtype=int)
        self.probs = np.asarray(probs, dtype=float)
        self.epsilon = float(epsilon)

    def cdf(self):
        return np.cumsum(self.probs)

    def threshold(self, x):
        """Smallest support point whose cumulative mass from below reaches 1 - x."""
        cdf = self.cdf()
        idx = int(np.searchsorted(cdf, 1.0 - x - CDF_SLACK, side="left"))
        return int(self.support[min(idx, self.support.size - 1)])

    def tail(self, t):
        return float(np.clip(self.probs[self.support >= t].sum(), 0.0, 1.0))

    def to_dict(self):
        return {"epsilon": self.epsilon, "support": self.support.tolist(), "probs": self.probs.tolist()}

    def __repr__(self):
        return "NOkDistribution(eps=%.4g, support=%s)" % (self.epsilon, self.support.tolist())


def n_ok_distribution(cfg, epsilon=None):
    """Binomial weights B(m | eps, K) collected on floor(n - <n_inc>(m))."""
    eps = cfg.epsilon if epsilon is None else float(epsilon)
    K = cfg.K
    n_ok = cfg.n - incorrect_tree_table(cfg)
    buckets = np.floor(n_ok + FLOOR_SLACK).astype(int)
    weights = stats.binom.pmf(np.arange(K + 1), K, eps)
    support = np.unique(buckets)
    probs = np.array([weights[buckets == b].sum() for b in support])
    # buckets reachable only through m values of zero weight are not support points
    keep = probs > 0.0
    return NOkDistribution(support[keep], probs[keep], eps)


def threshold_n_ok(cfg):
    return n_ok_distribution(cfg).threshold(cfg.x)


def p_fail(cfg):
    """Mass of the eps = 1/2 distribution at or above the threshold set at cfg.epsilon."""
    t = threshold_n_ok(cfg)
    if t == 0:
        return 1.0
    return n_ok_distribution(cfg, RANDOM_EPSILON).tail(t)


def p_fail_curve(N_values, rule, epsilon, x=0.9):
    """
    p_fail over N. A point whose p_fail rises above its predecessor is
    flagged as a jump.
    """
    points = []
    prev = None
    for N in N_values:
        cfg = TreeStatsConfig.for_rule(N, rule, x, epsilon)
        t = threshold_n_ok(cfg)
        pf = p_fail(cfg)
        jump = prev is not None and pf > prev
        if jump:
            log.warning("p_fail jump at N=%d (rule %s, eps=%.4g): %.4g -> %.4g, threshold %d",
                        N, rule, epsilon, prev, pf, t)
        points.append(PFailPoint(N, cfg.K, cfg.n, rule, x, epsilon, t, pf, jump))
        prev = pf
    return points


def thresholds_non_decreasing(N_values, rule, epsilon, x):
    """True when every threshold allows a decision (>= 1) and none drops as N grows."""
    prev = None
    for N in N_values:
        t = threshold_n_ok(TreeStatsConfig.for_rule(N, rule, x, epsilon))
        if t < 1 or (prev is not None and t < prev):
            return False
        prev = t
    return True


def x_max(N_values, rule, epsilon, tol=X_TOLERANCE):
    """Largest x in [0, 1] (to tol) with the threshold non-decreasing over N_values."""
    N_values = sorted(int(N) for N in N_values)
    if len(N_values) < 2:
        raise ValueError("x_max needs at least two system sizes")
    if thresholds_non_decreasing(N_values, rule, epsilon, 1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if thresholds_non_decreasing(N_values, rule, epsilon, mid):
            lo = mid
        else:
            hi = mid
    return lo


def x_max_table(N_values, rule, epsilons):
    N_values = sorted(int(N) for N in N_values)
    return [XMaxPoint(rule, eps, x_max(N_values, rule, eps), N_values[0], N_values[-1]) for eps in epsilons]


# ---- Monte Carlo ----

def _balanced_trees(N, n, seed):
    layout = parity_map(LogicalProblem.complete(N, seed=seed))
    return enumerate_spanning_trees(layout, n, seed=seed)


def _count_incorrect(hit, membership):
    """Trees containing at least one errored qubit, per trial."""
    return (hit.astype(np.int32) @ membership.T.astype(np.int32) > 0).sum(axis=1)


def _chunks(trials):
    sizes = [MC_CHUNK] * (trials // MC_CHUNK)
    if trials % MC_CHUNK:
        sizes.append(trials % MC_CHUNK)
    return sizes


class MonteCarloStats:
    __slots__ = ("N", "n", "trials", "per_m", "overall_mean", "overall_se", "overall_expected")

    def __init__(self, N, n, trials, per_m, overall_mean, overall_se, overall_expected):
        self.N = N
        self.n = n
        self.trials = trials
        self.per_m = per_m
        self.overall_mean = overall_mean
        self.overall_se = overall_se
        self.overall_expected = overall_expected

    def max_z(self):
        return max((abs(p.z) for p in self.per_m), default=0.0)

    def to_dict(self):
        return {"N": self.N, "n": self.n, "trials": self.trials,
                "per_m": [p.to_dict() for p in self.per_m],
                "overall_mean": self.overall_mean, "overall_se": self.overall_se,
                "overall_expected": self.overall_expected}

    def __repr__(self):
        return "MonteCarloStats(N=%d, n=%d, max|z|=%.2f)" % (self.N, self.n, self.max_z())


def incorrect_trees_for(tree_set, errored):
    """Number of trees touched by a fixed set of errored physical qubits."""
    hit = np.zeros((1, tree_set.layout.n_physical), dtype=bool)
    hit[0, list(errored)] = True
    return int(_count_incorrect(hit, tree_set.membership())[0])


def incorrect_counts(tree_set, m, trials, rng):
    """Incorrect-tree counts for `trials` placements of m errors, each uniform over the qubits."""
    membership = tree_set.membership()
    K = membership.shape[1]
    errors = rng.integers(0, K, size=(int(trials), int(m)))
    hit = np.zeros((int(trials), K), dtype=bool)
    hit[np.arange(int(trials))[:, None], errors] = True
    return _count_incorrect(hit, membership)


def monte_carlo_trees(cfg, trials=100_000, seed=0, m_values=(1, 2, 3, 4, 5), tree_set=None):
    """
    Recursion vs sampling. For each m the errors are placed independently
    and uniformly; the overall statistic draws each qubit faulty with
    probability cfg.epsilon.
    """
    trials = int(trials)
    if trials < 2:
        raise ValueError("need at least two trials")
    tree_set = tree_set or _balanced_trees(cfg.N, cfg.n, seed)
    membership = tree_set.membership()
    K = membership.shape[1]
    root = np.random.SeedSequence(int(seed))
    m_seq, overall_seq = root.spawn(2)
    sizes = _chunks(trials)

    per_m = []
    for m, ss in zip(m_values, m_seq.spawn(len(m_values))):
        counts = np.concatenate([incorrect_counts(tree_set, m, size, np.random.default_rng(child))
                                 for size, child in zip(sizes, ss.spawn(len(sizes)))])
        expected = expected_incorrect_trees(cfg, m)
        mean = float(counts.mean())
        se = float(counts.std(ddof=1) / math.sqrt(trials))
        if se > 0:
            z = (mean - expected) / se
        else:
            z = 0.0 if math.isclose(mean, expected, rel_tol=1e-9, abs_tol=1e-12) else math.inf
        per_m.append(McPoint(cfg.N, cfg.n, m, expected, mean, se, z, trials))

    chunks = []
    for size, child in zip(sizes, overall_seq.spawn(len(sizes))):
        rng = np.random.default_rng(child)
        hit = rng.random((size, K)) < cfg.epsilon
        chunks.append(_count_incorrect(hit, membership))
    counts = np.concatenate(chunks)
    table = incorrect_tree_table(cfg)
    expected = float(np.dot(stats.binom.pmf(np.arange(K + 1), K, cfg.epsilon), table))
    METRICS.increment("mc.trials", trials * (len(m_values) + 1))
    return MonteCarloStats(cfg.N, cfg.n, trials, per_m, float(counts.mean()),
                           float(counts.std(ddof=1) / math.sqrt(trials)), expected)
