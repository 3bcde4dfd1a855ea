# shuttleqaoa/services/trees.py

import logging

import networkx as nx
import numpy as np

from .metrics import METRICS
from .parity import is_spanning_tree

log = logging.getLogger(__name__)

MAX_RESTARTS = 50
CANDIDATES_PER_TREE = 16


class SpanningTreeSet:
    """n spanning trees, each a tuple of N-1 physical qubits."""
    __slots__ = ("layout", "trees")

    def __init__(self, layout, trees):
        self.layout = layout
        self.trees = [tuple(sorted(int(q) for q in t)) for t in trees]
        bad = [t for t in self.trees if not is_spanning_tree(layout, t)]
        if bad:
            raise ValueError("not spanning trees: %s" % bad[:3])

    @property
    def n_trees(self):
        return len(self.trees)

    def usage(self):
        """How many trees contain each physical qubit."""
        counts = np.zeros(self.layout.n_physical, dtype=int)
        for t in self.trees:
            counts[list(t)] += 1
        return counts

    def membership(self):
        """Boolean matrix (trees x qubits)."""
        m = np.zeros((self.n_trees, self.layout.n_physical), dtype=bool)
        for k, t in enumerate(self.trees):
            m[k, list(t)] = True
        return m

    def spread(self):
        u = self.usage()
        return int(u.max() - u.min()) if u.size else 0

    def to_dict(self):
        return {"n_trees": self.n_trees, "trees": [list(t) for t in self.trees],
                "usage": self.usage().tolist()}

    def __repr__(self):
        return "SpanningTreeSet(n=%d, spread=%d)" % (self.n_trees, self.spread())


def _random_tree(graph, usage, rng):
    """Minimum spanning tree under usage + uniform jitter: favors rarely used qubits."""
    for u, v, data in graph.edges(data=True):
        data["weight"] = float(usage[data["qubit"]]) + rng.uniform(0.0, 1.0)
    mst = nx.minimum_spanning_tree(graph, weight="weight")
    return tuple(sorted(d["qubit"] for _, _, d in mst.edges(data=True)))


def _greedy(layout, n, rng):
    graph = layout.logical_graph()
    usage = np.zeros(layout.n_physical, dtype=int)
    trees = []
    for _ in range(n):
        best, best_score = None, None
        for _ in range(CANDIDATES_PER_TREE):
            cand = _random_tree(graph, usage, rng)
            trial = usage.copy()
            trial[list(cand)] += 1
            score = (int(trial.max()), int(np.sum(trial * trial)))
            if best_score is None or score < best_score:
                best, best_score = cand, score
        usage[list(best)] += 1
        trees.append(best)
    return trees, usage


def balance_feasible(layout, n):
    """Whether max - min usage <= 1 is reachable by counting alone."""
    N, K = layout.n_logical, layout.n_physical
    return n * (N - 1) <= K * (2 * n // N + 1)


def enumerate_spanning_trees(layout, n, seed=0):
    """
    Greedy balanced selection of n random spanning trees. Restarts with fresh
    deterministic streams until every qubit is used within one of every other.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need at least one tree, got %d" % n)
    if layout.n_logical < 2:
        raise ValueError("layout has no logical edges")
    target = balance_feasible(layout, n)
    best = None
    for attempt in range(MAX_RESTARTS):
        rng = np.random.default_rng([int(seed), attempt])
        trees, usage = _greedy(layout, n, rng)
        spread = int(usage.max() - usage.min())
        if best is None or spread < best[1]:
            best = (trees, spread)
        if spread <= 1 or not target:
            break
        METRICS.increment("trees.restarts")
    if target and best[1] > 1:
        log.warning("tree set for N=%d n=%d stays unbalanced after %d restarts (spread %d)",
                    layout.n_logical, n, MAX_RESTARTS, best[1])
    return SpanningTreeSet(layout, best[0])
