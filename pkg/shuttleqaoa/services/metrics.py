# shuttleqaoa/services/metrics.py

import threading
import time
from collections import defaultdict


class Metrics:
    """
    Counters (quadratures, cache hits, simulated runs, Monte Carlo trials) and
    wall-clock timers per command and sweep point, shared by sweep workers.
    Only counters are deterministic, so only they go into result metadata.
    """
    __slots__ = ("_lock", "_counters", "_timers")

    def __init__(self):
        self._lock = threading.Lock()
        self._counters = defaultdict(int)
        self._timers = {}

    def increment(self, name, value=1):
        with self._lock:
            self._counters[str(name)] += int(value)

    def get(self, name):
        with self._lock:
            return self._counters.get(str(name), 0)

    def counters(self):
        with self._lock:
            return dict(sorted(self._counters.items()))

    def reset(self):
        with self._lock:
            self._counters.clear()
            self._timers.clear()

    def _observe(self, name, seconds):
        with self._lock:
            count, total = self._timers.get(name, (0, 0.0))
            self._timers[name] = (count + 1, total + seconds)

    class _TimerCtx:
        __slots__ = ("_metrics", "_name", "_start")

        def __init__(self, metrics, name):
            self._metrics = metrics
            self._name = str(name)
            self._start = None

        def __enter__(self):
            self._start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            self._metrics._observe(self._name, time.perf_counter() - self._start)
            return False

    def timer(self, name):
        """with METRICS.timer("sweep.point"): ..."""
        return Metrics._TimerCtx(self, name)

    def snapshot(self):
        with self._lock:
            return {"counters": dict(self._counters),
                    "timers": {k: {"count": c, "seconds": s} for k, (c, s) in self._timers.items()}}


METRICS = Metrics()
__all__ = ("Metrics", "METRICS")
