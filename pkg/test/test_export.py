# tests/test_export.py

import os
import tempfile
import threading
import unittest

from shuttleqaoa.services import export
from shuttleqaoa.services.cache import CacheManager, MemoCache
from shuttleqaoa.services.metrics import METRICS, Metrics
from shuttleqaoa.services.schema import SCHEMA_VERSION, PFailPoint, SweepPoint


def _point(v=1.0, eps=0.01):
    return SweepPoint("spin_bus", "linear", 100.0, 20.0, v, 100.0, 0.99, 0.0025, 1.0, 0.999, eps)


class TestExport(unittest.TestCase):
    def setUp(self):
        METRICS.reset()
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_csv_columns(self):
        text = export.csv_text([_point()], "abc")
        header, row = text.splitlines()
        self.assertEqual(header.split(","), ["schema_version"] + list(SweepPoint.FIELDS) + ["config_hash"])
        self.assertTrue(row.startswith("%d,spin_bus,linear" % SCHEMA_VERSION))
        self.assertTrue(row.endswith(",abc"))
        self.assertEqual(export.csv_text([], "abc"), "")

    def test_csv_read_back(self):
        path = os.path.join(self.tmp.name, "nested", "points.csv")
        points = [_point(1.0, 0.02), _point(10.0, 0.01)]
        export.write_csv(path, points, "abc")
        self.assertEqual(export.read_csv(path, SweepPoint), points)
        self.assertEqual(METRICS.get("export.files"), 1)

    def test_json_wrapped_with_metadata(self):
        path = os.path.join(self.tmp.name, "out.json")
        METRICS.increment("sim.runs", 3)
        export.write_json(path, {"x": [1, 2]}, "abc")
        data = export.load_json(path)
        self.assertEqual(data["data"], {"x": [1, 2]})
        self.assertEqual(data["metadata"]["config_hash"], "abc")
        self.assertEqual(data["metadata"]["schema_version"], SCHEMA_VERSION)
        self.assertEqual(data["metadata"]["counters"]["sim.runs"], 3)
        self.assertIn("created_at", data["metadata"])

    def test_json_unwrapped_and_text(self):
        path = os.path.join(self.tmp.name, "raw.json")
        export.write_json(path, [1, 2])
        self.assertEqual(export.load_json(path), [1, 2])
        text_path = os.path.join(self.tmp.name, "t.txt")
        export.write_text(text_path, "hello\n")
        with open(text_path, encoding="utf-8") as f:
            self.assertEqual(f.read(), "hello\n")
        self.assertFalse([n for n in os.listdir(self.tmp.name) if n.startswith("tmp")])

    def test_metadata_without_timestamp(self):
        meta = export.metadata("abc", {"suite": "circuit"}, timestamp=False)
        self.assertNotIn("created_at", meta)
        self.assertEqual(meta["suite"], "circuit")

    def test_records_validate(self):
        with self.assertRaises(ValueError):
            _point(eps=1.5)
        with self.assertRaises(ValueError):
            PFailPoint.from_dict({"N": 4})


class TestCache(unittest.TestCase):
    def test_config_hash_is_order_independent(self):
        self.assertEqual(CacheManager.config_hash({"a": 1, "b": [1, 2]}),
                         CacheManager.config_hash({"b": [1, 2], "a": 1}))
        self.assertNotEqual(CacheManager.config_hash({"a": 1}), CacheManager.config_hash({"a": 2}))
        with self.assertRaises(ValueError):
            CacheManager.digest(12)

    def test_file_digest(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "c.yaml")
            with open(path, "w", encoding="utf-8") as f:
                f.write("seed: 1\n")
            self.assertEqual(CacheManager.file_digest(path), CacheManager.digest("seed: 1\n"))
            with self.assertLogs("shuttleqaoa.services.cache", level="WARNING"):
                self.assertIsNone(CacheManager.file_digest(os.path.join(tmp, "missing.yaml")))

    def test_memo_cache(self):
        METRICS.reset()
        memo = MemoCache("t")
        calls = []
        self.assertEqual(memo.get_or_compute("k", lambda: calls.append(1) or 5), 5)
        self.assertEqual(memo.get_or_compute("k", lambda: calls.append(1) or 6), 5)
        self.assertEqual(len(calls), 1)
        self.assertEqual(METRICS.get("t.cache_hits"), 1)
        self.assertIn("k", memo)
        memo.clear()
        self.assertEqual(len(memo), 0)


class TestMetrics(unittest.TestCase):
    def test_counters_from_threads(self):
        m = Metrics()
        threads = [threading.Thread(target=lambda: [m.increment("n") for _ in range(1000)]) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        self.assertEqual(m.get("n"), 4000)

    def test_timers(self):
        m = Metrics()
        m.increment("sim.runs", 2)
        for _ in range(2):
            with m.timer("step"):
                pass
        snap = m.snapshot()
        self.assertEqual(snap["counters"], {"sim.runs": 2})
        self.assertEqual(snap["timers"]["step"]["count"], 2)
        self.assertGreaterEqual(snap["timers"]["step"]["seconds"], 0.0)
        m.reset()
        self.assertEqual(m.counters(), {})


if __name__ == "__main__":
    unittest.main()
