# shuttleqaoa/services/cache.py

import hashlib
import logging
import os
import threading

import orjson

from .metrics import METRICS

log = logging.getLogger(__name__)


class CacheManager:
    """
    Content hashing for provenance:
    - sha256 digests of bytes/str
    - canonical config hashes (sorted-key JSON)
    - streaming file digests
    """

    @staticmethod
    def digest(content):
        if isinstance(content, str):
            content = content.encode("utf-8")
        if not isinstance(content, bytes):
            raise ValueError("Content must be bytes or string")
        return hashlib.sha256(content).hexdigest()

    @staticmethod
    def canonical_json(data):
        return orjson.dumps(data, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY)

    @staticmethod
    def config_hash(data):
        """sha256 over the canonical JSON of a resolved config mapping."""
        return CacheManager.digest(CacheManager.canonical_json(data))

    @staticmethod
    def file_digest(path, chunk_size=65536):
        """
        Hex digest of a file's content, streamed.

        Returns:
            hex digest string or None if missing/unreadable.
        """
        if not os.path.isfile(path):
            log.warning("file_digest: file not found: %s", path)
            return None
        try:
            h = hashlib.sha256()
            with open(path, "rb") as f:
                for chunk in iter(lambda: f.read(chunk_size), b""):
                    h.update(chunk)
            return h.hexdigest()
        except OSError as exc:
            log.error("file_digest: error hashing %s: %s", path, exc)
            return None


class MemoCache:
    """
    Thread-safe memo table. Concurrent readers never block on a compute in
    progress; two workers may race to fill the same key, the first insert wins.
    """
    __slots__ = ("_lock", "_data", "name")

    def __init__(self, name):
        self._lock = threading.RLock()
        self._data = {}
        self.name = name

    def get_or_compute(self, key, fn):
        with self._lock:
            if key in self._data:
                METRICS.increment("%s.cache_hits" % self.name)
                return self._data[key]
        value = fn()
        with self._lock:
            return self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        with self._lock:
            return len(self._data)

    def __contains__(self, key):
        with self._lock:
            return key in self._data
