# shuttleqaoa/services/export.py

import csv
import io
import logging
import os
from datetime import datetime, timezone
from tempfile import NamedTemporaryFile

import orjson

from .metrics import METRICS
from .schema import SCHEMA_VERSION

log = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def _atomic_write(path, data):
    directory = os.path.dirname(os.path.abspath(path))
    if directory and not os.path.isdir(directory):
        os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    kwargs = {} if mode == "wb" else {"encoding": "utf-8", "newline": ""}
    with NamedTemporaryFile(mode, delete=False, dir=directory, **kwargs) as tmp:
        tmp.write(data)
        tmp_path = tmp.name
    os.replace(tmp_path, path)


def dumps(data):
    return orjson.dumps(data, option=JSON_OPTIONS) + b"\n"


def csv_text(records, config_hash):
    """CSV with `schema_version` first and `config_hash` last; empty input gives an empty string."""
    records = list(records)
    if not records:
        return ""
    fields = records[0].FIELDS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("schema_version",) + tuple(fields) + ("config_hash",))
    for rec in records:
        writer.writerow([SCHEMA_VERSION] + [_cell(v) for v in rec.row()] + [config_hash])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def read_csv(path, cls):
    """Records back from a CSV written by write_csv (extra columns ignored)."""
    with open(path, encoding="utf-8", newline="") as f:
        return [cls.from_dict(row) for row in csv.DictReader(f)]


def write_csv(path, records, config_hash):
    text = csv_text(records, config_hash)
    _atomic_write(path, text)
    METRICS.increment("export.files")
    log.info("wrote %s", path)
    return path


def metadata(config_hash, extra=None, timestamp=True):
    meta = {"schema_version": SCHEMA_VERSION, "config_hash": config_hash,
            "counters": METRICS.counters()}
    if timestamp:
        meta["created_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta.update(extra or {})
    return meta


def write_json(path, payload, config_hash=None, meta=None):
    """
    JSON artifact. When a config hash is given the payload is wrapped as
    {"metadata": ..., "data": payload}.
    """
    if config_hash is not None:
        payload = {"metadata": meta if meta is not None else metadata(config_hash), "data": payload}
    _atomic_write(path, dumps(payload))
    METRICS.increment("export.files")
    log.info("wrote %s", path)
    return path


def write_text(path, text):
    _atomic_write(path, text)
    METRICS.increment("export.files")
    log.info("wrote %s", path)
    return path


def load_json(path):
    with open(path, "rb") as f:
        return orjson.loads(f.read())


def plot_data(sweep_result):
    """Per-family (velocity, epsilon) series for plotting."""
    out = []
    for (arch, law, mean, std, t2), pts in sorted(sweep_result.families().items()):
        out.append({"architecture": arch, "law": law, "mean_Ev": mean, "std_Ev": std, "T2_us": t2,
                    "velocity_mps": [p.velocity_mps for p in pts],
                    "epsilon": [p.epsilon for p in pts]})
    return out
