#!/usr/bin/env python3
# scripts/build_figure_data.py

import logging
import os
import sys
from pathlib import Path

# Add project root to sys.path for imports
HERE = Path(__file__).resolve().parent
REPO = HERE.parent
sys.path.insert(0, str(REPO))

from shuttleqaoa.commands.decode_stats import run_decode_stats
from shuttleqaoa.commands.sweep import family_optima
from shuttleqaoa.config import Config, load_experiment
from shuttleqaoa.errors import ShuttleQAOAError
from shuttleqaoa.services import export
from shuttleqaoa.services.cache import CacheManager
from shuttleqaoa.services.metrics import METRICS
from shuttleqaoa.services.simulation import sweep

log = logging.getLogger("build_figure_data")

SWEEP_CONFIGS = ("defaults.yaml", "gaussian.yaml", "modular_hop.yaml")
DECODE_CONFIG = "decode_stats.yaml"


class FigureDataBuilder:
    """Regenerates the plot-ready JSON for the velocity sweeps and decoding curves."""

    def __init__(self, env, config_dir, out_dir):
        self.env = env
        self.config_dir = Path(config_dir)
        self.out_dir = out_dir

    def build(self):
        ok = True
        for name in SWEEP_CONFIGS:
            ok = self._run(name, self.build_sweep) and ok
        ok = self._run(DECODE_CONFIG, self.build_decoding) and ok
        log.info("counters: %s", METRICS.counters())
        return ok

    def _run(self, name, fn):
        path = self.config_dir / name
        try:
            fn(load_experiment(str(path)), path)
            return True
        except ShuttleQAOAError as e:
            log.error("%s: %s", path, e)
            METRICS.increment("figures.error")
            return False

    def _meta(self, chash, path):
        return export.metadata(chash, {"source": path.name, "source_sha256": CacheManager.file_digest(str(path))})

    def build_sweep(self, exp, path):
        base = exp.run_config()
        result = sweep(base, exp.sweep_grid(), workers=exp.workers(self.env))
        chash = exp.config_hash()
        payload = {"series": export.plot_data(result), "optima": family_optima(result)}
        export.write_json(os.path.join(self.out_dir, "velocity_%s.json" % path.stem), payload, chash,
                          self._meta(chash, path))
        METRICS.increment("figures.sweep")

    def build_decoding(self, exp, path):
        ds = exp.decode_stats()
        curves, x_rows, _ = run_decode_stats(ds, exp.seed, with_mc=False)
        chash = exp.config_hash()
        payload = {
            "p_fail": {rule: {"N": [p.N for p in rows], "p_fail": [p.p_fail for p in rows],
                              "epsilon": [p.epsilon for p in rows]}
                       for rule, rows in curves.items()},
            "x_max": {rule: {"epsilon": [p.epsilon for p in x_rows if p.rule == rule],
                             "x_max": [p.x_max for p in x_rows if p.rule == rule]}
                      for rule in ds["rules"]},
        }
        export.write_json(os.path.join(self.out_dir, "%s.json" % path.stem), payload, chash, self._meta(chash, path))
        METRICS.increment("figures.decoding")


def main():
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    env = Config()
    problems = env.validate()
    if problems:
        for p in problems:
            print("Error in environment: %s" % p)
        sys.exit(1)

    builder = FigureDataBuilder(env, REPO / "configs", os.path.join(env.OUTPUT_DIR, "figures"))
    success = builder.build()
    print("[build_figure_data] Done.")
    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
