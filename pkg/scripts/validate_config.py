#!/usr/bin/env python3
# scripts/validate_config.py

import logging
import sys
from pathlib import Path

# Add project root to sys.path for imports
HERE = Path(__file__).resolve().parent
REPO = HERE.parent
sys.path.insert(0, str(REPO))

from shuttleqaoa.config import load_experiment
from shuttleqaoa.errors import ConfigError
from shuttleqaoa.services.metrics import METRICS

log = logging.getLogger("validate_config")


class ConfigValidator:
    """Loads experiment YAML files and builds every service object they describe."""

    def __init__(self, paths):
        self.paths = [str(p) for p in paths]
        self.errors = []

    def validate(self):
        """Validate all files; True when none has a problem."""
        self.errors = []
        for path in self.paths:
            self._validate_file(path)
        ok = not self.errors
        METRICS.increment("config.files_ok" if ok else "config.files_error")
        return ok

    def _validate_file(self, path):
        try:
            exp = load_experiment(path)
            exp.run_config()
            exp.sweep_grid()
            exp.verify_options()
            METRICS.increment("config.loaded")
            log.info("%s ok (hash %s)", path, exp.config_hash()[:12])
        except ConfigError as e:
            for p in e.problems:
                self._err("%s: %s" % (path, p))

    def _err(self, msg):
        self.errors.append(msg)
        log.error(msg)

    def report(self):
        if not self.errors:
            print("Config validation passed (%d files)." % len(self.paths))
        else:
            print("Config validation failed with the following errors:")
            for error in self.errors:
                print(" - %s" % error)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    paths = argv or sorted((REPO / "configs").glob("*.yaml"))

    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    validator = ConfigValidator(paths)
    success = validator.validate()
    validator.report()
    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
