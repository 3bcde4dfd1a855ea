# shuttleqaoa/errors.py


class ShuttleQAOAError(Exception):
    """Base class for failures surfaced by the command line."""
    exit_code = 1


class ConfigError(ShuttleQAOAError, ValueError):
    """Invalid experiment configuration.

    `problems` holds one "field: message" string per issue so a whole file
    is reported at once.
    """
    exit_code = 1

    def __init__(self, problems, path=None):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        self.path = path
        where = ("%s: " % path) if path else ""
        super().__init__(where + "; ".join(self.problems))


class NumericalError(ShuttleQAOAError, RuntimeError):
    """Quadrature or root finding did not converge."""
    exit_code = 2


class VerificationError(ShuttleQAOAError):
    """One or more oracle checks failed."""
    exit_code = 3

    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("failed checks: %s" % ", ".join(self.failed))


class ArchitectureError(ShuttleQAOAError, ValueError):
    """A circuit cannot be compiled onto the requested unit cell."""
    exit_code = 1


def exit_code_for(exc):
    return getattr(exc, "exit_code", 1)
