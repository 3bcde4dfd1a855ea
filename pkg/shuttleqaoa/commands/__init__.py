# shuttleqaoa/commands/__init__.py

import functools
import logging

import click

from ..config import load_experiment
from ..errors import ShuttleQAOAError, exit_code_for
from ..services.metrics import METRICS

log = logging.getLogger(__name__)


def handle_errors(fn):
    """Map package errors to exit codes; log the counter snapshot either way."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except ShuttleQAOAError as exc:
            problems = getattr(exc, "problems", None) or [str(exc)]
            for p in problems:
                click.echo("error: %s" % p, err=True)
            if getattr(exc, "path", None):
                click.echo("in %s" % exc.path, err=True)
            ctx.exit(exit_code_for(exc))
        finally:
            log.info("counters: %s", METRICS.counters())
            log.debug("metrics: %s", METRICS.snapshot())
    return wrapper


def experiment_from(ctx, config_path, **overrides):
    """Experiment config with command-line overrides applied."""
    exp = load_experiment(config_path)
    return exp.with_overrides(**{k: v for k, v in overrides.items() if v is not None})


def config_option(fn):
    return click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                        help="Experiment YAML file (defaults when omitted).")(fn)


def register_commands(cli):
    from .decode_stats import decode_stats
    from .schedule_dump import schedule_dump
    from .sweep import sweep
    from .verify import verify

    cli.add_command(sweep)
    cli.add_command(decode_stats)
    cli.add_command(verify)
    cli.add_command(schedule_dump)
