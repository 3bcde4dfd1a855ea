# shuttleqaoa/__init__.py

import logging

import click

from .commands import register_commands
from .config import LOG_LEVELS, Config
from .services.metrics import METRICS


def create_cli():
    """Create the click command group with every subcommand registered."""
    env = Config()

    @click.group(context_settings={"help_option_names": ["-h", "--help"]})
    @click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
                  help="Overrides SHUTTLEQAOA_LOG_LEVEL.")
    @click.pass_context
    def cli(ctx, log_level):
        """Parity QAOA on shuttling spin-qubit architectures: noise sweeps, decoding statistics, oracles."""
        problems = env.validate()
        if problems:
            for p in problems:
                click.echo("environment: %s" % p, err=True)
            ctx.exit(1)
        level = getattr(logging, (log_level or env.LOG_LEVEL).upper(), logging.INFO)

        # Basic logging if none configured
        root = logging.getLogger()
        if not root.handlers:
            logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
        else:
            root.setLevel(level)

        ctx.obj = {"env": env, "metrics": METRICS}
        METRICS.increment("cli_starts")

    register_commands(cli)
    return cli
