# shuttleqaoa/commands/verify.py

import logging
import os

import click

from ..services import export
from ..services.metrics import METRICS
from ..services.verify import SUITES, run_verification
from . import config_option, experiment_from, handle_errors

log = logging.getLogger(__name__)

# constraint ZZ angle without the factor two; every circuit oracle must reject it
INJECTED_ZZ_FACTOR = 1.0


@click.command("verify")
@config_option
@click.option("--suite", "suites", type=click.Choice(SUITES), multiple=True,
              help="Run only these suites; repeatable.")
@click.option("--seed", type=int, default=None)
@click.option("--quadrature-samples", type=click.IntRange(min=2), default=None)
@click.option("--mc-trials", type=click.IntRange(min=2), default=None)
@click.option("--inject-zz-error", is_flag=True,
              help="Build the constraint circuit with the wrong ZZ angle (negative control).")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None,
              help="Also write verify_report.json here.")
@click.pass_context
@handle_errors
def verify(ctx, config_path, suites, seed, quadrature_samples, mc_trials, inject_zz_error, output_dir):
    """Run the oracle suites; exit status 3 when any check fails."""
    exp = experiment_from(ctx, config_path, seed=seed)
    opts = exp.verify_options(INJECTED_ZZ_FACTOR if inject_zz_error else None)
    if suites:
        opts.suites = tuple(suites)
    if quadrature_samples is not None:
        opts.quadrature_samples = quadrature_samples
    if mc_trials is not None:
        opts.mc_trials = mc_trials

    log.info("verify: suites=%s zz factor=%g", ",".join(opts.suites), opts.zz_angle_factor)
    with METRICS.timer("command.verify"):
        report = run_verification(opts)
    click.echo(report.table())

    if output_dir:
        chash = exp.config_hash()
        export.write_json(os.path.join(output_dir, "verify_report.json"), report.to_dict(), chash,
                          export.metadata(chash, {"suites": list(opts.suites),
                                                  "zz_angle_factor": opts.zz_angle_factor}))
    report.raise_for_failures()
