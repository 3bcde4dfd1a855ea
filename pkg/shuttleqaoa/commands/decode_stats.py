# shuttleqaoa/commands/decode_stats.py

import logging
import os

import click

from ..errors import ConfigError
from ..services import export
from ..services.decoding_stats import (RULES, TreeStatsConfig, monte_carlo_trees, n_for_rule,
                                       n_ok_distribution, p_fail_curve, x_max_table)
from ..services.metrics import METRICS
from . import config_option, experiment_from, handle_errors

log = logging.getLogger(__name__)


def run_decode_stats(ds, seed=0, with_mc=True):
    """All decoding-statistics tables for one resolved `decode_stats` block."""
    N_values = ds["N_values"]
    curves = {}
    for rule in ds["rules"]:
        rows = []
        for eps in ds["epsilons"]:
            rows.extend(p_fail_curve(N_values, rule, eps, ds["x"]))
        curves[rule] = rows
    x_rows = []
    for rule in ds["rules"]:
        x_rows.extend(x_max_table(N_values, rule, ds["x_max_epsilons"]))
    mc = []
    if with_mc:
        for N in ds["mc_sizes"]:
            for rule in ds["rules"]:
                cfg = TreeStatsConfig(N, n_for_rule(N, rule), ds["x"], ds["mc_epsilon"])
                mc.append(monte_carlo_trees(cfg, trials=ds["mc_trials"], seed=seed))
    return curves, x_rows, mc


@click.command("decode-stats")
@config_option
@click.option("--seed", type=int, default=None)
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@click.option("--rule", "rules", type=click.Choice(RULES), multiple=True,
              help="Tree-count rule; repeat for several (default from config).")
@click.option("--epsilon", "epsilons", type=click.FloatRange(0.0, 1.0), multiple=True,
              help="Per-qubit error probability for the p_fail curves; repeatable.")
@click.option("--x", "x", type=click.FloatRange(0.0, 1.0, min_open=True), default=None,
              help="Acceptance quantile.")
@click.option("--mc-trials", type=click.IntRange(min=2), default=None)
@click.option("--no-mc", is_flag=True, help="Skip the Monte Carlo cross-check.")
@click.pass_context
@handle_errors
def decode_stats(ctx, config_path, seed, output_dir, rules, epsilons, x, mc_trials, no_mc):
    """Failure probability of spanning-tree decoding and the largest usable quantile."""
    env = ctx.obj["env"]
    exp = experiment_from(ctx, config_path, seed=seed, output_dir=output_dir)
    ds = exp.decode_stats()
    if rules:
        ds["rules"] = list(rules)
    if epsilons:
        ds["epsilons"] = list(epsilons)
    if x is not None:
        ds["x"] = x
    if mc_trials is not None:
        ds["mc_trials"] = mc_trials
    if len(ds["N_values"]) < 2:
        raise ConfigError(["decode_stats: N_max must exceed N_min for x_max"], exp.path)

    out_dir = exp.output_dir(env)
    chash = exp.config_hash()
    log.info("decode-stats: N=%d..%d rules=%s eps=%s", ds["N_min"], ds["N_max"], ds["rules"], ds["epsilons"])
    with METRICS.timer("command.decode_stats"):
        curves, x_rows, mc = run_decode_stats(ds, exp.seed, with_mc=not no_mc)

    for rule, rows in curves.items():
        export.write_csv(os.path.join(out_dir, "p_fail_%s.csv" % rule), rows, chash)
    export.write_csv(os.path.join(out_dir, "x_max.csv"), x_rows, chash)
    mc_rows = [p for stats in mc for p in stats.per_m]
    if mc_rows:
        export.write_csv(os.path.join(out_dir, "mc.csv"), mc_rows, chash)

    distributions = []
    for rule in ds["rules"]:
        for N in (ds["N_min"], ds["N_max"]):
            cfg = TreeStatsConfig.for_rule(N, rule, ds["x"], ds["epsilons"][0])
            distributions.append(dict(n_ok_distribution(cfg).to_dict(), N=N, rule=rule))
    payload = {"parameters": ds,
               "p_fail": {rule: [p.to_dict() for p in rows] for rule, rows in curves.items()},
               "x_max": [p.to_dict() for p in x_rows],
               "monte_carlo": [s.to_dict() for s in mc],
               "n_ok_distributions": distributions}
    export.write_json(os.path.join(out_dir, "decode_stats.json"), payload, chash,
                      export.metadata(chash, {"config": exp.to_dict()}))

    for rule, rows in curves.items():
        jumps = [p.N for p in rows if p.jump]
        click.echo("rule %-3s p_fail(N=%d)=%.4g  jumps at N=%s" % (
            rule, rows[-1].N, rows[-1].p_fail, jumps or "none"))
    for p in x_rows:
        click.echo("rule %-3s eps=%.4f  x_max=%.3f" % (p.rule, p.epsilon, p.x_max))
    for s in mc:
        click.echo("MC N=%d n=%d max|z|=%.2f" % (s.N, s.n, s.max_z()))
