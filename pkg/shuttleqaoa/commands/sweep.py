# shuttleqaoa/commands/sweep.py

import dataclasses
import logging
import os

import click

from ..services import export
from ..services.architectures import KINDS
from ..services.metrics import METRICS
from ..services.simulation import max_depth_from_budget, optimal_velocity, sweep as run_sweep
from ..services.valley import ValleyDistribution
from . import config_option, experiment_from, handle_errors

log = logging.getLogger(__name__)


def family_optima(result, base=None, depth_target=None):
    """Optimal velocity per curve family, optionally with the depth bound there."""
    rows = []
    for (arch, law, mean, std, t2), pts in sorted(result.families().items()):
        v_opt, eps_opt = optimal_velocity([p.velocity_mps for p in pts], [p.epsilon for p in pts])
        row = {"architecture": arch, "law": law, "mean_Ev": mean, "std_Ev": std, "T2_us": t2,
               "v_opt_mps": v_opt, "epsilon_opt": eps_opt}
        if base is not None and depth_target is not None:
            cfg = _family_config(base, arch, law, pts[0]).with_velocity(v_opt)
            d, rounds = max_depth_from_budget(cfg, depth_target)
            row.update({"D_max": d, "rounds": rounds, "eps_target": depth_target})
        rows.append(row)
        log.info("%s/%s Ev=%g±%g: v*=%.4g m/s eps*=%.5f", arch, law, mean, std, v_opt, eps_opt)
    return rows


def _family_config(base, arch, law, point):
    coh = dataclasses.replace(base.coherence, T2_ns=point.T2_us * 1000.0, dephasing_law=law)
    spec = base.arch if base.arch.kind == arch else base.arch.with_kind(arch)
    return base.replace(arch=spec, coherence=coh,
                        valley=ValleyDistribution.from_moments(point.mean_Ev, point.std_Ev))


@click.command("sweep")
@config_option
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@click.option("--velocity", type=click.FloatRange(min=0.0, min_open=True), default=None,
              help="Single velocity in m/s instead of the configured grid.")
@click.option("--architecture", type=click.Choice(KINDS), default=None)
@click.option("--law", type=click.Choice(("linear", "gaussian")), default=None)
@click.option("--depth-target", type=click.FloatRange(0.0, 1.0, min_open=True), default=None,
              help="Also report D_max at each family optimum for this target error.")
@click.option("--prefix", default="sweep", show_default=True, help="Output file prefix.")
@click.pass_context
@handle_errors
def sweep(ctx, config_path, seed, workers, output_dir, velocity, architecture, law, depth_target, prefix):
    """Error probability per qubit and round over velocity and valley distributions."""
    env = ctx.obj["env"]
    exp = experiment_from(ctx, config_path, seed=seed, workers=workers, output_dir=output_dir,
                          velocity=velocity, architecture=architecture, law=law)
    base = exp.run_config()
    grid = exp.sweep_grid()
    n_workers = exp.workers(env)
    out_dir = exp.output_dir(env)
    chash = exp.config_hash()
    log.info("sweep: %d points, %d workers, config %s", grid.size(), n_workers, chash[:12])

    with METRICS.timer("command.sweep"):
        result = run_sweep(base, grid, workers=n_workers)
    optima = family_optima(result, base, depth_target)

    csv_path = os.path.join(out_dir, "%s.csv" % prefix)
    json_path = os.path.join(out_dir, "%s.json" % prefix)
    plot_path = os.path.join(out_dir, "%s_plot.json" % prefix)
    export.write_csv(csv_path, result.points, chash)
    meta = export.metadata(chash, {"config": exp.to_dict(), "points": len(result)})
    export.write_json(json_path, {"points": [p.to_dict() for p in result.points], "optima": optima},
                      chash, meta)
    export.write_json(plot_path, export.plot_data(result), chash, meta)
    click.echo("%d points -> %s" % (len(result), csv_path))
    for row in optima:
        line = "%-12s %-8s Ev=%6.1f±%5.1f  v*=%8.4g m/s  eps*=%.5f" % (
            row["architecture"], row["law"], row["mean_Ev"], row["std_Ev"], row["v_opt_mps"], row["epsilon_opt"])
        if "D_max" in row:
            line += "  D_max=%.0f (%.1f rounds)" % (row["D_max"], row["rounds"])
        click.echo(line)
