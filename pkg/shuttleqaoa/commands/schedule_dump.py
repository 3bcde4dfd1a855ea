# shuttleqaoa/commands/schedule_dump.py

import logging

import click

from ..services import export
from ..services.architectures import BLOCKS, KINDS, compile_modular, schedule_totals, timeline, variant_diff
from ..services.parity import qaoa_circuit, unit_cell_layout
from ..services.simulation import build_schedule
from . import config_option, experiment_from, handle_errors

log = logging.getLogger(__name__)


def hop_vs_swap(cfg):
    """Modular constraint block compiled with SWAP chains and with hops; steps that differ."""
    spec = cfg.arch if cfg.arch.kind != "spin_bus" else cfg.arch.with_kind("modular")
    circuit = qaoa_circuit(unit_cell_layout("modular"), [tuple(cfg.angles)] * cfg.rounds, cfg.zz_angle_factor)
    swap = compile_modular(circuit, spec, "swap")
    hop = compile_modular(circuit, spec, "hop")
    return [{"step": k, "swap_label": la, "swap_kind": ka, "hop_label": lb, "hop_kind": kb}
            for k, la, ka, lb, kb in variant_diff(swap, hop)]


def schedule_payload(schedule, velocity, blocks=None):
    """Deterministic schedule description: no timestamps, no counters."""
    totals = schedule_totals(schedule, blocks)
    gt = schedule.spec.gate_times()
    return {"architecture": schedule.kind, "velocity_mps": velocity,
            "gate_times_ns": gt,
            "wall_time_ns": schedule.wall_time(blocks).evaluate(velocity, gt),
            "totals": totals.to_dict(),
            "schedule": schedule.to_dict(velocity)}


@click.command("schedule-dump")
@config_option
@click.option("--architecture", type=click.Choice(KINDS), default=None)
@click.option("--velocity", type=click.FloatRange(min=0.0, min_open=True), default=None)
@click.option("--format", "fmt", type=click.Choice(("json", "table", "timeline")), default="table",
              show_default=True)
@click.option("--blocks", multiple=True, type=click.Choice(BLOCKS),
              help="Restrict totals to these blocks; repeatable.")
@click.option("--diff", is_flag=True, help="List the steps where the hop variant differs from SWAP chains.")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write to this file instead of stdout.")
@click.pass_context
@handle_errors
def schedule_dump(ctx, config_path, architecture, velocity, fmt, blocks, diff, output):
    """Print a compiled schedule with per-qubit shuttle distances and idle times."""
    exp = experiment_from(ctx, config_path, velocity=velocity, architecture=architecture)
    cfg = exp.run_config()
    v = cfg.velocity
    blocks = tuple(blocks) or None

    if diff:
        rows = hop_vs_swap(cfg)
        if fmt == "json":
            text = export.dumps(rows).decode("utf-8")
        else:
            text = "\n".join("%3d %-22s %-8s | %-22s %s" % (r["step"], r["swap_label"], r["swap_kind"],
                                                           r["hop_label"], r["hop_kind"]) for r in rows)
            text += "\n%d differing steps\n" % len(rows)
    else:
        schedule = build_schedule(cfg)
        log.info("schedule-dump: %s, %d steps, v=%g m/s", schedule.kind, len(schedule.steps), v)
        if fmt == "json":
            text = export.dumps(schedule_payload(schedule, v, blocks)).decode("utf-8")
        elif fmt == "timeline":
            text = timeline(schedule, v) + "\n"
        else:
            totals = schedule_totals(schedule, blocks)
            wall = schedule.wall_time(blocks).evaluate(v, schedule.spec.gate_times())
            text = "%s\nwall time at %g m/s: %.1f ns\n" % (totals.table(), v, wall)

    if output:
        export.write_text(output, text)
        click.echo("wrote %s" % output)
    else:
        click.echo(text, nl=False)
