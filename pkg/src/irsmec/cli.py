"""Command-line entry points: single solve, parameter sweep, channel dump."""

from __future__ import annotations

import dataclasses
import json
import logging
import sys

import click

from . import channel, orchestrator, sweep as sweep_mod
from .config import ScenarioConfig
from .errors import IrsMecError


def _load_config(path, seed):
    cfg = ScenarioConfig.from_file(path) if path else ScenarioConfig()
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    return cfg


def _fail(exc):
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(1)


@click.group()
@click.option("-v", "--verbose", count=True, help="-v info, -vv debug.")
def main(verbose):
    """Min-max latency optimization for IRS-aided cell-free edge computing."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Scenario JSON; defaults apply when omitted.")
@click.option("--scheme", type=click.Choice(orchestrator.SCHEMES), default="sca",
              show_default=True, help="Reflect update used in the inner loop.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--restarts", type=int, default=1, show_default=True,
              help="Random phase initializations; best run is kept.")
@click.option("--output", type=click.Path(), default=None,
              help="Write the full solution as JSON here.")
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Write the per-iteration trace CSV here.")
def solve(config_path, scheme, seed, restarts, output, trace_path):
    """Run the full block-coordinate descent once and print the objective."""
    try:
        cfg = _load_config(config_path, seed)
        channels = channel.synthesize(cfg, seed=cfg.seed)
        result = orchestrator.run_bcd(channels, cfg, scheme=scheme,
                                      restarts=restarts)
        orchestrator.check_solution(result, cfg)
    except (IrsMecError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"objective_ms={result.objective_s * 1e3:.6f} "
               f"iters={result.trace.outer_iterations} converged={result.converged}")
    if trace_path:
        result.trace.to_csv(trace_path)
    if output:
        payload = {
            "objective_s": result.objective_s,
            "converged": result.converged,
            "outer_iterations": result.trace.outer_iterations,
            "ell_bits": list(result.plan.ell),
            "f_edge_cycles": list(result.plan.f_edge),
            "per_wd_latency_s": list(result.plan.report.total_s),
            "theta_rad": list(result.theta.angles),
            "detectors": [[[z.real, z.imag] for z in row]
                          for row in result.detectors.detectors],
        }
        with open(output, "w") as fh:
            json.dump(payload, fh, indent=2)


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Scenario JSON; defaults apply when omitted.")
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True,
              help="Sweep spec JSON: param, values, schemes, seeds, output.")
@click.option("--output", type=click.Path(), default=None,
              help="CSV path; overrides the spec's output field.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Process pool size; rows stay in grid order.")
@click.option("--timing/--no-timing", default=False,
              help="Record wall-clock times (breaks byte determinism).")
def sweep_cmd(config_path, spec_path, output, seed, workers, timing):
    """Run a parameter sweep and write one CSV row per grid point."""
    try:
        cfg = _load_config(config_path, seed)
        spec = sweep_mod.SweepSpec.from_file(spec_path)
        if timing:
            spec = dataclasses.replace(spec, timing=True)
        rows = sweep_mod.run_sweep(spec, cfg, workers=workers)
        path = output or spec.output
        sweep_mod.write_csv(rows, path)
    except (IrsMecError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {len(rows)} rows to {path}")


@main.command("dump-channels")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Scenario JSON; defaults apply when omitted.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--output", type=click.Path(), required=True,
              help="Destination JSON file.")
def dump_channels_cmd(config_path, seed, output):
    """Synthesize one channel realization and save it to JSON."""
    try:
        cfg = _load_config(config_path, seed)
        channels = channel.synthesize(cfg, seed=cfg.seed)
        channel.dump_channels(channels, output)
    except (IrsMecError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote channels to {output}")


if __name__ == "__main__":
    main()
