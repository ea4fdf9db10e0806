"""Command-line interface.

Subcommands: simulate (one run, full history), sweep (Monte Carlo grid),
cutset (post-hoc analysis of stored edge snapshots), plot (re-render figures
from CSVs). Heavy state flows through files; the output directory comes from
--out, the OPINIONNET_OUT environment variable, or the config, in that order.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click
import numpy as np

from .config import ConfigError, RunConfig, default_config, parse_config
from .cutset import cutset_timeline
from .engine import RunHistory, SimState, run_to_convergence
from .experiments import build_initial_network, build_population, consensus_of, run_sweep
from .graph import weakly_connected_components
from .output import emit_results, read_edges_csv, read_opinions_csv, read_sweep_csv
from .plots import emit_plots


def _load_config(config_path: str | None, seed: int | None, out: str | None) -> RunConfig:
    cfg = parse_config(config_path) if config_path else default_config()
    if seed is not None:
        cfg.seed = seed
    env_out = os.environ.get("OPINIONNET_OUT")
    if out is not None:
        cfg.out_dir = out
    elif env_out:
        cfg.out_dir = env_out
    return cfg


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="YAML config file (defaults apply when omitted).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Output directory (overrides OPINIONNET_OUT and config).")(fn)
    fn = click.option("--quiet", is_flag=True, help="Suppress progress output.")(fn)
    return fn


@click.group()
def main():
    """Opinion dynamics on adaptive directed networks."""


@main.command()
@_common_options
@click.option("--sigma", type=float, default=None, help="Initial spread in degrees.")
@click.option("--theta-r", type=float, default=None, help="Rigid tolerance in degrees.")
@click.option("--theta-f", type=float, default=None, help="Flexible tolerance in degrees.")
@click.option("--rigid-fraction", type=float, default=None, help="Fraction of rigid agents.")
def simulate(config_path, seed, out, quiet, sigma, theta_r, theta_f, rigid_fraction):
    """Run a single simulation and export its full history."""
    try:
        cfg = _load_config(config_path, seed, out)
        population = cfg.population_spec(sigma, theta_r, theta_f, rigid_fraction)
    except (ConfigError, ValueError) as exc:
        raise click.ClickException(str(exc))
    spec = cfg.experiment_spec()
    rng = np.random.default_rng(cfg.seed)
    opinions, agents = build_population(population, rng, k_c=spec.k_c)
    graph = build_initial_network(opinions, agents, cap=spec.out_degree_cap, rng=rng,
                                  katz=spec.katz)
    history = RunHistory(cadence=cfg.snapshot_every, record_opinions=True,
                         record_weighted=True)
    state = SimState(opinions=opinions, graph=graph, agents=agents, rng=rng,
                     p_nd=spec.p_nd, update_mode=spec.update_mode, katz=spec.katz,
                     history=history)
    state, converged_at = run_to_convergence(state, eps=spec.eps, t_max=spec.t_max)
    timeline = cutset_timeline(history.edge_sets, state.graph)
    n_components = len(weakly_connected_components(state.graph))
    written = emit_results(None, {"0": timeline}, {"0": history}, cfg.out_dir)
    written += emit_plots(None, {"0": history}, cfg.out_dir, enabled=cfg.plots)
    if not quiet:
        outcome = f"converged at t={converged_at}" if converged_at is not None \
            else f"did not converge by t_max={spec.t_max}"
        click.echo(f"{outcome}; {n_components} component(s); "
                   f"consensus={consensus_of(state, spec.consensus_delta)}")
        for path in written:
            click.echo(f"wrote {path}")


@main.command()
@_common_options
@click.option("--workers", type=int, default=None, help="Parallel worker processes.")
def sweep(config_path, seed, out, quiet, workers):
    """Run the Monte Carlo grid and write sweep.csv."""
    try:
        cfg = _load_config(config_path, seed, out)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    spec = cfg.experiment_spec()
    n_workers = workers if workers is not None else cfg.workers
    progress = None
    if not quiet:
        def progress(done, total):
            click.echo(f"cell {done}/{total}", err=True)
    rows = run_sweep(spec, workers=n_workers, progress=progress)
    written = emit_results(rows, None, None, cfg.out_dir)
    written += emit_plots(rows, None, cfg.out_dir, enabled=cfg.plots)
    if not quiet:
        for path in written:
            click.echo(f"wrote {path}")


@main.command()
@_common_options
@click.argument("edges_csv", type=click.Path(exists=True))
def cutset(config_path, seed, out, quiet, edges_csv):
    """Cut-set analysis of stored edge snapshots (last snapshot = converged net)."""
    try:
        cfg = _load_config(config_path, seed, out)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    snapshots = read_edges_csv(edges_csv)
    if not snapshots:
        raise click.ClickException(f"{edges_csv}: no snapshots found")
    pairs = [(t, weights > 0) for t, weights, _ in snapshots]
    timeline = cutset_timeline(pairs, pairs[-1][1])
    run_id = Path(edges_csv).stem.removeprefix("edges_") or "0"
    written = emit_results(None, {run_id: timeline}, None, cfg.out_dir)
    if not quiet:
        click.echo(f"monotone={timeline.monotone}; "
                   f"initial cut size {len(timeline.reports[0].cut_edges)}")
        for path in written:
            click.echo(f"wrote {path}")


@main.command(name="plot")
@_common_options
@click.option("--sweep-csv", type=click.Path(exists=True), default=None)
@click.option("--opinions-csv", type=click.Path(exists=True), default=None)
def plot_cmd(config_path, seed, out, quiet, sweep_csv, opinions_csv):
    """Re-render figures from previously written CSVs."""
    try:
        cfg = _load_config(config_path, seed, out)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    if sweep_csv is None and opinions_csv is None:
        raise click.ClickException("nothing to plot: pass --sweep-csv and/or --opinions-csv")
    table = read_sweep_csv(sweep_csv) if sweep_csv else None
    histories = None
    if opinions_csv:
        history = RunHistory(record_opinions=True)
        history.opinions = read_opinions_csv(opinions_csv)
        run_id = Path(opinions_csv).stem.removeprefix("opinions_") or "0"
        histories = {run_id: history}
    written = emit_plots(table, histories, cfg.out_dir, enabled=True)
    if not quiet:
        for path in written:
            click.echo(f"wrote {path}")


if __name__ == "__main__":
    sys.exit(main())
