"""Command line experiment runner.

Exit codes: 0 success, 2 config error, 3 infeasible instance, 4 I/O error.
"""

from __future__ import annotations

import dataclasses
import json
import sys

import click

from .domain import InfeasibleInstanceError
from .experiments import (
    ConfigError,
    compare_fronts,
    load_config,
    load_front,
    run_experiment,
    run_sweep,
)

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(config_path: str):
    try:
        return load_config(config_path)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    except InfeasibleInstanceError as exc:
        _fail(EXIT_INFEASIBLE, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


def _apply_overrides(cfg, algorithm, limit, iterations, pop_size, seeds):
    updates = {}
    if algorithm is not None:
        updates["algorithm"] = algorithm
    if limit is not None:
        updates["limit"] = limit
    if iterations is not None:
        updates["iterations"] = iterations
    if pop_size is not None:
        updates["pop_size"] = pop_size
    if seeds:
        updates["seeds"] = tuple(seeds)
    return dataclasses.replace(cfg, **updates) if updates else cfg


@click.group()
def main() -> None:
    """Service composition experiment runner."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config JSON.")
@click.option("--algorithm", type=click.Choice(["pdga", "nsga2"]), default=None, help="Override the configured algorithm.")
@click.option("--limit", type=float, default=None, help="Completion-time search limit (PDGA).")
@click.option("--iterations", type=int, default=None, help="Override the iteration count.")
@click.option("--pop-size", type=int, default=None, help="Override the population size.")
@click.option("--seed", "seeds", type=int, multiple=True, help="Seed; repeat for multiple runs.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Output directory.")
def run(config_path, algorithm, limit, iterations, pop_size, seeds, out_dir) -> None:
    """Run the configured algorithm for every seed and write result files."""
    cfg = _apply_overrides(_load(config_path), algorithm, limit, iterations, pop_size, seeds)
    try:
        summaries = run_experiment(cfg, out_dir)
    except InfeasibleInstanceError as exc:
        _fail(EXIT_INFEASIBLE, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    for s in summaries:
        click.echo(
            f"{s['algorithm']} seed={s['seed']}: {s['front_size']} solutions, "
            f"mean services/solution {s['mean_num_total']:.2f}, "
            f"{s['wall_clock_ms']:.1f} ms -> {s['front_file']}"
        )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config JSON.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Output directory.")
def sweep(config_path, out_dir) -> None:
    """Run the 14-execution study (NSGA-II plus the PDGA limit ladder)."""
    cfg = _load(config_path)
    try:
        rows = run_sweep(cfg, out_dir)
    except InfeasibleInstanceError as exc:
        _fail(EXIT_INFEASIBLE, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    for s in rows:
        limit = "-" if s["limit"] is None else f"{s['limit']:g}"
        click.echo(
            f"execution {s['execution']:2d} {s['algorithm']:6s} limit={limit}: "
            f"{s['front_size']} solutions, {s['wall_clock_ms']:.1f} ms"
        )


@main.command()
@click.argument("front_a", type=click.Path())
@click.argument("front_b", type=click.Path())
def compare(front_a, front_b) -> None:
    """Compare two front files produced on the same instance."""
    try:
        report = compare_fronts(load_front(front_a), load_front(front_b))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    except (KeyError, json.JSONDecodeError) as exc:
        _fail(EXIT_CONFIG, f"malformed front file: {exc}")
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    click.echo(json.dumps(report, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
