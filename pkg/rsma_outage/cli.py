import logging
import os
import sys
from typing import List, Optional, Sequence

import click

from .config import load_scenario
from .error_handler import EXIT_OK, EXIT_VALIDATION_FAILED, ErrorHandler
from .exceptions import RsmaOutageException
from .experiments import registry
from .report import write_report
from .utils import ensure_directory


def setup_logging(verbose: bool):
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")


def run_experiments(
    names: Sequence[str],
    config_path: Optional[str] = None,
    out_dir: str = "results",
    trials: Optional[int] = None,
    seed: Optional[int] = None,
) -> int:
    """Run the named experiments and write their CSVs and ``report.txt``; returns the exit status."""
    for name in names:
        registry.get(name)
    scenario = load_scenario(config_path)
    ensure_directory(out_dir)

    sections = []
    outputs: List[str] = []
    for name in names:
        paths, checks = registry.execute(name, scenario, out_dir, trials=trials, seed=seed)
        sections.append((name, checks))
        outputs.extend(paths)
    write_report(os.path.join(out_dir, "report.txt"), sections, outputs)

    failed = [check.curve_id for _, checks in sections for check in checks if not check.passed]
    if failed:
        logging.warning(f"{len(failed)} validation(s) failed: {', '.join(failed)}")
        return EXIT_VALIDATION_FAILED
    logging.info(f"Successfully ran {len(names)} experiment(s)")
    return EXIT_OK


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
def cli(verbose: bool):
    """Uplink RSMA outage analysis: closed forms, simulation and figure experiments."""
    setup_logging(verbose)


@cli.command()
@click.option("--config", "config_path", type=click.Path(), help="Scenario YAML file (defaults to the packaged scenario)")
@click.option("--experiment", "-e", "experiments", multiple=True, required=True, help="Experiment to run; repeatable")
@click.option("--trials", type=int, help="Monte Carlo trials per sweep point")
@click.option("--seed", type=int, help="Master seed")
@click.option("--out", "out_dir", default="results", show_default=True, type=click.Path(), help="Output directory")
def run(config_path: Optional[str], experiments: Sequence[str], trials: Optional[int], seed: Optional[int], out_dir: str):
    """Run experiments and write CSV results plus a validation report."""
    handler = ErrorHandler()
    try:
        status = run_experiments(list(experiments), config_path, out_dir, trials, seed)
    except RsmaOutageException as e:
        status = handler.handle_error(e, {"config": config_path, "experiments": list(experiments)})
    sys.exit(status)


@cli.command(name="list")
def list_experiments():
    """List the built-in experiments."""
    for name, description in registry.list_experiments():
        click.echo(f"{name}: {description}")


def main():
    cli(prog_name="rsma-outage")


if __name__ == "__main__":
    main()
