"""
coev-grid CLI

Command-line entry points: the client and master executables, the
single-process local mode and the grid-size trend harness.
"""

from pathlib import Path
from typing import Any, Callable, Optional
import asyncio
import json
import logging

import click
import uvicorn
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from coev_grid import __version__
from coev_grid.config.settings import ExperimentConfig, load_config
from coev_grid.distribution.local import LocalGrid
from coev_grid.distribution.master import orchestrate
from coev_grid.distribution.server import ClientRuntime, create_app
from coev_grid.errors import CoevGridError
from coev_grid.experiments.trends import grid_size_trend
from coev_grid.results.records import RunReport

load_dotenv()

logger = logging.getLogger(__name__)
console = Console()

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def configure_logging(level: str) -> None:
    """Route all library logging through one rich console handler."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(name)s: %(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


def log_level_option(command: Callable[..., Any]) -> Callable[..., Any]:
    return click.option(
        "--log-level",
        type=click.Choice(LOG_LEVELS, case_sensitive=False),
        default="INFO",
        envvar="COEV_GRID_LOG_LEVEL",
        show_default=True,
        help="Logging verbosity.",
    )(command)


def parse_address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter(f"expected host:port, got {text!r}")
    return host, int(port)


def _load(config_path: Optional[str], seed: Optional[int]) -> ExperimentConfig:
    try:
        config = load_config(config_path)
        if seed is not None:
            config = config.with_overrides(run={"seed": seed})
    except CoevGridError as e:
        raise click.ClickException(f"Invalid configuration: {e}") from e
    return config


def print_report(report: RunReport) -> None:
    table = Table(title=f"Experiment {report.experiment_id} ({report.rows}x{report.cols})")
    table.add_column("Rank", justify="right")
    table.add_column("Cell")
    table.add_column("Score", justify="right")
    for rank, cell in enumerate(report.ranking, start=1):
        table.add_row(str(rank), cell, f"{report.final_scores[cell]:.5f}")
    for failure in report.failures:
        table.add_row("-", failure["cell"], f"[red]failed: {failure['reason']}[/red]")
    console.print(table)


@click.command()
@click.option("--listen", default="127.0.0.1:5000", show_default=True, help="host:port to serve on.")
@log_level_option
def client(listen: str, log_level: str) -> None:
    """Run a client that trains one cell per accepted experiment."""
    configure_logging(log_level)
    host, port = parse_address(listen)
    logger.info(f"Client listening on {host}:{port}")
    uvicorn.run(create_app(ClientRuntime()), host=host, port=port, log_level=log_level.lower())


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Experiment TOML file.")
@click.option("--clients", required=True, help="Comma-separated host:port list, one per cell.")
@click.option(
    "--output-dir",
    default="output",
    envvar="COEV_GRID_OUTPUT_DIR",
    show_default=True,
    type=click.Path(),
    help="Directory for run artifacts.",
)
@click.option("--seed", type=int, default=None, help="Override run.seed.")
@log_level_option
def master(
    config_path: Optional[str],
    clients: str,
    output_dir: str,
    seed: Optional[int],
    log_level: str,
) -> None:
    """Distribute an experiment over running clients and rank the results."""
    configure_logging(log_level)
    config = _load(config_path, seed)
    addresses = [a.strip() for a in clients.split(",") if a.strip()]
    for address in addresses:
        parse_address(address)
    try:
        report = asyncio.run(orchestrate(config, addresses, output_dir))
    except (CoevGridError, ValueError) as e:
        raise click.ClickException(str(e)) from e
    print_report(report)


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Experiment TOML file.")
@click.option(
    "--output-dir",
    default="output",
    envvar="COEV_GRID_OUTPUT_DIR",
    show_default=True,
    type=click.Path(),
    help="Directory for run artifacts.",
)
@click.option("--seed", type=int, default=None, help="Override run.seed.")
@click.option("--iterations", type=int, default=None, help="Override run.iterations.")
@click.option(
    "--schedule",
    type=click.Choice(["lockstep", "async"]),
    default=None,
    help="Override distribution.schedule.",
)
@log_level_option
def local(
    config_path: Optional[str],
    output_dir: str,
    seed: Optional[int],
    iterations: Optional[int],
    schedule: Optional[str],
    log_level: str,
) -> None:
    """Run a whole grid in this process."""
    configure_logging(log_level)
    config = _load(config_path, seed)
    run = asyncio.run(LocalGrid(config, schedule=schedule).run(iterations, output_dir))
    print_report(run.report)


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Experiment TOML file.")
@click.option("--sizes", default="1x1,2x2,3x3", show_default=True, help="Grid sizes, smallest first.")
@click.option("--seeds", type=int, default=15, show_default=True, help="Seeds per grid size.")
@click.option("--iterations", type=int, default=None, help="Override run.iterations.")
@click.option(
    "--output-dir",
    default="output",
    envvar="COEV_GRID_OUTPUT_DIR",
    show_default=True,
    type=click.Path(),
)
@log_level_option
def trend(
    config_path: Optional[str],
    sizes: str,
    seeds: int,
    iterations: Optional[int],
    output_dir: str,
    log_level: str,
) -> None:
    """Compare final quality across grid sizes."""
    configure_logging(log_level)
    config = _load(config_path, None)
    try:
        grid_sizes = [tuple(int(n) for n in size.split("x")) for size in sizes.split(",")]
    except ValueError as e:
        raise click.BadParameter(f"expected sizes like 1x1,2x2: {e}") from e
    result = asyncio.run(grid_size_trend(config, grid_sizes, range(seeds), iterations))

    table = Table(title="Grid-size trend (medians)")
    for column in ("Grid", "Fréchet proxy", "TVD", "Coverage"):
        table.add_column(column)
    fid, tvd, coverage = (result.medians(m) for m in ("frechet_proxy", "tvd", "mode_coverage"))
    for size in result.sizes():
        table.add_row(
            f"{size[0]}x{size[1]}", f"{fid[size]:.4f}", f"{tvd[size]:.4f}", f"{coverage[size]:.1f}"
        )
    console.print(table)
    if len(result.sizes()) > 1:
        console.print(f"Rank-sum p (smallest > largest): {result.rank_sum_p_value():.4g}")

    path = Path(output_dir)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / "trend.json", "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2)


@click.group()
@click.version_option(__version__, prog_name="coev-grid")
def main() -> None:
    """coev-grid: distributed spatial coevolution of GANs."""


main.add_command(client)
main.add_command(master)
main.add_command(local)
main.add_command(trend)


if __name__ == "__main__":
    main()
