import logging
from pathlib import Path
from typing import Annotated, Optional

import typer
from rich.console import Console

from dirreg.exceptions import DirregError
from dirreg.services.runner import Command, Handler, Overrides, Report, Runner

logger = logging.getLogger(__name__)

console = Console()
error_console = Console(stderr=True)

InstanceOption = Annotated[Path, typer.Option("--instance", help="Instance file (YAML, schema: 1)")]
OutOption = Annotated[Path, typer.Option("--out", help="CSV report to write")]
TolOption = Annotated[Optional[float], typer.Option("--tol", help="Comparison tolerance of the command")]
GridScaleOption = Annotated[int, typer.Option("--grid-scale", min=1, help="Refine grids by this factor")]
SeedOption = Annotated[Optional[int], typer.Option("--seed-override", help="Seed instead of the instance digest")]

STATUS_STYLE = {"holds": "green", "fails": "red", "inconclusive": "yellow"}


def execute(command: Command, handler: Handler, instance: Path, out: Path, overrides: Overrides) -> Report:
    """Run one command, print its summary line and exit with the report's code."""
    try:
        report = Runner(instance, out, overrides).run(command, handler)
    except DirregError as e:
        error_console.print(f"[bold red]error[/bold red] {command.value}: {e.detail}")
        raise typer.Exit(code=e.exit_code)
    except ValueError as e:
        error_console.print(f"[bold red]error[/bold red] {command.value}: {e}")
        raise typer.Exit(code=1)

    style = STATUS_STYLE[report.status.value]
    console.print(
        f"[bold]{report.command}[/bold] [{style}]{report.status.value}[/{style}] "
        f"{report.summary} ({report.rows} rows -> {report.out_path}, {report.wall_time:.2f}s)",
        highlight=False,
    )
    if report.exit_code:
        raise typer.Exit(code=report.exit_code)
    return report
