import logging

import typer

from dirreg import __version__
from dirreg.config import check_config
from dirreg.config.logging import setup_logging
from dirreg.router import router

app = typer.Typer(
    name="dirreg",
    help="Directional openness, regularity and continuity of set-valued mappings.",
    no_args_is_help=True,
    add_completion=False,
)

check_config()

app.registered_commands.extend(router.registered_commands)


def show_version(value: bool) -> None:
    if value:
        typer.echo(f"dirreg {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log every bisection step"),
    version: bool = typer.Option(False, "--version", callback=show_version, is_eager=True),
) -> None:
    setup_logging(logging.getLevelName(logging.DEBUG) if verbose else None)


if __name__ == "__main__":
    app()
