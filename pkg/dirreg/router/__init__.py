from pathlib import Path

import typer

from dirreg.router.coderiv.routes import HANDLERS as coderiv_handlers
from dirreg.router.coderiv.routes import router as coderiv_router
from dirreg.router.ekeland.routes import HANDLERS as ekeland_handlers
from dirreg.router.ekeland.routes import router as ekeland_router
from dirreg.router.variation.routes import HANDLERS as variation_handlers
from dirreg.router.variation.routes import router as variation_router
from dirreg.router.wellposed.routes import HANDLERS as wellposed_handlers
from dirreg.router.wellposed.routes import router as wellposed_router
from dirreg.services.runner import Command, Handler, Overrides, Report, Runner

router = typer.Typer()

for sub_router in (wellposed_router, coderiv_router, variation_router, ekeland_router):
    router.registered_commands.extend(sub_router.registered_commands)

HANDLERS: dict[Command, Handler] = {
    **wellposed_handlers,
    **coderiv_handlers,
    **variation_handlers,
    **ekeland_handlers,
}


def run(command: Command | str, instance: str | Path, out_path: str | Path, overrides: Overrides | None = None) -> Report:
    """Run a command without the command line; errors propagate as exceptions."""
    command = Command(command)
    return Runner(instance, out_path, overrides).run(command, HANDLERS[command])
