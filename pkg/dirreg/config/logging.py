import logging

from rich.console import Console
from rich.logging import RichHandler

from dirreg.config import log_level


def setup_logging(level: str | None = None) -> None:
    """Route the package loggers through a rich handler on stderr."""
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))

    root = logging.getLogger("dirreg")
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level or log_level())
    root.propagate = False
