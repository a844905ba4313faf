"""
Configuração de logging da linha de comando. A biblioteca só cria loggers;
quem instala handlers é a CLI.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler

LEVELS = {-1: logging.ERROR, 0: logging.WARNING, 1: logging.INFO}


def setup_logging(verbosity: int = 0, console: Console | None = None) -> logging.Logger:
    """
    Instala um `RichHandler` no logger `star`. `verbosity` negativo silencia
    avisos; 1 mostra progresso; 2 ou mais mostra cada evolução.
    """
    logger = logging.getLogger("star")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(
        console=console or Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(LEVELS.get(verbosity, logging.DEBUG if verbosity > 1 else logging.ERROR))
    logger.propagate = False
    return logger
