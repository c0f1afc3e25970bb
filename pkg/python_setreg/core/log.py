"""Logging setup for the command-line front end."""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def level_for(verbosity: int) -> int:
    """Map a ``-v`` count to a logging level."""
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def configure_logging(verbosity: int = 0) -> None:
    """Send package log records to stderr at the level chosen by ``verbosity``."""
    logging.basicConfig(level=level_for(verbosity), format=LOG_FORMAT)
    logging.getLogger("python_setreg").setLevel(level_for(verbosity))
