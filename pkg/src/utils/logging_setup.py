import logging
import os
import sys


def configure_logging(level: str | None = None) -> None:
    """
    Install a single stderr handler with the [LEVEL] prefix format.

    Args:
        level: Log level name. Falls back to HAMMERSTEIN_LOG_LEVEL, then INFO.
    """
    level_name = (level or os.getenv("HAMMERSTEIN_LOG_LEVEL", "INFO")).upper()
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.INFO))
