"""
Logging Setup
=============
One stream handler on the package logger; modules log through logging.getLogger(__name__)
with bracketed tags, e.g. "[QUADRATURE] simplex=U0:2 cells=16 error=3.1e-12".
"""

import logging
import sys

PACKAGE_LOGGER = "chernloc"
LOG_FORMAT = "%(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "WARNING") -> logging.Logger:
    """
    Install (once) a stderr handler on the chernloc logger and set its level.

    Args:
        level: Logging level name

    Returns:
        The package logger
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    if not any(getattr(h, "_chernloc", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._chernloc = True
        logger.addHandler(handler)
    logger.setLevel(level.upper())
    logger.propagate = False
    return logger
