"""Logging sink setup."""
import os
import sys

from loguru import logger


def configure_logging(quiet: bool = False, level: str = None):
    """Install a single stderr sink; --quiet keeps warnings and errors only."""
    level = level or os.getenv("QNLS_LOG_LEVEL", "INFO")
    if quiet:
        level = "WARNING"
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{function} - {message}",
    )
    return logger
