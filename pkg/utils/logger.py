"""
Logging utility for the KMS trace classifier

Diagnostics go to standard error; standard output is reserved for reports.
"""

import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

def get_logger(name: str, level: str = "NOTSET") -> logging.Logger:
    """
    Get a configured logger instance

    Args:
        name: Logger name (usually __name__)
        level: Logging level (DEBUG, INFO, WARNING, ERROR); NOTSET defers
            to the root level chosen by setup_logging

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(getattr(logging, level.upper()))
        # Module handlers already print; avoid a second copy from the root
        logger.propagate = False

    return logger

def setup_logging(level: str = "WARNING") -> None:
    """
    Setup global logging configuration

    Args:
        level: Global logging level
    """
    numeric = getattr(logging, level.upper())
    logging.basicConfig(
        level=numeric,
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ]
    )
    logging.getLogger().setLevel(numeric)
