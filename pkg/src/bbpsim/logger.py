#! /usr/bin/env python3
"""
Logging setup shared by the CLI and the simulation engine
Date: Mar 3, 2025
"""
# Standard Library Imports
import logging
import sys

_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """
    Configure the root ``bbpsim`` logger with a single stderr handler.
    Calling it again only changes the level.
    :param level: Logging level name (DEBUG, INFO, WARNING, ...)
    """
    root = logging.getLogger("bbpsim")
    root.setLevel(level.upper())
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
    root.propagate = False


def banner(title: str, width: int = 40) -> str:
    """
    Section separator used for console output
    :param title: Section title
    :param width: Number of '=' on each side
    :return: The banner line
    """
    return f"{width * '='} {title} {width * '='}"
