#! /usr/bin/env python3
"""
Process-level settings read from the environment (.env supported)
Date: Mar 3, 2025
"""
# Standard Library Imports
import os
from dataclasses import dataclass

# Third Party Imports
from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    """
    Environment knobs. None of them is required.
    """
    log_level: str = "INFO"
    workers: int = 1
    max_cells: int = 500
    full_oracles: bool = False


def load_settings() -> Settings:
    """
    Load settings from the environment after reading a .env file if present
    :return: Settings instance
    """
    load_dotenv()
    return Settings(
        log_level=os.getenv("BBPSIM_LOG_LEVEL", "INFO"),
        workers=max(1, int(os.getenv("BBPSIM_WORKERS", "1"))),
        max_cells=max(1, int(os.getenv("BBPSIM_MAX_CELLS", "500"))),
        full_oracles=os.getenv("BBPSIM_FULL_ORACLES", "0") == "1",
    )
