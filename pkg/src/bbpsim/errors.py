#! /usr/bin/env python3
"""
Exceptions raised by the simulator
Date: Mar 3, 2025
"""


class BbpSimError(Exception):
    """
    Base class for all simulator failures
    """


class ConfigError(BbpSimError):
    """
    A config or parameter file could not be read or did not validate
    """


class SimulationError(BbpSimError):
    """
    A run could not complete (event queue exhausted, topology retries spent, ...)
    """


class ModelParameterError(BbpSimError):
    """
    An analytic model is missing a symbol or got one out of range
    """
    def __init__(self, symbol: str, reason: str = "missing required parameter"):
        """
        Constructor for ModelParameterError class
        :param symbol: Name of the offending parameter
        :param reason: Short description of the problem
        """
        self.symbol = symbol
        super().__init__(f"{reason}: {symbol}")


class TraceError(BbpSimError):
    """
    A trace is empty or incomplete and cannot be reduced
    """
