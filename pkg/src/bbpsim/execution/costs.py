#! /usr/bin/env python3
"""
Simulated validation time. Nodes are charged these costs instead of wall-clock time.
Date: Mar 5, 2025
"""
# Standard Library Imports
from dataclasses import dataclass
from enum import Enum
from typing import Protocol


class CostParams(Protocol):
    t_h: float
    t_e: float
    t_w: float
    t_r: float


class ValidationPath(str, Enum):
    # header verification only (BHP forwards after this step)
    HEADER = "header"
    # finalize of a pre-validated body: read the intermediate state, execute U_g
    PPB = "ppb"
    # sequential execution and storage of every transaction
    FULL = "full"


@dataclass(frozen=True)
class ValidationCost:
    header_ms: float = 0.0
    read_ms: float = 0.0
    execution_ms: float = 0.0
    storage_ms: float = 0.0

    @property
    def total_ms(self) -> float:
        return self.header_ms + self.read_ms + self.execution_ms + self.storage_ms


def validation_cost(costs: CostParams, n_t: int, n_u: int = 0,
                    path: ValidationPath = ValidationPath.FULL) -> ValidationCost:
    """
    Simulated processing time of one block at one node
    :param costs: Object carrying t_h, t_e, t_w, t_r in ms
    :param n_t: Transactions in the block
    :param n_u: Transactions left to execute after pre-validation
    :param path: Which validation path runs
    :return: ValidationCost broken into header / read / execution / storage
    """
    if path is ValidationPath.HEADER:
        return ValidationCost(header_ms=costs.t_h)
    if path is ValidationPath.PPB:
        n_u = min(n_u, n_t)
        return ValidationCost(header_ms=costs.t_h, read_ms=(n_t - n_u) * costs.t_r,
                              execution_ms=n_u * costs.t_e)
    return ValidationCost(header_ms=costs.t_h, execution_ms=n_t * costs.t_e, storage_ms=n_t * costs.t_w)
