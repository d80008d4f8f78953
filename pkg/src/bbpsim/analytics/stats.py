#! /usr/bin/env python3
"""
Nearest-rank percentiles and small summary helpers
Date: Mar 13, 2025
"""
# Standard Library Imports
import math
from collections.abc import Sequence

# Third Party Imports
import numpy as np


def coverage_rank(n_nodes: int, q: float) -> int:
    """Number of nodes that make up q% of the network, rounded up"""
    return max(1, math.ceil(q * n_nodes / 100 - 1e-9))


def percentile(values: Sequence[float], q: float) -> float:
    """
    Nearest-rank percentile: the smallest value with at least q% of the values at or below it
    :param values: Non-empty sample
    :param q: Percent in (0, 100]
    :return: One of the sample values
    """
    if len(values) == 0:
        raise ValueError("percentile of an empty sample")
    k = coverage_rank(len(values), q)
    return float(np.partition(np.asarray(values, dtype=float), k - 1)[k - 1])


def propagation_percentile(delays: Sequence[float], n_nodes: int, q: float) -> float | None:
    """
    Time until q% of all n_nodes committed. Nodes that never committed count as
    infinitely late, so the result is None when fewer than the required share did.
    :param delays: Commit time minus mine time of every committing node, miner included
    :param n_nodes: Network size
    :param q: Percent in (0, 100]
    :return: Delay in ms or None
    """
    k = coverage_rank(n_nodes, q)
    if len(delays) < k:
        return None
    return float(np.partition(np.asarray(delays, dtype=float), k - 1)[k - 1])


def mean(values: Sequence[float]) -> float | None:
    return float(np.mean(values)) if len(values) else None


def mean_std(values: Sequence[float]) -> tuple[float | None, float | None]:
    if not len(values):
        return None, None
    return float(np.mean(values)), float(np.std(values))
