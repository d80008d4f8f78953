#! /usr/bin/env python3
"""
Proof of work as a Poisson clock: exponential gaps with mean t_g, winner drawn
uniformly from the miners
Date: Mar 12, 2025
"""
# Standard Library Imports
from collections.abc import Iterator, Sequence

# Third Party Imports
import numpy as np


def mining_process(t_g_ms: float, miners: Sequence[int], rng: np.random.Generator,
                   start_ms: float = 0.0) -> Iterator[tuple[float, int]]:
    """
    Endless stream of (time_ms, winner) events
    :param t_g_ms: Mean block interval
    :param miners: Mining node ids
    :param rng: The mining stream
    :param start_ms: Clock start
    :return: Generator of events in time order
    """
    if t_g_ms <= 0:
        raise ValueError("t_g must be positive")
    if not miners:
        raise ValueError("at least one miner is required")
    miners = tuple(miners)
    now = start_ms
    while True:
        now += float(rng.exponential(t_g_ms))
        yield now, miners[int(rng.integers(len(miners)))]


def choose_miners(n_nodes: int, fraction: float, rng: np.random.Generator) -> tuple[int, ...]:
    """At least one node, sorted"""
    count = min(n_nodes, max(1, round(fraction * n_nodes)))
    return tuple(sorted(int(i) for i in rng.choice(n_nodes, size=count, replace=False)))


def is_voided(winner_height: int, top_height: int) -> bool:
    """A winner more than one block behind the network mines nothing"""
    return winner_height < top_height - 1
