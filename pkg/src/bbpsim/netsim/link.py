#! /usr/bin/env python3
"""
Point-to-point link model
Date: Mar 9, 2025
"""
# Standard Library Imports
from dataclasses import dataclass

# Third Party Imports
import numpy as np


@dataclass(frozen=True)
class Link:
    latency_ms: float
    bandwidth_bps: float = 55e6
    loss_prob: float = 0.0
    retransmit_multiplier: float = 2.0

    def __post_init__(self):
        if self.latency_ms < 0 or self.bandwidth_bps <= 0:
            raise ValueError("latency must be non-negative and bandwidth positive")
        if not 0 <= self.loss_prob <= 1:
            raise ValueError("loss_prob must be in [0, 1]")

    def transfer_ms(self, n_bytes: int) -> float:
        """Latency plus serialization time"""
        return self.latency_ms + 8 * n_bytes / self.bandwidth_bps * 1000


def deliver(link: Link, n_bytes: int, rng: np.random.Generator) -> float:
    """
    Delivery delay of one message. A lost message is retransmitted once after a
    timeout of retransmit_multiplier times the base delay.
    :param link: Link the message crosses
    :param n_bytes: Message size
    :param rng: The links stream
    :return: Delay in ms
    """
    if n_bytes < 0:
        raise ValueError("message size must be non-negative")
    base = link.transfer_ms(n_bytes)
    # one draw per message, lost or not
    lost = rng.random() < link.loss_prob
    return base + link.retransmit_multiplier * base if lost else base
