#! /usr/bin/env python3
"""
Named random streams derived from one scenario seed
Date: Mar 9, 2025
"""
# Standard Library Imports
import hashlib

# Third Party Imports
import numpy as np


def derive_stream_seed(seed: int, name: str) -> np.random.SeedSequence:
    """
    Seed sequence for a named stream. The name is hashed with SHA-256, never with
    ``hash()``, so streams are identical across processes.
    :param seed: Scenario seed
    :param name: Stream name (topology, mining, workload, links, node/<i>, ...)
    :return: numpy SeedSequence
    """
    digest = hashlib.sha256(name.encode()).digest()
    words = [int.from_bytes(digest[i:i + 4], "big") for i in range(0, 16, 4)]
    return np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, *words])


def derive_stream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(derive_stream_seed(seed, name))


class RandomStreams:
    """
    Lazily created generators, one per name. Drawing from one never moves another.
    """
    __slots__ = ("seed", "_streams")

    def __init__(self, seed: int):
        """
        Constructor for RandomStreams class
        :param seed: Scenario seed
        """
        self.seed = seed
        self._streams: dict[str, np.random.Generator] = {}

    def __getitem__(self, name: str) -> np.random.Generator:
        stream = self._streams.get(name)
        if stream is None:
            stream = self._streams[name] = derive_stream(self.seed, name)
        return stream

    def node(self, index: int) -> np.random.Generator:
        return self[f"node/{index}"]
