#! /usr/bin/env python3
"""
Genesis block construction
Date: Mar 4, 2025
"""
# Local Imports
from bbpsim.chain.codec import body_hash, state_root
from bbpsim.chain.model import Block, BlockHeader, WorldState
from bbpsim.chain.primitives import ZERO_HASH


def genesis_block(state: WorldState) -> Block:
    """
    Block 0 committing to the initial allocation
    :param state: Initial world state
    :return: Empty block with timestamp 0 and a zero parent hash
    """
    header = BlockHeader(
        parent_hash=ZERO_HASH,
        number=0,
        timestamp=0,
        coinbase=0,
        txs_hash=body_hash(()),
        state_root=state_root(state),
    )
    return Block(header=header, body=())
