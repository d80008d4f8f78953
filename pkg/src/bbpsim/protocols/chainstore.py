#! /usr/bin/env python3
"""
Per-node block store: committed blocks, recent states, the head and orphan buffer.
Fork choice is first-received-wins with at most a one-block reorg.
Date: Mar 10, 2025
"""
# Standard Library Imports
from dataclasses import dataclass
from enum import Enum

# Local Imports
from bbpsim.chain.model import Block, WorldState
from bbpsim.chain.primitives import Hash256
from bbpsim.mempool.pool import PoolEntry, TxPool

# states older than head - STATE_DEPTH are dropped
STATE_DEPTH = 4


class Attach(str, Enum):
    HEAD = "head"
    REORG = "reorg"
    SIDE = "side"

    @property
    def extends(self) -> bool:
        return self is not Attach.SIDE


@dataclass(frozen=True)
class Orphan:
    block: Block
    src: int | None
    hop: int
    path: str


class ChainStore:
    __slots__ = ("blocks", "states", "hops", "removed", "orphans", "head_hash")

    def __init__(self, genesis: Block, genesis_state: WorldState):
        """
        Constructor for ChainStore class
        :param genesis: Block 0
        :param genesis_state: State after block 0
        """
        self.blocks: dict[Hash256, Block] = {genesis.hash: genesis}
        self.states: dict[Hash256, WorldState] = {genesis.hash: genesis_state}
        self.hops: dict[Hash256, int] = {genesis.hash: 0}
        self.removed: dict[Hash256, list[PoolEntry]] = {}
        self.orphans: dict[Hash256, list[Orphan]] = {}
        self.head_hash = genesis.hash

    @property
    def head(self) -> Block:
        return self.blocks[self.head_hash]

    @property
    def head_state(self) -> WorldState:
        return self.states[self.head_hash]

    @property
    def height(self) -> int:
        return self.head.number

    def has(self, block_hash: Hash256) -> bool:
        return block_hash in self.blocks

    def get(self, block_hash: Hash256) -> Block | None:
        return self.blocks.get(block_hash)

    def state(self, block_hash: Hash256) -> WorldState | None:
        return self.states.get(block_hash)

    def hop(self, block_hash: Hash256) -> int:
        return self.hops.get(block_hash, 0)

    def ancestor(self, number: int) -> Block | None:
        """Block at height number on the head chain"""
        block = self.head
        while block is not None and block.number > number:
            block = self.blocks.get(block.header.parent_hash)
        return block if block is not None and block.number == number else None

    def add_orphan(self, orphan: Orphan) -> None:
        waiting = self.orphans.setdefault(orphan.block.header.parent_hash, [])
        if all(o.block.hash != orphan.block.hash for o in waiting):
            waiting.append(orphan)

    def pop_orphans(self, parent_hash: Hash256) -> list[Orphan]:
        return self.orphans.pop(parent_hash, [])

    def attach(self, block: Block, state: WorldState, hop: int, pool: TxPool) -> Attach:
        """
        Store a validated block and move the head if it wins. The pool is reset along
        the new head and re-filled from an abandoned head on a reorg.
        :param block: Validated block whose parent is stored
        :param state: Its post state
        :param hop: Hop count it arrived with
        :param pool: This node's pool
        :return: How the block was attached
        """
        head = self.head
        block_hash = block.hash
        self.blocks[block_hash] = block
        self.states[block_hash] = state
        self.hops[block_hash] = hop

        if block.header.parent_hash == head.hash:
            self.removed[block_hash] = pool.reset(block)
            self.head_hash = block_hash
            self._prune()
            return Attach.HEAD

        parent = self.blocks[block.header.parent_hash]
        fork_state = self.states.get(head.header.parent_hash)
        if (block.number > head.number and parent.header.parent_hash == head.header.parent_hash
                and fork_state is not None):
            pool.reinject(self.removed.pop(head.hash, ()), fork_state, (tx.sender for tx in head.body))
            self.removed[parent.hash] = pool.reset(parent)
            self.removed[block_hash] = pool.reset(block)
            self.head_hash = block_hash
            self._prune()
            return Attach.REORG
        return Attach.SIDE

    def _prune(self) -> None:
        floor = self.head.number - STATE_DEPTH
        for block_hash in [h for h in self.states if self.blocks[h].number < floor]:
            del self.states[block_hash]
            self.removed.pop(block_hash, None)
