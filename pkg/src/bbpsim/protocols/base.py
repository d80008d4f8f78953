#! /usr/bin/env python3
"""
Base class for block propagation protocols and the per-node state they act on
Date: Mar 10, 2025
"""
# Standard Library Imports
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import ClassVar

# Third Party Imports
import numpy as np

# Local Imports
from bbpsim.chain.model import Block, Transaction, WorldState
from bbpsim.chain.primitives import AccountId, Hash256
from bbpsim.execution.costs import CostParams, ValidationPath, validation_cost
from bbpsim.execution.validation import ValidationCache, ValidationInfo, seal_block
from bbpsim.mempool.pool import TxPool
from bbpsim.mempool.selection import PrePackedBody, legacy_select
from bbpsim.protocols.chainstore import STATE_DEPTH, Attach, ChainStore, Orphan
from bbpsim.protocols.events import MessageArrival, MineBlock, Outcome, Start, TimerFired
from bbpsim.protocols.gossip import is_tx_event, tx_gossip_on_event
from bbpsim.protocols.messages import FullBlock, GetData, SizeTable

# per-block bookkeeping older than head - KNOWN_DEPTH is forgotten
KNOWN_DEPTH = 2 * STATE_DEPTH


@dataclass(frozen=True)
class ProtocolContext:
    """
    Run-wide parameters shared by every node
    """
    costs: CostParams
    sizes: SizeTable
    gas_limit: int
    delta_ms: float = 1000.0
    t1_ms: float = 400.0
    t2_ms: float = 100.0
    max_sync_rounds: int = 4
    ppb_rebuild_delay_ms: float = 100.0
    cache: ValidationCache | None = None

    @classmethod
    def from_scenario(cls, scenario, cache: ValidationCache | None = None) -> "ProtocolContext":
        return cls(costs=scenario.costs, sizes=scenario.sizes, gas_limit=scenario.effective_gas_limit,
                   delta_ms=scenario.delta_ms, t1_ms=scenario.t1_ms, t2_ms=scenario.t2_ms,
                   max_sync_rounds=scenario.max_sync_rounds, ppb_rebuild_delay_ms=scenario.ppb_rebuild_delay_ms,
                   cache=cache if cache is not None else ValidationCache())


class NodeState:
    """
    Everything one node knows. Handlers mutate it in place.
    """
    __slots__ = ("index", "neighbors", "rng", "account", "is_miner", "dishonest", "pool", "chain", "seen_txs",
                 "tx_requested", "known", "block_heights", "requested", "seen_blocks", "peer_body", "ppb", "info",
                 "sync_rounds", "rebuild_pending", "announcers", "partial", "pushed")

    def __init__(self, index: int, neighbors: Sequence[int], genesis: Block, genesis_state: WorldState,
                 rng: np.random.Generator, account: AccountId, is_miner: bool = False, dishonest: bool = False):
        """
        Constructor for NodeState class
        :param index: Node id
        :param neighbors: Neighbour ids in a fixed order
        :param genesis: Block 0
        :param genesis_state: State after block 0
        :param rng: This node's random stream
        :param account: Coinbase account used when this node mines
        :param is_miner: Takes part in mining
        :param dishonest: Seals a legacy-selected body instead of its PPB
        """
        self.index = index
        self.neighbors = tuple(neighbors)
        self.rng = rng
        self.account = account
        self.is_miner = is_miner
        self.dishonest = dishonest
        self.pool = TxPool()
        self.chain = ChainStore(genesis, genesis_state)
        self.seen_txs: set[Hash256] = set()
        self.tx_requested: set[Hash256] = set()
        # block -> neighbours that already carried it either way
        self.known: dict[Hash256, set[int]] = {}
        # height noted for every block tracked above, used for pruning
        self.block_heights: dict[Hash256, int] = {}
        self.requested: dict[Hash256, int] = {}
        self.seen_blocks: set[Hash256] = set()
        # neighbour -> (base, body hash) from its last CheckSync
        self.peer_body: dict[int, tuple[Hash256, Hash256]] = {}
        self.ppb: PrePackedBody | None = None
        self.info: ValidationInfo | None = None
        self.sync_rounds: dict[tuple[Hash256, int], int] = {}
        self.rebuild_pending = False
        self.announcers: dict[Hash256, list[int]] = {}
        self.partial: dict[Hash256, object] = {}
        self.pushed: set[Hash256] = set()

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    def note_block(self, block_hash: Hash256, height: int) -> None:
        self.block_heights[block_hash] = height

    def mark_known(self, block_hash: Hash256, neighbor: int | None) -> None:
        self.block_heights.setdefault(block_hash, self.chain.height)
        if neighbor is not None:
            self.known.setdefault(block_hash, set()).add(neighbor)

    def knows(self, block_hash: Hash256, neighbor: int) -> bool:
        return neighbor in self.known.get(block_hash, ())

    def unaware(self, block_hash: Hash256, exclude: int | None = None) -> list[int]:
        """Neighbours that neither sent nor received this block from us"""
        carried = self.known.get(block_hash, ())
        return [n for n in self.neighbors if n != exclude and n not in carried]

    def prune(self) -> None:
        """
        Forget block and transaction bookkeeping older than head - KNOWN_DEPTH, and sync
        rounds counted on earlier bases
        """
        floor = self.chain.height - KNOWN_DEPTH
        for block_hash in [h for h, height in self.block_heights.items() if height < floor]:
            del self.block_heights[block_hash]
            self.known.pop(block_hash, None)
            self.seen_blocks.discard(block_hash)
            self.announcers.pop(block_hash, None)
            self.partial.pop(block_hash, None)
            self.pushed.discard(block_hash)
        old = self.chain.ancestor(floor)
        if old is not None:
            for tx in old.body:
                self.seen_txs.discard(tx.hash)
                self.tx_requested.discard(tx.hash)
        head = self.chain.head_hash
        self.sync_rounds = {key: n for key, n in self.sync_rounds.items() if key[0] == head}


class PropagationProtocol(ABC):
    """
    One instance serves every node of a run. ``on_event`` is the only entry point;
    it reads the event, mutates the node and returns an Outcome. No handler reads
    a clock or does I/O.
    """
    name: ClassVar[str] = ""

    def __init__(self, ctx: ProtocolContext):
        """
        Constructor for PropagationProtocol class
        :param ctx: Run-wide parameters
        """
        self.ctx = ctx
        self.cache = ctx.cache if ctx.cache is not None else ValidationCache()
        self.message_handlers: dict[type, Callable] = {FullBlock: self.on_full_block, GetData: self.on_get_data}
        self.message_handlers.update(self.extra_handlers())
        self.timer_handlers: dict[str, Callable] = {}

    def extra_handlers(self) -> dict[type, Callable]:
        return {}

    def on_event(self, node: NodeState, event, now: float) -> Outcome:
        """
        Dispatch one event
        :param node: Receiving node
        :param event: Start, MineBlock, TimerFired, a transaction event or a MessageArrival
        :param now: Time the handler starts (ms)
        :return: Outcome
        """
        out = Outcome()
        if is_tx_event(event):
            fresh = tx_gossip_on_event(node, event, now, out)
            if fresh:
                self.on_txs_pooled(node, fresh, now, out)
        elif isinstance(event, MessageArrival):
            handler = self.message_handlers.get(type(event.message))
            if handler is not None:
                handler(node, event.src, event.message, now, out)
        elif isinstance(event, TimerFired):
            handler = self.timer_handlers.get(event.name)
            if handler is not None:
                handler(node, event.key, now, out)
        elif isinstance(event, MineBlock):
            self.mine(node, now, out)
        elif isinstance(event, Start):
            self.on_start(node, now, out)
        return out

    # hooks
    def on_start(self, node: NodeState, now: float, out: Outcome) -> None:
        pass

    def on_txs_pooled(self, node: NodeState, txs: list[Transaction], now: float, out: Outcome) -> None:
        pass

    def on_new_head(self, node: NodeState, now: float, out: Outcome) -> None:
        pass

    @abstractmethod
    def forward(self, node: NodeState, block: Block, src: int | None, out: Outcome) -> None:
        """Disseminate a block this node just committed as its head"""

    def select_body(self, node: NodeState, now: float) -> Sequence[Transaction]:
        return legacy_select(node.pool, node.account, self.ctx.gas_limit)

    # mining
    def mine(self, node: NodeState, now: float, out: Outcome) -> Block:
        """
        Seal a block on the node's head, commit it locally and start dissemination
        """
        head = node.chain.head
        body = self.select_body(node, now)
        block, state = seal_block(head.header, node.chain.head_state, body, node.account, int(now))
        out.mined(block)
        node.seen_blocks.add(block.hash)
        node.note_block(block.hash, block.number)
        self.commit(node, block, state, path="mined", hop=0, src=None, proc_ms=0.0, n_u=0, now=now, out=out)
        return block

    # block intake
    def on_full_block(self, node: NodeState, src: int, message: FullBlock, now: float, out: Outcome) -> None:
        block = message.block
        node.mark_known(block.hash, src)
        path = self.full_block_path(node.requested.pop(block.hash, None) is not None)
        self.first_receipt(node, block.header, out)
        self.receive_block(node, block, src, message.hop, path, now, out)

    def full_block_path(self, requested: bool) -> str:
        return "full"

    def on_get_data(self, node: NodeState, src: int, message: GetData, now: float, out: Outcome) -> None:
        block = node.chain.get(message.block_hash)
        if block is not None:
            node.mark_known(block.hash, src)
            out.send(src, FullBlock(block, node.chain.hop(block.hash) + 1))

    def first_receipt(self, node: NodeState, header, out: Outcome) -> bool:
        if header.hash in node.seen_blocks:
            return False
        node.seen_blocks.add(header.hash)
        node.note_block(header.hash, header.number)
        return True

    def receive_block(self, node: NodeState, block: Block, src: int | None, hop: int, path: str, now: float,
                      out: Outcome, cost_ms: float | None = None, pool_hits: int | None = None) -> bool:
        """
        Fully validate a received block and commit it. A block with an unknown parent
        waits in the orphan buffer.
        :param cost_ms: Processing time to charge, the full validation cost by default
        :param pool_hits: Block transactions found in the pool, counted now if omitted
        :return: True if the block was committed
        """
        if node.chain.has(block.hash):
            return False
        parent = node.chain.get(block.header.parent_hash)
        if parent is None:
            node.chain.add_orphan(Orphan(block, src, hop, path))
            return False
        base_state = node.chain.state(parent.hash)
        if base_state is None:
            return False
        if cost_ms is None:
            cost_ms = validation_cost(self.ctx.costs, len(block.body), path=ValidationPath.FULL).total_ms
        out.charge(cost_ms)
        result = self.cache.full_validate(base_state, block, parent.header)
        if not result.accepted:
            out.stale("invalid_block", block.number)
            return False
        self.commit(node, block, result.state, path=path, hop=hop, src=src, proc_ms=cost_ms,
                    n_u=len(block.body), now=now, out=out, pool_hits=pool_hits)
        return True

    def commit(self, node: NodeState, block: Block, state: WorldState, *, path: str, hop: int, src: int | None,
               proc_ms: float, n_u: int, now: float, out: Outcome, pool_hits: int | None = None) -> Attach:
        """
        Record a validated block, apply fork choice, and forward it if it became the head
        :return: How the block was attached
        """
        if pool_hits is None:
            pool_hits = sum(tx.hash in node.pool for tx in block.body)
        attach = node.chain.attach(block, state, hop, node.pool)
        out.committed(block_hash=block.hash, height=block.number, path=path, hop=hop,
                      from_node=-1 if src is None else src, proc_ms=proc_ms, n_txs=len(block.body), n_u=n_u,
                      pool_hits=pool_hits)
        if attach.extends:
            node.prune()
            self.on_new_head(node, now, out)
            self.forward(node, block, src, out)
        else:
            out.stale("block", block.number)
        for orphan in node.chain.pop_orphans(block.hash):
            self.receive_block(node, orphan.block, orphan.src, orphan.hop, orphan.path, now, out)
        return attach


PROTOCOLS: dict[str, type[PropagationProtocol]] = {}


def register(cls: type[PropagationProtocol]) -> type[PropagationProtocol]:
    """Class decorator adding a protocol to the name lookup used by the engine"""
    PROTOCOLS[cls.name] = cls
    return cls


def get_protocol(name: str, ctx: ProtocolContext) -> PropagationProtocol:
    try:
        return PROTOCOLS[name](ctx)
    except KeyError:
        raise ValueError(f"unknown protocol '{name}' (known: {sorted(PROTOCOLS)})") from None
