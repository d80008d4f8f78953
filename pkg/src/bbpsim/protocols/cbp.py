#! /usr/bin/env python3
"""
Compact block propagation: the receiver rebuilds the block from its own pool and
asks the sender only for the transactions it is missing
Date: Mar 11, 2025
"""
# Standard Library Imports
from collections.abc import Callable
from dataclasses import dataclass

# Local Imports
from bbpsim.chain.model import Block, BlockHeader, Transaction
from bbpsim.chain.primitives import Hash256
from bbpsim.protocols.base import NodeState, register
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.lbp import LegacyBlockPropagation
from bbpsim.protocols.messages import CompactBlock, FullBlock, GetData, GetMissedTxs, MissedTxs


@dataclass
class PartialBlock:
    """A compact block waiting for missing transactions"""
    header: BlockHeader
    tx_hashes: tuple[Hash256, ...]
    txs: list[Transaction | None]
    hop: int
    pool_hits: int

    def missing(self) -> tuple[Hash256, ...]:
        return tuple(h for h, tx in zip(self.tx_hashes, self.txs) if tx is None)


@register
class CompactBlockPropagation(LegacyBlockPropagation):
    name = "cbp"

    def extra_handlers(self) -> dict[type, Callable]:
        handlers = super().extra_handlers()
        handlers.update({
            CompactBlock: self.on_compact,
            GetMissedTxs: self.on_get_missed,
            MissedTxs: self.on_missed,
        })
        return handlers

    def on_get_data(self, node: NodeState, src: int, message: GetData, now: float, out: Outcome) -> None:
        if message.want_full:
            super().on_get_data(node, src, message, now, out)
            return
        block = node.chain.get(message.block_hash)
        if block is not None:
            node.mark_known(block.hash, src)
            hop = node.chain.hop(block.hash) + 1
            out.send(src, CompactBlock(block.header, tuple(tx.hash for tx in block.body), hop))

    def on_compact(self, node: NodeState, src: int, message: CompactBlock, now: float, out: Outcome) -> None:
        header = message.header
        self.first_receipt(node, header, out)
        if node.chain.has(header.hash) or header.hash in node.partial:
            return
        txs = []
        for tx_hash in message.tx_hashes:
            entry = node.pool.get(tx_hash)
            txs.append(entry.tx if entry is not None else None)
        hits = sum(tx is not None for tx in txs)
        if hits == len(txs):
            node.requested.pop(header.hash, None)
            self.receive_block(node, Block(header, tuple(txs)), src, message.hop, "compact", now, out,
                               pool_hits=hits)
            return
        partial = PartialBlock(header, message.tx_hashes, txs, message.hop, hits)
        node.partial[header.hash] = partial
        out.send(src, GetMissedTxs(header.hash, partial.missing()))

    def on_get_missed(self, node: NodeState, src: int, message: GetMissedTxs, now: float, out: Outcome) -> None:
        block = node.chain.get(message.block_hash)
        if block is None:
            return
        by_hash = {tx.hash: tx for tx in block.body}
        out.send(src, MissedTxs(block.hash, tuple(by_hash[h] for h in message.tx_hashes if h in by_hash)))

    def on_missed(self, node: NodeState, src: int, message: MissedTxs, now: float, out: Outcome) -> None:
        partial = node.partial.pop(message.block_hash, None)
        if partial is None or node.chain.has(message.block_hash):
            return
        supplied = {tx.hash: tx for tx in message.txs}
        txs = [tx if tx is not None else supplied.get(h) for h, tx in zip(partial.tx_hashes, partial.txs)]
        if any(tx is None for tx in txs):
            node.requested[message.block_hash] = src
            out.send(src, GetData(message.block_hash, want_full=True))
            return
        node.requested.pop(message.block_hash, None)
        self.receive_block(node, Block(partial.header, tuple(txs)), src, partial.hop, "missed", now, out,
                           pool_hits=partial.pool_hits)

    def on_full_block(self, node: NodeState, src: int, message: FullBlock, now: float, out: Outcome) -> None:
        node.partial.pop(message.block.hash, None)
        super().on_full_block(node, src, message, now, out)
