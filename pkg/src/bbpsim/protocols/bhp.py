#! /usr/bin/env python3
"""
Hybrid block propagation as run by Ethereum nodes: the full block is pushed to
sqrt(N) neighbours after a header check, and its hash is announced to the rest
once full validation is done. Announced blocks are pulled header first, body second.
Date: Mar 12, 2025
"""
# Standard Library Imports
from collections.abc import Callable
from dataclasses import dataclass

# Local Imports
from bbpsim.chain.model import Block, BlockHeader
from bbpsim.execution.costs import ValidationPath, validation_cost
from bbpsim.protocols.base import NodeState, PropagationProtocol, register
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.gossip import split_fanout
from bbpsim.protocols.messages import (BlockBodyMsg, BlockHashAnnounce, BlockHeaderMsg, FullBlock, GetBody,
                                       GetHeader)

HEADER_TIMER = "t1"
BODY_TIMER = "t2"


@dataclass(frozen=True)
class PendingHeader:
    header: BlockHeader
    hop: int


@register
class HybridBlockPropagation(PropagationProtocol):
    name = "bhp"

    def __init__(self, ctx):
        """
        Constructor for HybridBlockPropagation class
        :param ctx: ProtocolContext
        """
        super().__init__(ctx)
        self.timer_handlers.update({HEADER_TIMER: self.on_header_timer, BODY_TIMER: self.on_body_timer})

    def extra_handlers(self) -> dict[type, Callable]:
        return {
            BlockHashAnnounce: self.on_announce,
            GetHeader: self.on_get_header,
            BlockHeaderMsg: self.on_header,
            GetBody: self.on_get_body,
            BlockBodyMsg: self.on_body,
        }

    def _body_cost(self, block: Block) -> float:
        """Full validation time minus the header check already charged"""
        cost = validation_cost(self.ctx.costs, len(block.body), path=ValidationPath.FULL)
        return cost.total_ms - cost.header_ms

    def _push(self, node: NodeState, block: Block, hop: int, src: int | None, out: Outcome) -> None:
        if block.hash in node.pushed:
            return
        node.pushed.add(block.hash)
        exclude = {n for n in node.neighbors if n == src or node.knows(block.hash, n)}
        full, _ = split_fanout(node.neighbors, exclude, node.degree, node.rng)
        for dst in full:
            node.mark_known(block.hash, dst)
            out.send(dst, FullBlock(block, hop))

    def forward(self, node: NodeState, block: Block, src: int | None, out: Outcome) -> None:
        self._push(node, block, node.chain.hop(block.hash) + 1, src, out)
        for dst in node.unaware(block.hash, src):
            node.mark_known(block.hash, dst)
            out.send(dst, BlockHashAnnounce(block.hash, block.number))

    def _drop_pending(self, node: NodeState, block_hash, out: Outcome) -> None:
        if node.announcers.pop(block_hash, None) is not None:
            out.cancel_timer(HEADER_TIMER, block_hash)
            out.cancel_timer(BODY_TIMER, block_hash)
        node.partial.pop(block_hash, None)

    def on_full_block(self, node: NodeState, src: int, message: FullBlock, now: float, out: Outcome) -> None:
        block = message.block
        node.mark_known(block.hash, src)
        self._drop_pending(node, block.hash, out)
        self.first_receipt(node, block.header, out)
        if node.chain.has(block.hash) or block.hash in node.pushed:
            return
        parent = node.chain.get(block.header.parent_hash)
        if parent is not None and block.is_consistent():
            # header check, then push before executing the body
            out.charge(self.ctx.costs.t_h)
            self._push(node, block, message.hop + 1, src, out)
            self.receive_block(node, block, src, message.hop, "push", now, out, cost_ms=self._body_cost(block))
            return
        self.receive_block(node, block, src, message.hop, "push", now, out)

    def on_announce(self, node: NodeState, src: int, message: BlockHashAnnounce, now: float, out: Outcome) -> None:
        node.mark_known(message.block_hash, src)
        if node.chain.has(message.block_hash) or message.block_hash in node.pushed:
            return
        announcers = node.announcers.setdefault(message.block_hash, [])
        announcers.append(src)
        if len(announcers) == 1:
            out.start_timer(HEADER_TIMER, message.block_hash, self.ctx.t1_ms)

    def on_header_timer(self, node: NodeState, block_hash, now: float, out: Outcome) -> None:
        announcers = node.announcers.get(block_hash)
        if announcers and not node.chain.has(block_hash):
            out.send(announcers[0], GetHeader(block_hash))

    def on_get_header(self, node: NodeState, src: int, message: GetHeader, now: float, out: Outcome) -> None:
        block = node.chain.get(message.block_hash)
        if block is not None:
            out.send(src, BlockHeaderMsg(block.header, node.chain.hop(block.hash) + 1))

    def on_header(self, node: NodeState, src: int, message: BlockHeaderMsg, now: float, out: Outcome) -> None:
        header = message.header
        if header.hash not in node.announcers or node.chain.has(header.hash):
            return
        self.first_receipt(node, header, out)
        out.charge(self.ctx.costs.t_h)
        node.partial[header.hash] = PendingHeader(header, message.hop)
        out.start_timer(BODY_TIMER, header.hash, self.ctx.t2_ms)

    def on_body_timer(self, node: NodeState, block_hash, now: float, out: Outcome) -> None:
        announcers = node.announcers.get(block_hash)
        if not announcers or block_hash not in node.partial or node.chain.has(block_hash):
            return
        dst = announcers[int(node.rng.integers(len(announcers)))]
        out.send(dst, GetBody(block_hash))

    def on_get_body(self, node: NodeState, src: int, message: GetBody, now: float, out: Outcome) -> None:
        block = node.chain.get(message.block_hash)
        if block is not None:
            out.send(src, BlockBodyMsg(block.hash, block.body))

    def on_body(self, node: NodeState, src: int, message: BlockBodyMsg, now: float, out: Outcome) -> None:
        pending = node.partial.pop(message.block_hash, None)
        node.announcers.pop(message.block_hash, None)
        if pending is None or node.chain.has(message.block_hash):
            return
        block = Block(pending.header, message.txs)
        if not block.is_consistent():
            out.stale("invalid_block", block.number)
            return
        self.receive_block(node, block, src, pending.hop, "announce", now, out, cost_ms=self._body_cost(block))
