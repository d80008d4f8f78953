#! /usr/bin/env python3
"""
Bodyless block propagation: nodes agree on the next body ahead of time, so a block
travels as its header to every neighbour known to hold the same body
Date: Mar 11, 2025
"""
# Standard Library Imports
from collections.abc import Callable, Sequence

# Local Imports
from bbpsim.chain.model import Block, Transaction
from bbpsim.execution.costs import ValidationPath, validation_cost
from bbpsim.execution.validation import check_header
from bbpsim.mempool.selection import legacy_select
from bbpsim.protocols.base import NodeState, PropagationProtocol, register
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.messages import BlockHeaderMsg, CheckSync, FullBlock, GetData, PpbPayload
from bbpsim.protocols.sync import ppb_sync_on_event, rebuild_ppb

REBUILD_TIMER = "ppb"


@register
class BodylessBlockPropagation(PropagationProtocol):
    name = "bbp"

    def __init__(self, ctx):
        """
        Constructor for BodylessBlockPropagation class
        :param ctx: ProtocolContext
        """
        super().__init__(ctx)
        self.timer_handlers[REBUILD_TIMER] = self.on_rebuild_timer

    def extra_handlers(self) -> dict[type, Callable]:
        return {
            BlockHeaderMsg: self.on_header,
            CheckSync: self.on_sync_message,
            PpbPayload: self.on_sync_message,
        }

    # PPB upkeep
    def on_start(self, node: NodeState, now: float, out: Outcome) -> None:
        rebuild_ppb(node, self.ctx, self.cache, out)

    def on_new_head(self, node: NodeState, now: float, out: Outcome) -> None:
        node.rebuild_pending = False
        out.cancel_timer(REBUILD_TIMER, None)
        rebuild_ppb(node, self.ctx, self.cache, out)

    def on_txs_pooled(self, node: NodeState, txs: list[Transaction], now: float, out: Outcome) -> None:
        if node.rebuild_pending or node.ppb is None:
            return
        T = node.ppb.threshold_T
        present = {tx.hash for tx in node.ppb.txs}
        if any(tx.created_ts <= T and tx.hash not in present for tx in txs) and now <= T + self.ctx.delta_ms:
            node.rebuild_pending = True
            out.start_timer(REBUILD_TIMER, None, self.ctx.ppb_rebuild_delay_ms)

    def on_rebuild_timer(self, node: NodeState, key, now: float, out: Outcome) -> None:
        node.rebuild_pending = False
        rebuild_ppb(node, self.ctx, self.cache, out)

    def on_sync_message(self, node: NodeState, src: int, message, now: float, out: Outcome) -> None:
        ppb_sync_on_event(node, self.ctx, self.cache, src, message, out)

    # mining
    def select_body(self, node: NodeState, now: float) -> Sequence[Transaction]:
        if node.dishonest:
            return legacy_select(node.pool, node.account, self.ctx.gas_limit)
        if node.info is None or node.info.base_hash != node.chain.head_hash:
            rebuild_ppb(node, self.ctx, self.cache, Outcome())
        return node.info.pruned_ppb

    # dissemination
    def forward(self, node: NodeState, block: Block, src: int | None, out: Outcome) -> None:
        """
        Header to every neighbour whose last advertised body matches the block, the full
        block to the others
        """
        expected = (block.header.parent_hash, block.header.txs_hash)
        hop = node.chain.hop(block.hash) + 1
        for dst in node.unaware(block.hash, src):
            node.mark_known(block.hash, dst)
            if node.peer_body.get(dst) == expected:
                out.send(dst, BlockHeaderMsg(block.header, hop))
            else:
                out.send(dst, FullBlock(block, hop))

    def first_receipt(self, node: NodeState, header, out: Outcome) -> bool:
        if not super().first_receipt(node, header, out):
            return False
        info = node.info
        synced = info is not None and info.base_hash == header.parent_hash and info.body_hash == header.txs_hash
        out.sync(header.number, synced)
        return True

    def full_block_path(self, requested: bool) -> str:
        return "fallback" if requested else "full"

    def on_header(self, node: NodeState, src: int, message: BlockHeaderMsg, now: float, out: Outcome) -> None:
        header = message.header
        node.mark_known(header.hash, src)
        self.first_receipt(node, header, out)
        if node.chain.has(header.hash) or header.hash in node.requested:
            return

        info = node.info
        parent = node.chain.get(header.parent_hash)
        if parent is not None and not check_header(header, parent.header):
            out.charge(self.ctx.costs.t_h)
            out.stale("invalid_block", header.number)
            return
        if info is None or parent is None or info.base_hash != header.parent_hash or info.body_hash != header.txs_hash:
            out.charge(self.ctx.costs.t_h)
            node.requested[header.hash] = src
            out.send(src, GetData(header.hash, want_full=True))
            return

        cost = validation_cost(self.ctx.costs, len(info.pruned_ppb), info.n_u, ValidationPath.PPB).total_ms
        out.charge(cost)
        result = self.cache.finalize_validate(info, header, node.chain.state(parent.hash))
        if result.accepted:
            block = Block(header=header, body=info.pruned_ppb)
            self.commit(node, block, result.state, path="header", hop=message.hop, src=src, proc_ms=cost,
                        n_u=info.n_u, now=now, out=out)
        elif result.needs_full_block:
            node.requested[header.hash] = src
            out.send(src, GetData(header.hash, want_full=True))
        else:
            out.stale("invalid_block", header.number)
