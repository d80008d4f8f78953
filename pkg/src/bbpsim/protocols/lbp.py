#! /usr/bin/env python3
"""
Legacy block propagation: inv announcement, getData request, full block
Date: Mar 11, 2025
"""
# Standard Library Imports
from collections.abc import Callable

# Local Imports
from bbpsim.chain.model import Block
from bbpsim.protocols.base import NodeState, PropagationProtocol, register
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.messages import GetData, Inv


@register
class LegacyBlockPropagation(PropagationProtocol):
    name = "lbp"

    def extra_handlers(self) -> dict[type, Callable]:
        return {Inv: self.on_inv}

    def forward(self, node: NodeState, block: Block, src: int | None, out: Outcome) -> None:
        for dst in node.unaware(block.hash, src):
            node.mark_known(block.hash, dst)
            out.send(dst, Inv(block.hash))

    def on_inv(self, node: NodeState, src: int, message: Inv, now: float, out: Outcome) -> None:
        node.mark_known(message.block_hash, src)
        if node.chain.has(message.block_hash) or message.block_hash in node.requested:
            return
        node.requested[message.block_hash] = src
        out.send(src, GetData(message.block_hash))
