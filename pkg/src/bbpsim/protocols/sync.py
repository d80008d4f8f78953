#! /usr/bin/env python3
"""
PPB synchronization: nodes advertise their body hash with CheckSync and exchange
PPB payloads on mismatch until both sides hold the merged body
Date: Mar 11, 2025
"""
# Local Imports
from bbpsim.execution.validation import ValidationCache
from bbpsim.mempool.selection import PrePackedBody, merge_ppb, tso_select
from bbpsim.protocols.events import Outcome
from bbpsim.protocols.messages import CheckSync, PpbPayload


def _install(node, ppb: PrePackedBody, cache: ValidationCache) -> bool:
    """Pre-validate ppb on the head and make it current. Returns True if the body hash changed."""
    head = node.chain.head
    info = cache.pre_validate(head.hash, node.chain.head_state, ppb.txs)
    changed = node.info is None or node.info.base_hash != info.base_hash or node.info.body_hash != info.body_hash
    node.ppb, node.info = ppb, info
    return changed


def announce(node, out: Outcome) -> None:
    message = CheckSync(node.info.body_hash, node.info.base_hash)
    for dst in node.neighbors:
        out.send(dst, message)


def rebuild_ppb(node, ctx, cache: ValidationCache, out: Outcome) -> bool:
    """
    Select a fresh PPB on the current head and advertise it if its hash changed
    :param node: NodeState
    :param ctx: ProtocolContext
    :param cache: Shared validation cache
    :param out: Outcome to append to
    :return: True if a CheckSync went out
    """
    T = node.chain.head.header.timestamp
    ppb = tso_select(node.pool, T, ctx.gas_limit, received_by=T + ctx.delta_ms)
    if _install(node, ppb, cache):
        announce(node, out)
        return True
    return False


def ppb_sync_on_event(node, ctx, cache: ValidationCache, src: int, message, out: Outcome) -> None:
    """
    Handle a CheckSync or PpbPayload from a neighbour
    :param node: NodeState
    :param ctx: ProtocolContext
    :param cache: Shared validation cache
    :param src: Sending neighbour
    :param message: CheckSync or PpbPayload
    :param out: Outcome to append to
    """
    if node.info is None:
        return
    base = node.info.base_hash
    if isinstance(message, CheckSync):
        node.peer_body[src] = (message.base, message.body_hash)
        if message.base == base and message.body_hash != node.info.body_hash:
            # the cap bounds payload exchanges per neighbour and height; body changes are always announced
            rounds = node.sync_rounds.get((base, src), 0)
            if rounds < ctx.max_sync_rounds:
                node.sync_rounds[(base, src)] = rounds + 1
                out.send(src, PpbPayload(node.ppb.txs, base))
        return

    if message.base != base:
        return
    if not message.is_reply:
        out.send(src, PpbPayload(node.ppb.txs, base, is_reply=True))
    merged = merge_ppb(node.ppb, message.txs, node.pool, node.ppb.threshold_T, ctx.delta_ms, ctx.gas_limit)
    if _install(node, merged, cache):
        announce(node, out)
