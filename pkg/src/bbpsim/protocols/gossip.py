#! /usr/bin/env python3
"""
Transaction relay: full transactions to sqrt(N) neighbours, hash announcements to the rest
Date: Mar 10, 2025
"""
# Standard Library Imports
import math
from collections.abc import Sequence

# Third Party Imports
import numpy as np

# Local Imports
from bbpsim.chain.model import Transaction
from bbpsim.mempool.pool import InsertResult
from bbpsim.protocols.events import GossipStart, MessageArrival, Outcome, TxBatch, TxCreated
from bbpsim.protocols.messages import GetTx, NewTx, TxHashAnnounce


def fanout(count: int) -> int:
    """ceil(sqrt(count)) for count > 0"""
    return math.isqrt(count - 1) + 1 if count > 0 else 0


def split_fanout(neighbors: Sequence[int], exclude: set, degree: int,
                 rng: np.random.Generator) -> tuple[list[int], list[int]]:
    """
    Pick ceil(sqrt(degree)) of the eligible neighbours for the full payload
    :param neighbors: All neighbours in a fixed order
    :param exclude: Neighbours that already know the item
    :param degree: Node degree
    :param rng: Node stream
    :return: (full recipients, announce recipients), both in neighbour order
    """
    eligible = [n for n in neighbors if n not in exclude]
    k = min(fanout(degree), len(eligible))
    if k == 0:
        return [], eligible
    picked = set(rng.choice(len(eligible), size=k, replace=False).tolist())
    full = [n for i, n in enumerate(eligible) if i in picked]
    rest = [n for i, n in enumerate(eligible) if i not in picked]
    return full, rest


def relay_tx(node, out: Outcome, tx: Transaction, src: int | None = None) -> None:
    exclude = {src} if src is not None else set()
    full, rest = split_fanout(node.neighbors, exclude, len(node.neighbors), node.rng)
    for dst in full:
        out.send(dst, NewTx(tx))
    for dst in rest:
        out.send(dst, TxHashAnnounce(tx.hash))


def receive_tx(node, out: Outcome, tx: Transaction, now: float, is_local: bool = False) -> bool:
    """
    Record and pool a transaction seen for the first time
    :return: False if it was already seen
    """
    if tx.hash in node.seen_txs:
        return False
    node.seen_txs.add(tx.hash)
    result = node.pool.insert(tx, int(now), is_local)
    if result is InsertResult.STALE:
        out.stale("tx", node.chain.height)
    return True


def tx_gossip_on_event(node, event, now: float, out: Outcome) -> list[Transaction]:
    """
    Handle one transaction-relay event
    :param node: NodeState
    :param event: TxCreated, GossipStart, TxBatch or a MessageArrival of NewTx / TxHashAnnounce / GetTx
    :param now: Handler start time (ms)
    :param out: Outcome to append to
    :return: Transactions newly seen by this node
    """
    if isinstance(event, TxCreated):
        if not receive_tx(node, out, event.tx, now, event.is_local):
            return []
        if event.gossip:
            relay_tx(node, out, event.tx)
        return [event.tx]
    if isinstance(event, GossipStart):
        relay_tx(node, out, event.tx)
        return []
    if isinstance(event, TxBatch):
        return [tx for tx in event.txs if receive_tx(node, out, tx, now)]

    message, src = event.message, event.src
    if isinstance(message, NewTx):
        if not receive_tx(node, out, message.tx, now):
            return []
        relay_tx(node, out, message.tx, src)
        return [message.tx]
    if isinstance(message, TxHashAnnounce):
        if message.tx_hash not in node.seen_txs and message.tx_hash not in node.tx_requested:
            node.tx_requested.add(message.tx_hash)
            out.send(src, GetTx(message.tx_hash))
        return []
    if isinstance(message, GetTx):
        # nothing is served once a block reset removed the transaction
        entry = node.pool.get(message.tx_hash)
        if entry is not None:
            out.send(src, NewTx(entry.tx))
    return []


TX_EVENTS = (TxCreated, GossipStart, TxBatch)
TX_MESSAGES = (NewTx, TxHashAnnounce, GetTx)


def is_tx_event(event) -> bool:
    return isinstance(event, TX_EVENTS) or (isinstance(event, MessageArrival)
                                            and isinstance(event.message, TX_MESSAGES))
