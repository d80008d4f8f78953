#! /usr/bin/env python3
"""
Body selection from a pool: time-specific selection and ordering (TSO) for pre-packed
bodies, the legacy local-first gas-price order, and the PPB merge used by synchronization.
Date: Mar 7, 2025
"""
# Standard Library Imports
import heapq
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

# Local Imports
from bbpsim.chain.codec import body_hash
from bbpsim.chain.model import Transaction
from bbpsim.chain.primitives import AccountId, Hash256
from bbpsim.mempool.pool import TxPool


@dataclass(frozen=True)
class PrePackedBody:
    """
    A node's anticipated body for the next block, built from transactions created up to threshold_T
    """
    txs: tuple[Transaction, ...]
    body_hash: Hash256
    threshold_T: int

    @classmethod
    def build(cls, txs: Iterable[Transaction], threshold_T: int) -> "PrePackedBody":
        txs = tuple(txs)
        return cls(txs=txs, body_hash=body_hash(txs), threshold_T=threshold_T)

    @property
    def gas_used(self) -> int:
        return sum(tx.gas_used for tx in self.txs)

    def __len__(self) -> int:
        return len(self.txs)


def _tso_key(tx: Transaction) -> tuple[int, int]:
    # heapq pops the smallest key: highest gas price first, then the highest hash
    return -tx.gas_price, -tx.hash_int


def _tso_order(chains: Mapping[AccountId, Sequence[Transaction]], gas_limit: int) -> list[Transaction]:
    """
    Greedy selection over queue heads. Each chain holds one account's contiguous
    eligible transactions in nonce order; only its head competes.
    """
    heap = []
    for account, chain in chains.items():
        if chain:
            heap.append((_tso_key(chain[0]), account, 0))
    heapq.heapify(heap)

    selected, used = [], 0
    while heap:
        _, account, position = heap[0]
        tx = chains[account][position]
        if used + tx.gas_used > gas_limit:
            break
        heapq.heappop(heap)
        selected.append(tx)
        used += tx.gas_used
        position += 1
        if position < len(chains[account]):
            heapq.heappush(heap, (_tso_key(chains[account][position]), account, position))
    return selected


def _eligible_chain(pool: TxPool, account: AccountId, T: int, received_by: int | None) -> list[Transaction]:
    queue = pool.queue(account)
    nonce = pool.committed_nonce(account) + 1
    chain = []
    while nonce in queue and queue[nonce].tx.created_ts <= T:
        if received_by is not None and queue[nonce].local_ts > received_by:
            break
        chain.append(queue[nonce].tx)
        nonce += 1
    return chain


def tso_select(pool: TxPool, T: int, gas_limit: int, received_by: int | None = None) -> PrePackedBody:
    """
    Time-specific selection and ordering.

    Only transactions created at or before T are eligible. Candidates are the
    per-account queue heads; the best by (gas price, hash) is appended and the
    account's next nonce takes its place. Selection stops when the best candidate
    does not fit the gas limit.
    :param pool: Node pool
    :param T: Threshold, the timestamp of the current head (ms)
    :param gas_limit: Block gas limit
    :param received_by: Optional deadline on the local receive time, usually T + delta
    :return: PrePackedBody
    """
    chains = {account: _eligible_chain(pool, account, T, received_by) for account in pool.accounts()}
    return PrePackedBody.build(_tso_order(chains, gas_limit), T)


def legacy_select(pool: TxPool, miner: AccountId, gas_limit: int) -> list[Transaction]:
    """
    Geth-style body for baseline miners: local transactions first, then gas price,
    then the earliest receive time, keeping each account in nonce order. An account
    whose next transaction does not fit is skipped and selection goes on.
    :param pool: Node pool
    :param miner: Miner account, its own transactions count as local
    :param gas_limit: Block gas limit
    :return: Ordered transactions
    """
    def key(entry):
        local = entry.is_local or entry.tx.sender == miner
        return not local, -entry.tx.gas_price, entry.local_ts, -entry.tx.hash_int

    heap = []
    for account in pool.accounts():
        nonce = pool.committed_nonce(account) + 1
        entry = pool.queue(account).get(nonce)
        if entry is not None:
            heap.append((key(entry), account, nonce))
    heapq.heapify(heap)

    selected, used = [], 0
    while heap:
        _, account, nonce = heapq.heappop(heap)
        tx = pool.queue(account)[nonce].tx
        if used + tx.gas_used > gas_limit:
            continue
        selected.append(tx)
        used += tx.gas_used
        successor = pool.queue(account).get(nonce + 1)
        if successor is not None:
            heapq.heappush(heap, (key(successor), account, nonce + 1))
    return selected


def merge_ppb(local: PrePackedBody, remote_txs: Iterable[Transaction], pool: TxPool, T: int, delta: int,
              gas_limit: int) -> PrePackedBody:
    """
    Merge a neighbour's PPB into the local one.

    A remote transaction is accepted only if this node already holds it and received
    it no later than T + delta. The union is cut at nonce gaps and re-ordered by TSO.
    :param local: Current local PPB
    :param remote_txs: Transactions of the neighbour's PPB
    :param pool: Node pool
    :param T: Threshold of the PPB
    :param delta: Tolerance on local receive times (ms)
    :param gas_limit: Block gas limit
    :return: The merged PrePackedBody
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    candidates: dict[AccountId, dict[int, Transaction]] = {}
    for tx in local.txs:
        candidates.setdefault(tx.sender, {})[tx.nonce] = tx
    deadline = T + delta
    for tx in remote_txs:
        entry = pool.get(tx.hash)
        if entry is None or entry.local_ts > deadline or tx.created_ts > T:
            continue
        candidates.setdefault(tx.sender, {}).setdefault(tx.nonce, tx)

    chains = {}
    for account, by_nonce in candidates.items():
        nonce = pool.committed_nonce(account) + 1
        chain = []
        while nonce in by_nonce:
            chain.append(by_nonce[nonce])
            nonce += 1
        chains[account] = chain
    return PrePackedBody.build(_tso_order(chains, gas_limit), T)
