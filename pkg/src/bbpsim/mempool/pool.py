#! /usr/bin/env python3
"""
Per-node transaction pool with one nonce queue per account
Date: Mar 7, 2025
"""
# Standard Library Imports
import csv
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

# Local Imports
from bbpsim.chain.model import Block, Transaction, WorldState
from bbpsim.chain.primitives import AccountId, Hash256


@dataclass(slots=True)
class PoolEntry:
    tx: Transaction
    local_ts: int
    is_local: bool = False


class InsertResult(str, Enum):
    INSERTED = "inserted"
    STALE = "stale"
    DUPLICATE = "duplicate"

    @property
    def inserted(self) -> bool:
        return self is InsertResult.INSERTED


class TxPool:
    """
    Transaction queues keyed by sender, each mapping nonce -> PoolEntry, plus a hash index.
    Future nonces are kept; selection only ever reads the contiguous run after the
    committed nonce.
    """
    __slots__ = ("_queues", "_by_hash", "_committed")

    def __init__(self):
        """
        Constructor for TxPool class
        """
        self._queues: dict[AccountId, dict[int, PoolEntry]] = {}
        self._by_hash: dict[Hash256, PoolEntry] = {}
        self._committed: dict[AccountId, int] = {}

    def __len__(self) -> int:
        return len(self._by_hash)

    def __contains__(self, tx_hash: Hash256) -> bool:
        return tx_hash in self._by_hash

    def get(self, tx_hash: Hash256) -> PoolEntry | None:
        return self._by_hash.get(tx_hash)

    def entries(self) -> Iterator[PoolEntry]:
        return iter(self._by_hash.values())

    def committed_nonce(self, account: AccountId) -> int:
        return self._committed.get(account, 0)

    def queue(self, account: AccountId) -> dict[int, PoolEntry]:
        return self._queues.get(account, {})

    def accounts(self) -> Iterable[AccountId]:
        return self._queues.keys()

    def insert(self, tx: Transaction, local_ts: int, is_local: bool = False) -> InsertResult:
        """
        Insert a transaction in nonce position
        :param tx: Transaction
        :param local_ts: This node's receive time (ms)
        :param is_local: Submitted through this node
        :return: InsertResult
        """
        if tx.nonce <= self.committed_nonce(tx.sender):
            return InsertResult.STALE
        queue = self._queues.setdefault(tx.sender, {})
        if tx.hash in self._by_hash or tx.nonce in queue:
            return InsertResult.DUPLICATE
        entry = PoolEntry(tx=tx, local_ts=local_ts, is_local=is_local)
        queue[tx.nonce] = entry
        self._by_hash[tx.hash] = entry
        return InsertResult.INSERTED

    def remove(self, tx_hash: Hash256) -> PoolEntry | None:
        entry = self._by_hash.pop(tx_hash, None)
        if entry is None:
            return None
        queue = self._queues[entry.tx.sender]
        del queue[entry.tx.nonce]
        if not queue:
            del self._queues[entry.tx.sender]
        return entry

    def _sweep(self, account: AccountId) -> list[PoolEntry]:
        queue = self._queues.get(account)
        if not queue:
            return []
        floor = self.committed_nonce(account)
        return [self.remove(queue[nonce].tx.hash) for nonce in sorted(queue) if nonce <= floor]

    def reset(self, block: Block) -> list[PoolEntry]:
        """
        Pool reset after a block is committed: drop the block's transactions and every
        entry that became stale
        :param block: Accepted block
        :return: Removed entries, in removal order
        """
        removed = []
        for tx in block.body:
            entry = self.remove(tx.hash)
            if entry is not None:
                removed.append(entry)
            if tx.nonce > self.committed_nonce(tx.sender):
                self._committed[tx.sender] = tx.nonce
        for account in {tx.sender for tx in block.body}:
            removed.extend(self._sweep(account))
        return removed

    def reinject(self, entries: Iterable[PoolEntry], state: WorldState, accounts: Iterable[AccountId] = ()) -> int:
        """
        Return transactions of an abandoned block to the pool. Committed nonces of their
        senders, and of any extra ``accounts``, are rewound to ``state`` first.
        :param entries: Entries to put back
        :param state: State of the new fork point
        :param accounts: Other senders of the abandoned block
        :return: Number of entries inserted
        """
        entries = list(entries)
        for account in {entry.tx.sender for entry in entries}.union(accounts):
            self._committed[account] = state.nonce(account)
        return sum(self.insert(e.tx, e.local_ts, e.is_local).inserted for e in entries)


def insert_tx(pool: TxPool, tx: Transaction, local_ts: int, is_local: bool = False) -> InsertResult:
    """
    Insert a received transaction
    :param pool: Node pool
    :param tx: Transaction
    :param local_ts: Receive time at this node (ms)
    :param is_local: Submitted through this node
    :return: InsertResult (inserted, stale or duplicate)
    """
    return pool.insert(tx, local_ts, is_local)


def reset_pool(pool: TxPool, committed_block: Block) -> TxPool:
    """
    Transaction pool reset on block commit
    :param pool: Node pool, modified in place
    :param committed_block: Block accepted by validation
    :return: The same pool
    """
    pool.reset(committed_block)
    return pool


POOL_CSV_COLUMNS = ("tx_hash", "account", "nonce", "gas_price", "created_ts", "local_ts")


def dump_pool_csv(pool: TxPool, path: str | Path) -> Path:
    """
    Write a pool snapshot for debugging, sorted by account then nonce
    :param pool: Pool to dump
    :param path: Output file
    :return: The path written
    """
    path = Path(path)
    rows = sorted(pool.entries(), key=lambda e: (e.tx.sender, e.tx.nonce))
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(POOL_CSV_COLUMNS)
        for entry in rows:
            tx = entry.tx
            writer.writerow((tx.hash.hex(), tx.sender, tx.nonce, tx.gas_price, tx.created_ts, entry.local_ts))
    return path
