#! /usr/bin/env python3
"""
Wire messages exchanged between nodes and their simulated sizes
Date: Mar 10, 2025
"""
# Standard Library Imports
from dataclasses import dataclass
from typing import ClassVar, Protocol

# Local Imports
from bbpsim.chain.model import Block, BlockHeader, Transaction
from bbpsim.chain.primitives import Hash256


class SizeTable(Protocol):
    s_hash: int
    s_h: int
    s_t: int


@dataclass(frozen=True)
class WireMessage:
    """
    Base message. ``category`` is one of tx, sync, block and decides how traffic
    is accounted.
    """
    category: ClassVar[str] = "block"

    @property
    def type_name(self) -> str:
        return type(self).__name__

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_hash


# Transaction relay
@dataclass(frozen=True)
class NewTx(WireMessage):
    tx: Transaction
    category: ClassVar[str] = "tx"

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_t


@dataclass(frozen=True)
class TxHashAnnounce(WireMessage):
    tx_hash: Hash256
    category: ClassVar[str] = "tx"


@dataclass(frozen=True)
class GetTx(WireMessage):
    tx_hash: Hash256
    category: ClassVar[str] = "tx"


# PPB synchronization; base is the head the PPB was built on (not sized)
@dataclass(frozen=True)
class CheckSync(WireMessage):
    body_hash: Hash256
    base: Hash256
    category: ClassVar[str] = "sync"


@dataclass(frozen=True)
class PpbPayload(WireMessage):
    txs: tuple[Transaction, ...]
    base: Hash256
    is_reply: bool = False
    category: ClassVar[str] = "sync"

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_hash + len(self.txs) * sizes.s_t


# Block propagation; hop is simulation metadata and is not sized
@dataclass(frozen=True)
class BlockHeaderMsg(WireMessage):
    header: BlockHeader
    hop: int = 1

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_h


@dataclass(frozen=True)
class FullBlock(WireMessage):
    block: Block
    hop: int = 1

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_h + len(self.block.body) * sizes.s_t


@dataclass(frozen=True)
class Inv(WireMessage):
    block_hash: Hash256


@dataclass(frozen=True)
class GetData(WireMessage):
    block_hash: Hash256
    want_full: bool = False


@dataclass(frozen=True)
class BlockHashAnnounce(WireMessage):
    block_hash: Hash256
    number: int = 0


@dataclass(frozen=True)
class GetHeader(WireMessage):
    block_hash: Hash256


@dataclass(frozen=True)
class GetBody(WireMessage):
    block_hash: Hash256


@dataclass(frozen=True)
class BlockBodyMsg(WireMessage):
    block_hash: Hash256
    txs: tuple[Transaction, ...]

    def size(self, sizes: SizeTable) -> int:
        return len(self.txs) * sizes.s_t


@dataclass(frozen=True)
class CompactBlock(WireMessage):
    header: BlockHeader
    tx_hashes: tuple[Hash256, ...]
    hop: int = 1

    def size(self, sizes: SizeTable) -> int:
        return sizes.s_h + len(self.tx_hashes) * sizes.s_hash


@dataclass(frozen=True)
class GetMissedTxs(WireMessage):
    block_hash: Hash256
    tx_hashes: tuple[Hash256, ...]

    def size(self, sizes: SizeTable) -> int:
        return max(1, len(self.tx_hashes)) * sizes.s_hash


@dataclass(frozen=True)
class MissedTxs(WireMessage):
    block_hash: Hash256
    txs: tuple[Transaction, ...]

    def size(self, sizes: SizeTable) -> int:
        return len(self.txs) * sizes.s_t


MESSAGE_TYPES = (NewTx, TxHashAnnounce, GetTx, CheckSync, PpbPayload, BlockHeaderMsg, FullBlock, Inv, GetData,
                 BlockHashAnnounce, GetHeader, GetBody, BlockBodyMsg, CompactBlock, GetMissedTxs, MissedTxs)
