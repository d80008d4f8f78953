#! /usr/bin/env python3
"""
Canonical byte encoding and SHA-256 commitments.

Layout (all integers big-endian, fixed width):

    tx identity   sender 32 | recipient 32 | nonce u64 | gas_price u64 | gas_used u64 | amount u128   (104 bytes)
    tx full       identity 104 | created_ts u64 | origin_node u32 | is_local_only u8                     (117 bytes)
    header        parent_hash 32 | number u64 | timestamp u64 | coinbase 32 | txs_hash 32 | state_root 32 (144 bytes)
    block         header 144 | tx count u32 | tx full * count
    state entry   account 32 | nonce u64 | balance u128, entries sorted by account                      (56 bytes)

The placeholder recipient is encoded as 32 bytes of 0xFF. Only the identity part of a
transaction is hashed; its receive timestamp and origin do not change its hash.
Date: Mar 3, 2025
"""
# Standard Library Imports
import hashlib
import struct

# Local Imports
from bbpsim.chain.primitives import Hash256

TX_IDENTITY_SIZE = 104
TX_FULL_SIZE = 117
HEADER_SIZE = 144
STATE_ENTRY_SIZE = 56

_U32 = struct.Struct(">I")
_U64x3 = struct.Struct(">QQQ")
_TX_TAIL = struct.Struct(">QIB")
_U64x2 = struct.Struct(">QQ")


def _account(value: int) -> bytes:
    return value.to_bytes(32, "big")


def _u128(value: int) -> bytes:
    return value.to_bytes(16, "big")


def encode_tx_identity(tx) -> bytes:
    """
    Bytes covered by the transaction hash
    :param tx: Transaction
    :return: 104-byte identity encoding
    """
    return (_account(tx.sender) + _account(tx.recipient)
            + _U64x3.pack(tx.nonce, tx.gas_price, tx.gas_used) + _u128(tx.amount))


def encode_tx(tx) -> bytes:
    """
    Full transaction encoding, including the non-hashed simulation fields
    :param tx: Transaction
    :return: 117-byte encoding
    """
    return encode_tx_identity(tx) + _TX_TAIL.pack(tx.created_ts, tx.origin_node, int(tx.is_local_only))


def decode_tx(data: bytes):
    """
    Inverse of encode_tx
    :param data: 117 bytes
    :return: Transaction
    """
    from bbpsim.chain.model import Transaction

    if len(data) != TX_FULL_SIZE:
        raise ValueError(f"transaction encoding must be {TX_FULL_SIZE} bytes, got {len(data)}")
    nonce, gas_price, gas_used = _U64x3.unpack_from(data, 64)
    created_ts, origin_node, local = _TX_TAIL.unpack_from(data, TX_IDENTITY_SIZE)
    return Transaction(
        sender=int.from_bytes(data[0:32], "big"),
        recipient=int.from_bytes(data[32:64], "big"),
        nonce=nonce,
        gas_price=gas_price,
        gas_used=gas_used,
        amount=int.from_bytes(data[88:104], "big"),
        created_ts=created_ts,
        origin_node=origin_node,
        is_local_only=bool(local),
    )


def encode_header(header) -> bytes:
    return (header.parent_hash + _U64x2.pack(header.number, header.timestamp)
            + _account(header.coinbase) + header.txs_hash + header.state_root)


def decode_header(data: bytes):
    from bbpsim.chain.model import BlockHeader

    if len(data) != HEADER_SIZE:
        raise ValueError(f"header encoding must be {HEADER_SIZE} bytes, got {len(data)}")
    number, timestamp = _U64x2.unpack_from(data, 32)
    return BlockHeader(
        parent_hash=Hash256(data[0:32]),
        number=number,
        timestamp=timestamp,
        coinbase=int.from_bytes(data[48:80], "big"),
        txs_hash=Hash256(data[80:112]),
        state_root=Hash256(data[112:144]),
    )


def encode_block(block) -> bytes:
    return encode_header(block.header) + _U32.pack(len(block.body)) + b"".join(encode_tx(tx) for tx in block.body)


def decode_block(data: bytes):
    from bbpsim.chain.model import Block

    header = decode_header(data[:HEADER_SIZE])
    (count,) = _U32.unpack_from(data, HEADER_SIZE)
    offset = HEADER_SIZE + 4
    if len(data) != offset + count * TX_FULL_SIZE:
        raise ValueError("block encoding length does not match its tx count")
    body = tuple(decode_tx(data[offset + i * TX_FULL_SIZE: offset + (i + 1) * TX_FULL_SIZE]) for i in range(count))
    return Block(header=header, body=body)


def sha256(data: bytes) -> Hash256:
    return Hash256(hashlib.sha256(data).digest())


def tx_hash(tx) -> Hash256:
    """
    Transaction identity hash
    :param tx: Transaction
    :return: SHA-256 of the identity encoding
    """
    return sha256(encode_tx_identity(tx))


def body_hash(txs) -> Hash256:
    """
    Order-sensitive commitment to a list of transactions
    :param txs: Ordered iterable of Transaction
    :return: SHA-256 over the concatenated transaction hashes
    """
    digest = hashlib.sha256()
    for tx in txs:
        digest.update(tx.hash)
    return Hash256(digest.digest())


def encode_state(state) -> bytes:
    parts = []
    for account in sorted(state):
        nonce, balance = state[account]
        parts.append(_account(account) + nonce.to_bytes(8, "big") + _u128(balance))
    return b"".join(parts)


def state_root(state) -> Hash256:
    """
    Flat commitment to a world state, independent of insertion order
    :param state: Mapping AccountId -> (nonce, balance)
    :return: SHA-256 over the sorted state entries
    """
    return sha256(encode_state(state))


def header_hash(header) -> Hash256:
    return sha256(encode_header(header))
