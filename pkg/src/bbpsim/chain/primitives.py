#! /usr/bin/env python3
"""
Primitive identifiers: 32-byte hashes and account ids
Date: Mar 3, 2025
"""
AccountId = int

# 32 bytes of 0xFF once encoded
COINBASE_PLACEHOLDER: AccountId = (1 << 256) - 1
# Virtual account holding fees of pre-executed transactions until the miner is known
ESCROW: AccountId = (1 << 256) - 2
MAX_ACCOUNT: AccountId = ESCROW


class Hash256(bytes):
    """
    32 opaque bytes. Ordering is the native bytewise ordering of ``bytes``.
    """
    __slots__ = ()

    def __new__(cls, value: bytes = bytes(32)):
        if len(value) != 32:
            raise ValueError(f"Hash256 needs 32 bytes, got {len(value)}")
        return super().__new__(cls, value)

    @classmethod
    def from_hex(cls, text: str) -> "Hash256":
        return cls(bytes.fromhex(text))

    def short(self) -> str:
        return self.hex()[:10]

    def __repr__(self) -> str:
        return f"Hash256({self.hex()})"


ZERO_HASH = Hash256()
