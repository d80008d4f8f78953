#! /usr/bin/env python3
"""
Canonical value types shared by every other package: hashes, transactions, headers,
blocks and the flat world state.
Date: Mar 3, 2025
"""
# Standard Library Imports
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property

# Local Imports
from bbpsim.chain import codec
from bbpsim.chain.primitives import COINBASE_PLACEHOLDER, MAX_ACCOUNT, AccountId, Hash256

# bit widths of the canonical encoding
TX_FIELD_BITS = {"nonce": 64, "gas_price": 64, "gas_used": 64, "amount": 128, "created_ts": 64, "origin_node": 32}
NONCE_BITS, BALANCE_BITS = 64, 128


@dataclass(frozen=True)
class Transaction:
    """
    Signed transfer. Identity (hash) covers the economic fields only, so nodes that
    received the same transaction at different times agree on it.
    """
    sender: AccountId
    recipient: AccountId
    nonce: int
    gas_price: int
    gas_used: int = 21_000
    amount: int = 0
    created_ts: int = 0
    origin_node: int = 0
    is_local_only: bool = False

    def __post_init__(self):
        for name, bits in TX_FIELD_BITS.items():
            if not 0 <= getattr(self, name) < 1 << bits:
                raise ValueError(f"{name} must fit in {bits} unsigned bits")
        if not 0 <= self.sender < MAX_ACCOUNT:
            raise ValueError("sender must be a concrete account")
        if not (0 <= self.recipient < MAX_ACCOUNT or self.recipient == COINBASE_PLACEHOLDER):
            raise ValueError("recipient out of range")

    @cached_property
    def hash(self) -> Hash256:
        return codec.tx_hash(self)

    @cached_property
    def hash_int(self) -> int:
        return int.from_bytes(self.hash, "big")

    @property
    def accessed(self) -> frozenset[AccountId]:
        """Accounts touched by the transfer. The placeholder stands for the coinbase."""
        return frozenset((self.sender, self.recipient))

    @property
    def pays_coinbase(self) -> bool:
        return self.recipient == COINBASE_PLACEHOLDER

    @property
    def fee(self) -> int:
        return self.gas_price * self.gas_used

    @property
    def cost(self) -> int:
        return self.amount + self.fee


@dataclass(frozen=True)
class BlockHeader:
    parent_hash: Hash256
    number: int
    timestamp: int
    coinbase: AccountId
    txs_hash: Hash256
    state_root: Hash256

    @cached_property
    def hash(self) -> Hash256:
        return codec.header_hash(self)


@dataclass(frozen=True)
class Block:
    """
    Full block: header plus the ordered body
    """
    header: BlockHeader
    body: tuple[Transaction, ...] = field(default_factory=tuple)

    @property
    def hash(self) -> Hash256:
        return self.header.hash

    @property
    def number(self) -> int:
        return self.header.number

    def is_consistent(self) -> bool:
        """header.txs_hash commits to the body"""
        return self.header.txs_hash == codec.body_hash(self.body)


class WorldState(Mapping):
    """
    Immutable map AccountId -> (nonce, balance). Accounts at (0, 0) are never
    stored, so "absent" and "empty" are the same state.
    """
    __slots__ = ("_accounts",)

    def __init__(self, accounts: Mapping[AccountId, tuple[int, int]] | None = None):
        clean = {}
        for account, (nonce, balance) in (accounts or {}).items():
            if not (0 <= nonce < 1 << NONCE_BITS and 0 <= balance < 1 << BALANCE_BITS):
                raise ValueError(f"nonce/balance of account {account} out of range")
            if nonce or balance:
                clean[account] = (nonce, balance)
        self._accounts = clean

    @classmethod
    def _trusted(cls, accounts: dict) -> "WorldState":
        """Wrap a dict already known to be clean (no copy, no checks)"""
        state = cls.__new__(cls)
        state._accounts = accounts
        return state

    def __getitem__(self, account: AccountId) -> tuple[int, int]:
        return self._accounts[account]

    def __iter__(self) -> Iterator[AccountId]:
        return iter(self._accounts)

    def __len__(self) -> int:
        return len(self._accounts)

    def __eq__(self, other) -> bool:
        if isinstance(other, WorldState):
            return self._accounts == other._accounts
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._accounts.items()))

    def __repr__(self) -> str:
        return f"WorldState({len(self._accounts)} accounts)"

    def account(self, account: AccountId) -> tuple[int, int]:
        return self._accounts.get(account, (0, 0))

    def nonce(self, account: AccountId) -> int:
        return self._accounts.get(account, (0, 0))[0]

    def balance(self, account: AccountId) -> int:
        return self._accounts.get(account, (0, 0))[1]

    def total_wei(self) -> int:
        return sum(balance for _, balance in self._accounts.values())

    def mutable_copy(self) -> dict:
        return dict(self._accounts)

    @classmethod
    def freeze(cls, accounts: dict) -> "WorldState":
        """Build from a working dict, dropping accounts that ended at (0, 0)"""
        return cls._trusted({k: v for k, v in accounts.items() if v[0] or v[1]})
