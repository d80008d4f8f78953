#! /usr/bin/env python3
"""
Block validation: pre-validation of a pre-packed body, the fast finalize path run
when only the header arrives, full sequential validation, and miner-side sealing.
Date: Mar 5, 2025
"""
# Standard Library Imports
from collections import OrderedDict
from collections.abc import Sequence
from dataclasses import dataclass, field

# Local Imports
from bbpsim.chain.codec import body_hash, state_root
from bbpsim.chain.model import Block, BlockHeader, Transaction, WorldState
from bbpsim.chain.primitives import COINBASE_PLACEHOLDER, ESCROW, AccountId, Hash256
from bbpsim.execution.ledger import execute_sequence, unexecutable_flags


@dataclass(frozen=True)
class ValidationInfo:
    """
    Output of pre-validation. Every transaction of pruned_ppb is either in
    unexecutable or already applied to intermediate_state.
    """
    body_hash: Hash256
    unexecutable: tuple[Transaction, ...]
    intermediate_state: WorldState
    pruned_ppb: tuple[Transaction, ...]
    base_hash: Hash256 | None = None
    touched: frozenset[AccountId] = field(default_factory=frozenset)

    @property
    def n_u(self) -> int:
        return len(self.unexecutable)


@dataclass(frozen=True)
class Accept:
    state: WorldState
    accepted = True


@dataclass(frozen=True)
class Mismatch:
    """
    kind is one of body, base, execution, state. body and base mean the caller
    should fall back to the full block.
    """
    kind: str
    accepted = False

    @property
    def needs_full_block(self) -> bool:
        return self.kind in ("body", "base")


@dataclass(frozen=True)
class Reject:
    """kind is one of header, execution, state_root"""
    kind: str
    accepted = False


ValidationOutcome = Accept | Mismatch | Reject


def pre_validate(base_state: WorldState, ppb: Sequence[Transaction],
                 base_hash: Hash256 | None = None) -> ValidationInfo:
    """
    Pre-execute every transaction that does not depend on the coinbase.
    Fees go to the escrow account until the miner is known; failing
    transactions are dropped from the body.
    :param base_state: Committed state after the current head
    :param ppb: Ordered pre-packed body
    :param base_hash: Hash of the head block base_state belongs to
    :return: ValidationInfo
    """
    ppb = tuple(ppb)
    in_ug = unexecutable_flags(ppb)
    positions = [i for i, flag in enumerate(in_ug) if not flag]
    result = execute_sequence(base_state, (ppb[i] for i in positions), ESCROW, prune=True)
    if result.failed:
        dropped = {positions[i] for i in result.failed_at}
        pruned = tuple(tx for i, tx in enumerate(ppb) if i not in dropped)
    else:
        pruned = ppb
    u_g = tuple(tx for tx, flag in zip(ppb, in_ug) if flag)

    touched = set()
    for tx in pruned:
        touched.add(tx.sender)
        touched.add(tx.recipient)
    touched.discard(COINBASE_PLACEHOLDER)

    return ValidationInfo(
        body_hash=body_hash(pruned),
        unexecutable=u_g,
        intermediate_state=result.state,
        pruned_ppb=pruned,
        base_hash=base_hash,
        touched=frozenset(touched),
    )


def finalize_validate(info: ValidationInfo, header: BlockHeader, base_state: WorldState) -> Accept | Mismatch:
    """
    Validate a header against a pre-validated body
    :param info: Pre-validation result computed on base_state
    :param header: Received header
    :param base_state: State of the header's parent
    :return: Accept with the committed state, or Mismatch(kind)
    """
    if info.body_hash != header.txs_hash:
        return Mismatch("body")
    if info.base_hash is not None and info.base_hash != header.parent_hash:
        return Mismatch("base")

    if header.coinbase in info.touched:
        # fees reach an account the body itself reads, so the split order is not safe
        result = execute_sequence(base_state, info.pruned_ppb, header.coinbase)
        if not result.ok:
            return Mismatch("execution")
        final = result.state
    else:
        accounts = info.intermediate_state.mutable_copy()
        escrow = accounts.pop(ESCROW, (0, 0))[1]
        if escrow:
            nonce, balance = accounts.get(header.coinbase, (0, 0))
            accounts[header.coinbase] = (nonce, balance + escrow)
        result = execute_sequence(WorldState.freeze(accounts), info.unexecutable, header.coinbase)
        if not result.ok:
            return Mismatch("execution")
        final = result.state

    if state_root(final) != header.state_root:
        return Mismatch("state")
    return Accept(final)


def check_header(header: BlockHeader, parent: BlockHeader) -> bool:
    """Parent linkage and timestamp monotonicity"""
    return (header.parent_hash == parent.hash
            and header.number == parent.number + 1
            and header.timestamp > parent.timestamp)


def full_validate(base_state: WorldState, block: Block, parent: BlockHeader | None = None) -> Accept | Reject:
    """
    Legacy validation: check the header, execute the whole body in order, compare roots
    :param base_state: State of the parent block
    :param block: Received block
    :param parent: Parent header, checked for linkage when given
    :return: Accept with the new state, or Reject(kind)
    """
    if parent is not None and not check_header(block.header, parent):
        return Reject("header")
    if not block.is_consistent():
        return Reject("header")
    result = execute_sequence(base_state, block.body, block.header.coinbase)
    if not result.ok:
        return Reject("execution")
    if state_root(result.state) != block.header.state_root:
        return Reject("state_root")
    return Accept(result.state)


def seal_block(parent: BlockHeader, parent_state: WorldState, body: Sequence[Transaction],
               coinbase: AccountId, timestamp: int) -> tuple[Block, WorldState]:
    """
    Miner-side block generation. Transactions failing against the parent state are left out.
    :param parent: Header the block extends
    :param parent_state: State after parent
    :param body: Ordered candidate transactions
    :param coinbase: Miner account
    :param timestamp: Block timestamp, raised to parent.timestamp + 1 if needed
    :return: (sealed block, its post state)
    """
    result = execute_sequence(parent_state, body, coinbase, prune=True)
    header = BlockHeader(
        parent_hash=parent.hash,
        number=parent.number + 1,
        timestamp=max(timestamp, parent.timestamp + 1),
        coinbase=coinbase,
        txs_hash=body_hash(result.executed),
        state_root=state_root(result.state),
    )
    return Block(header=header, body=result.executed), result.state


class ValidationCache:
    """
    Memoizes validation results shared by all nodes of one run. Validation is a
    pure function of its inputs, so a hit returns exactly what a miss would compute.
    """
    __slots__ = ("_entries", "_max_entries", "hits", "misses")

    def __init__(self, max_entries: int = 4096):
        """
        Constructor for ValidationCache class
        :param max_entries: Entries kept before the least recently used is evicted
        """
        self._entries: OrderedDict = OrderedDict()
        self._max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def _lookup(self, key, compute):
        try:
            value = self._entries[key]
        except KeyError:
            self.misses += 1
            value = compute()
            self._entries[key] = value
            if len(self._entries) > self._max_entries:
                self._entries.popitem(last=False)
            return value
        self.hits += 1
        self._entries.move_to_end(key)
        return value

    def pre_validate(self, base_hash: Hash256, base_state: WorldState,
                     ppb: Sequence[Transaction]) -> ValidationInfo:
        key = ("pre", base_hash, body_hash(ppb))
        return self._lookup(key, lambda: pre_validate(base_state, ppb, base_hash))

    def finalize_validate(self, info: ValidationInfo, header: BlockHeader,
                          base_state: WorldState) -> Accept | Mismatch:
        key = ("fin", info.base_hash, info.body_hash, header.hash)
        return self._lookup(key, lambda: finalize_validate(info, header, base_state))

    def full_validate(self, base_state: WorldState, block: Block,
                      parent: BlockHeader | None = None) -> Accept | Reject:
        key = ("full", block.header.parent_hash, block.hash, parent is not None)
        return self._lookup(key, lambda: full_validate(base_state, block, parent))

    def __len__(self) -> int:
        return len(self._entries)
