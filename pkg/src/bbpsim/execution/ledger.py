#! /usr/bin/env python3
"""
Transfer-ledger execution engine: single transaction application, sequential
execution, transaction intersection and the un-executable sequence.
Date: Mar 4, 2025
"""
# Standard Library Imports
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

# Local Imports
from bbpsim.chain.model import Transaction, WorldState
from bbpsim.chain.primitives import COINBASE_PLACEHOLDER, AccountId


class FailureReason(str, Enum):
    BAD_NONCE = "bad_nonce"
    INSUFFICIENT_BALANCE = "insufficient_balance"


@dataclass(frozen=True)
class ExecResult:
    """
    Either the new state (reason is None) or the unchanged state with a failure reason
    """
    state: WorldState
    reason: FailureReason | None = None

    @property
    def ok(self) -> bool:
        return self.reason is None


@dataclass(frozen=True)
class SequenceResult:
    state: WorldState
    executed: tuple[Transaction, ...]
    failed: tuple[tuple[Transaction, FailureReason], ...]
    # positions of the failed transactions in the input sequence
    failed_at: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failed


def _apply(accounts: dict, tx: Transaction, coinbase: AccountId) -> FailureReason | None:
    """
    Apply one transfer to a working dict in place
    :return: None on success, the failure reason otherwise (dict untouched)
    """
    nonce, balance = accounts.get(tx.sender, (0, 0))
    if tx.nonce != nonce + 1:
        return FailureReason.BAD_NONCE
    fee = tx.gas_price * tx.gas_used
    if balance < tx.amount + fee:
        return FailureReason.INSUFFICIENT_BALANCE

    accounts[tx.sender] = (nonce + 1, balance - tx.amount - fee)
    recipient = coinbase if tx.recipient == COINBASE_PLACEHOLDER else tx.recipient
    r_nonce, r_balance = accounts.get(recipient, (0, 0))
    accounts[recipient] = (r_nonce, r_balance + tx.amount)
    if fee:
        c_nonce, c_balance = accounts.get(coinbase, (0, 0))
        accounts[coinbase] = (c_nonce, c_balance + fee)
    return None


def apply_tx(state: WorldState, tx: Transaction, coinbase: AccountId) -> ExecResult:
    """
    Execute a single transfer
    :param state: State before the transaction
    :param tx: Transaction to execute
    :param coinbase: Concrete miner account, receives the fee and resolves the placeholder
    :return: ExecResult with the new state, or the unchanged state and the reason
    """
    if coinbase == COINBASE_PLACEHOLDER:
        raise ValueError("coinbase must be a concrete account")
    accounts = state.mutable_copy()
    reason = _apply(accounts, tx, coinbase)
    if reason is not None:
        return ExecResult(state=state, reason=reason)
    return ExecResult(state=WorldState.freeze(accounts))


def execute_sequence(state: WorldState, txs: Iterable[Transaction], coinbase: AccountId,
                     prune: bool = False) -> SequenceResult:
    """
    Execute transactions in order.
    :param state: Starting state
    :param txs: Ordered transactions
    :param coinbase: Fee receiver and placeholder resolution
    :param prune: Skip failing transactions and keep going; otherwise stop at the first failure
    :return: SequenceResult
    """
    accounts = state.mutable_copy()
    executed, failed, failed_at = [], [], []
    for position, tx in enumerate(txs):
        reason = _apply(accounts, tx, coinbase)
        if reason is None:
            executed.append(tx)
            continue
        failed.append((tx, reason))
        failed_at.append(position)
        if not prune:
            break
    return SequenceResult(state=WorldState.freeze(accounts), executed=tuple(executed), failed=tuple(failed),
                          failed_at=tuple(failed_at))


def intersects(a: Transaction, b: Transaction) -> bool:
    """
    Two transactions intersect when they share an accessed account. The coinbase
    placeholder is shared by every transaction paying the coinbase.
    """
    return a.sender in (b.sender, b.recipient) or a.recipient in (b.sender, b.recipient)


def unexecutable_flags(ppb: Sequence[Transaction]) -> list[bool]:
    """
    Membership of each PPB position in the un-executable sequence.

    Seeds are the transactions paying the coinbase placeholder. Any transaction
    intersecting a member is added, until no remaining transaction intersects.
    """
    in_ug = [tx.pays_coinbase for tx in ppb]
    tainted: set[AccountId] = {COINBASE_PLACEHOLDER}
    for tx, seed in zip(ppb, in_ug):
        if seed:
            tainted.add(tx.sender)

    changed = any(in_ug)
    while changed:
        changed = False
        for i, tx in enumerate(ppb):
            if in_ug[i]:
                continue
            if tx.sender in tainted or tx.recipient in tainted:
                in_ug[i] = True
                tainted.add(tx.sender)
                tainted.add(tx.recipient)
                changed = True
    return in_ug


def build_unexecutable_seq(ppb: Sequence[Transaction]) -> tuple[list[Transaction], list[Transaction]]:
    """
    Split a PPB into the un-executable sequence and the pre-executable rest, both in PPB order
    :param ppb: Ordered transactions
    :return: (u_g, executable)
    """
    in_ug = unexecutable_flags(ppb)
    u_g = [tx for tx, flag in zip(ppb, in_ug) if flag]
    executable = [tx for tx, flag in zip(ppb, in_ug) if not flag]
    return u_g, executable
