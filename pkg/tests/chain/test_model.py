#!/usr/bin/env python3
"""
Test value types: transactions, world state, genesis
Date: Mar 5, 2025
"""
# Third Party Imports
import pytest

# Local Imports
from bbpsim.chain import COINBASE_PLACEHOLDER, ESCROW, ZERO_HASH, Transaction, WorldState, genesis_block, state_root


def test_accessed_accounts():
    """
    Accessed set is {sender, recipient}; the placeholder marks coinbase access
    """
    tx = Transaction(sender=1, recipient=COINBASE_PLACEHOLDER, nonce=1, gas_price=2, gas_used=10, amount=5)
    assert tx.accessed == {1, COINBASE_PLACEHOLDER}
    assert tx.pays_coinbase
    assert tx.fee == 20
    assert tx.cost == 25


@pytest.mark.parametrize("kwargs", [
    dict(sender=1, recipient=2, nonce=-1, gas_price=1),
    dict(sender=COINBASE_PLACEHOLDER, recipient=2, nonce=1, gas_price=1),
    dict(sender=1, recipient=ESCROW, nonce=1, gas_price=1),
    dict(sender=1, recipient=2, nonce=1, gas_price=1, amount=-3),
    dict(sender=1, recipient=2, nonce=1, gas_price=1, amount=1 << 128),
    dict(sender=1, recipient=2, nonce=1 << 64, gas_price=1),
    dict(sender=1, recipient=2, nonce=1, gas_price=1, origin_node=1 << 32),
])
def test_transaction_rejects_bad_fields(kwargs):
    """
    Negative or too-wide values, a placeholder sender and the escrow recipient are refused
    """
    with pytest.raises(ValueError):
        Transaction(**kwargs)


def test_world_state_drops_empty_accounts():
    """
    (0, 0) accounts are not stored and absent accounts read as (0, 0)
    """
    state = WorldState({1: (0, 0), 2: (3, 40)})
    assert len(state) == 1
    assert state.account(1) == (0, 0)
    assert state.nonce(2) == 3 and state.balance(2) == 40
    assert state == WorldState({2: (3, 40)})
    assert state.total_wei() == 40


def test_world_state_rejects_out_of_range():
    """
    Balances stay in [0, 2^128) and nonces in [0, 2^64)
    """
    for bad in ((0, -1), (0, 1 << 128), (1 << 64, 0)):
        with pytest.raises(ValueError):
            WorldState({1: bad})


def test_world_state_is_immutable_snapshot():
    """
    Mutating the working copy leaves the state untouched
    """
    state = WorldState({1: (0, 10)})
    working = state.mutable_copy()
    working[1] = (1, 0)
    assert state.account(1) == (0, 10)
    assert WorldState.freeze({1: (0, 0), 2: (0, 5)}) == WorldState({2: (0, 5)})


def test_genesis_block():
    """
    Block 0 commits to the allocation with an empty body
    """
    state = WorldState({1: (0, 100)})
    block = genesis_block(state)
    assert block.number == 0
    assert block.header.parent_hash == ZERO_HASH
    assert block.header.state_root == state_root(state)
    assert block.is_consistent()
    assert genesis_block(state).hash == block.hash
