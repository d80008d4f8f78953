#!/usr/bin/env python3
"""
Test single transaction execution, intersection and the un-executable sequence
Date: Mar 6, 2025
"""
# Third Party Imports
import pytest

# Local Imports
from bbpsim.chain import COINBASE_PLACEHOLDER, WorldState
from bbpsim.execution import FailureReason, apply_tx, build_unexecutable_seq, execute_sequence, intersects
from oracles import closure_oracle, oracle_cases, random_ppb, random_state, sequential_oracle

A, B, C, D, MINER = 1, 2, 3, 4, 99
CB = COINBASE_PLACEHOLDER


def test_transfer_moves_amount_and_bumps_nonce(make_tx):
    """
    Transfer 2 ether from A to B with zero fee
    """
    state = WorldState({A: (0, 10)})
    result = apply_tx(state, make_tx(A, B, 1, amount=2), MINER)
    assert result.ok
    assert result.state.account(A) == (1, 8)
    assert result.state.account(B) == (0, 2)


def test_bad_nonce_leaves_state_unchanged(make_tx):
    """
    Nonce gap fails with bad_nonce
    """
    state = WorldState({A: (1, 100)})
    result = apply_tx(state, make_tx(A, B, 5), MINER)
    assert result.reason is FailureReason.BAD_NONCE
    assert result.state is state


def test_insufficient_balance_counts_fee(make_tx):
    """
    90 + 2 * 10 > 100
    """
    state = WorldState({A: (0, 100)})
    result = apply_tx(state, make_tx(A, B, 1, gas_price=2, gas_used=10, amount=90), MINER)
    assert result.reason is FailureReason.INSUFFICIENT_BALANCE
    assert result.state == state


def test_fee_and_placeholder_resolve_to_coinbase(make_tx):
    """
    Fees and placeholder payments both land on the concrete coinbase
    """
    state = WorldState({A: (0, 1_000)})
    result = apply_tx(state, make_tx(A, CB, 1, gas_price=3, gas_used=10, amount=7), MINER)
    assert result.state.account(MINER) == (0, 37)
    assert result.state.account(A) == (1, 1_000 - 37)
    assert result.state.total_wei() == state.total_wei()


def test_self_transfer_only_pays_fee(make_tx):
    """
    Sender equal to recipient keeps the amount
    """
    result = apply_tx(WorldState({A: (0, 50)}), make_tx(A, A, 1, gas_price=1, gas_used=5, amount=20), MINER)
    assert result.state.account(A) == (1, 45)


def test_placeholder_coinbase_is_refused(make_tx):
    """
    Execution needs a concrete coinbase
    """
    with pytest.raises(ValueError):
        apply_tx(WorldState({A: (0, 1)}), make_tx(A, B, 1), CB)


def test_execute_sequence_strict_and_pruning(make_tx):
    """
    Strict mode stops at the first failure, prune mode skips it
    """
    state = WorldState({A: (0, 10)})
    txs = [make_tx(A, B, 1, amount=4), make_tx(A, B, 3), make_tx(A, B, 2, amount=4)]
    strict = execute_sequence(state, txs, MINER)
    assert not strict.ok and strict.failed_at == (1,)
    pruned = execute_sequence(state, txs, MINER, prune=True)
    assert pruned.executed == (txs[0], txs[2])
    assert pruned.state.account(A) == (2, 2)


@pytest.mark.parametrize("pair, expected", [
    (((A, B), (B, C)), True),
    (((A, B), (C, D)), False),
    (((A, CB), (C, CB)), True),
    (((A, B), (A, B)), True),
])
def test_intersects(make_tx, pair, expected):
    """
    Shared accessed account, with the placeholder shared by coinbase payers
    """
    (s1, r1), (s2, r2) = pair
    assert intersects(make_tx(s1, r1, 1), make_tx(s2, r2, 1)) is expected
    assert intersects(make_tx(s2, r2, 1), make_tx(s1, r1, 1)) is expected


def test_unexecutable_seq_empty_seed(make_tx):
    """
    No coinbase payer means nothing is deferred
    """
    ppb = [make_tx(A, B, 1), make_tx(C, D, 1)]
    assert build_unexecutable_seq(ppb) == ([], ppb)


def test_unexecutable_seq_joins_through_shared_account(make_tx):
    """
    [A->B, B->CB, C->D]: the second seeds, the first joins via B
    """
    tx1, tx2, tx3 = make_tx(A, B, 1), make_tx(B, CB, 1), make_tx(C, D, 1)
    assert build_unexecutable_seq([tx1, tx2, tx3]) == ([tx1, tx2], [tx3])


def test_unexecutable_seq_two_seeds(make_tx):
    """
    [A->B, B->CB, C->D, D->CB]: everything is deferred
    """
    ppb = [make_tx(A, B, 1), make_tx(B, CB, 1), make_tx(C, D, 1), make_tx(D, CB, 1)]
    assert build_unexecutable_seq(ppb) == (ppb, [])


def test_unexecutable_seq_late_joiner(make_tx):
    """
    A member added late in the list still pulls in earlier transactions
    """
    ppb = [make_tx(C, D, 1), make_tx(A, B, 1), make_tx(B, C, 1), make_tx(A, CB, 1)]
    u_g, executable = build_unexecutable_seq(ppb)
    assert u_g == ppb and executable == []


def test_unexecutable_seq_matches_closure_oracle(rng):
    """
    Same membership as connected components of the intersection graph
    """
    for _ in range(oracle_cases(300, 3000)):
        ppb = random_ppb(rng, int(rng.integers(0, 30)), n_accounts=10, coinbase_share=0.08)
        u_g, executable = build_unexecutable_seq(ppb)
        expected = closure_oracle(ppb)
        assert u_g == [ppb[i] for i in sorted(expected)]
        assert executable == [tx for i, tx in enumerate(ppb) if i not in expected]


def test_execute_sequence_matches_plain_oracle(rng):
    """
    Strict execution agrees with a dict-based reimplementation
    """
    for _ in range(oracle_cases(300, 3000)):
        start = random_state(rng)
        ppb = random_ppb(rng, int(rng.integers(0, 20)))
        expected, ok = sequential_oracle(start, ppb, MINER)
        result = execute_sequence(WorldState(start), ppb, MINER)
        assert result.ok is ok
        if ok:
            assert dict(result.state) == expected


def _non_intersecting_swaps(rng, count):
    done = 0
    while done < count:
        start = WorldState(random_state(rng, n_accounts=8))
        txs = random_ppb(rng, int(rng.integers(2, 12)), n_accounts=8, coinbase_share=0.0)
        for i in range(len(txs) - 1):
            if not intersects(txs[i], txs[i + 1]):
                swapped = txs[:i] + [txs[i + 1], txs[i]] + txs[i + 2:]
                yield start, txs, swapped
                done += 1


def test_non_intersecting_swap_commutes(rng):
    """
    Swapping adjacent non-intersecting transactions never changes the final state
    """
    for start, txs, swapped in _non_intersecting_swaps(rng, oracle_cases(1000, 10_000)):
        left = execute_sequence(start, txs, MINER, prune=True)
        right = execute_sequence(start, swapped, MINER, prune=True)
        assert left.state == right.state
        assert set(left.executed) == set(right.executed)


def test_execution_conserves_wei(rng):
    """
    Fees move to the coinbase and failing transactions are pruned, so total wei never changes
    """
    for _ in range(oracle_cases(300, 3000)):
        start = WorldState(random_state(rng))
        ppb = random_ppb(rng, int(rng.integers(0, 20)), coinbase_share=0.1)
        result = execute_sequence(start, ppb, MINER, prune=True)
        assert result.state.total_wei() == start.total_wei()
