#!/usr/bin/env python3
"""
Test TSO, legacy selection and the PPB merge rule
Date: Mar 8, 2025
"""
# Third Party Imports
import pytest

# Local Imports
from bbpsim.chain import Transaction, body_hash
from bbpsim.mempool import PrePackedBody, TxPool, legacy_select, merge_ppb, tso_select
from oracles import oracle_cases, tso_oracle

A, B, C, D, E, MINER = 1, 2, 3, 4, 5, 50
GAS = 21_000


def _pool(entries):
    pool = TxPool()
    for tx, local_ts, *local in entries:
        pool.insert(tx, local_ts, bool(local and local[0]))
    return pool


def _random_pool_txs(rng, count, n_accounts=4, horizon=100):
    txs, nonces = [], {}
    for _ in range(count):
        sender = int(rng.integers(1, n_accounts + 1))
        nonces[sender] = nonces.get(sender, 0) + 1
        txs.append(_tx(sender, nonces[sender], int(rng.integers(1, 6)), int(rng.integers(0, horizon))))
    return txs


def _tx(sender, nonce, gas_price, created_ts=0, recipient=99):
    return Transaction(sender=sender, recipient=recipient, nonce=nonce, gas_price=gas_price, created_ts=created_ts)


def test_tso_empty_pool():
    """
    Nothing eligible gives an empty body
    """
    ppb = tso_select(TxPool(), 100, 10 * GAS)
    assert ppb.txs == ()
    assert ppb.body_hash == body_hash([])
    assert ppb.threshold_T == 100


def test_tso_time_threshold_and_hash_tiebreak():
    """
    C is created after T; A and B tie on gas price and the higher hash goes first
    """
    a1, b1, c1 = _tx(A, 1, 5, 10), _tx(B, 1, 5, 12), _tx(C, 1, 7, 20)
    ppb = tso_select(_pool([(a1, 10), (b1, 12), (c1, 20)]), 15, 10 * GAS)
    assert c1 not in ppb.txs
    assert list(ppb.txs) == sorted([a1, b1], key=lambda tx: tx.hash, reverse=True)


def test_tso_only_heads_compete():
    """
    D2 at gas 9 cannot jump D1 at gas 1
    """
    d1, d2, e1 = _tx(D, 1, 1), _tx(D, 2, 9), _tx(E, 1, 5)
    ppb = tso_select(_pool([(d1, 0), (d2, 0), (e1, 0)]), 10, 10 * GAS)
    assert list(ppb.txs) == [e1, d1, d2]


def test_tso_stops_when_best_does_not_fit():
    """
    The stop rule does not skip ahead to smaller transactions
    """
    big = Transaction(sender=A, recipient=99, nonce=1, gas_price=9, gas_used=3 * GAS)
    small = _tx(B, 1, 1)
    ppb = tso_select(_pool([(big, 0), (small, 0)]), 10, 2 * GAS)
    assert ppb.txs == ()


def test_tso_successor_after_threshold_is_held_back():
    """
    An account's next nonce created after T is not promoted
    """
    a1, a2 = _tx(A, 1, 3, 5), _tx(A, 2, 9, 50)
    assert list(tso_select(_pool([(a1, 5), (a2, 50)]), 10, 10 * GAS).txs) == [a1]


def test_tso_receive_deadline():
    """
    A transaction created before T but received after the deadline cuts its account's chain
    """
    a1, a2, b1 = _tx(A, 1, 3, 0), _tx(A, 2, 9, 0), _tx(B, 1, 5, 0)
    pool = _pool([(a1, 5), (a2, 1500), (b1, 900)])
    assert list(tso_select(pool, 10, 10 * GAS, received_by=1010).txs) == [b1, a1]
    assert len(tso_select(pool, 10, 10 * GAS)) == 3


def test_tso_skips_future_nonces():
    """
    A gap after the committed nonce keeps the account out
    """
    assert tso_select(_pool([(_tx(A, 2, 9), 0)]), 10, 10 * GAS).txs == ()


def test_tso_matches_oracle_and_ignores_arrival_order(rng):
    """
    Same PPB for every arrival order and equal to the brute-force greedy order
    """
    for _ in range(oracle_cases(300, 1000)):
        txs = _random_pool_txs(rng, int(rng.integers(0, 7)))
        T = int(rng.integers(0, 100))
        limit = int(rng.integers(1, 7)) * GAS
        expected = tso_oracle(txs, T, limit)
        reference = tso_select(_pool([(tx, 0) for tx in txs]), T, limit)
        assert list(reference.txs) == expected
        for _ in range(5):
            shuffled = [txs[i] for i in rng.permutation(len(txs))]
            again = tso_select(_pool([(tx, int(rng.integers(0, 500))) for tx in shuffled]), T, limit)
            assert again.body_hash == reference.body_hash


def test_tso_respects_gas_and_nonce_order(rng):
    """
    Gas budget holds and each account's nonces are ascending and contiguous
    """
    for _ in range(oracle_cases(100, 1000)):
        txs = _random_pool_txs(rng, 40, n_accounts=8)
        limit = int(rng.integers(5, 30)) * GAS
        ppb = tso_select(_pool([(tx, 0) for tx in txs]), 60, limit)
        assert ppb.gas_used <= limit
        seen = {}
        for tx in ppb.txs:
            assert tx.nonce == seen.get(tx.sender, 0) + 1
            seen[tx.sender] = tx.nonce


def test_legacy_local_first():
    """
    A local low-gas transaction beats a remote high-gas one
    """
    local, remote = _tx(A, 1, 1), _tx(B, 1, 50)
    pool = _pool([(local, 0, True), (remote, 0)])
    assert legacy_select(pool, MINER, 10 * GAS) == [local, remote]


def test_legacy_miner_transactions_are_local():
    """
    The miner's own account counts as local
    """
    own, remote = _tx(MINER, 1, 1), _tx(B, 1, 50)
    assert legacy_select(_pool([(own, 0), (remote, 0)]), MINER, 10 * GAS)[0] == own


def test_legacy_earliest_receive_time_breaks_ties():
    """
    Two remote gas-5 transactions: the one received at 10 goes first
    """
    early, late = _tx(A, 1, 5), _tx(B, 1, 5)
    assert legacy_select(_pool([(late, 12), (early, 10)]), MINER, 10 * GAS) == [early, late]


def test_legacy_nonce_chain():
    """
    Heads gas 2 and gas 5: gas 5 first, then gas 2, then its successor at gas 9
    """
    n1, n2, other = _tx(A, 1, 2), _tx(A, 2, 9), _tx(B, 1, 5)
    assert legacy_select(_pool([(n1, 0), (n2, 0), (other, 0)]), MINER, 10 * GAS) == [other, n1, n2]


def test_legacy_skips_account_that_does_not_fit():
    """
    Unlike TSO, an oversized transaction is skipped and smaller ones still go in
    """
    big = Transaction(sender=A, recipient=99, nonce=1, gas_price=9, gas_used=3 * GAS)
    small = _tx(B, 1, 1)
    assert legacy_select(_pool([(big, 0), (small, 0)]), MINER, 2 * GAS) == [small]


def test_merge_is_idempotent():
    """
    Merging a PPB with its own transactions changes nothing
    """
    txs = [_tx(A, 1, 3), _tx(B, 1, 4), _tx(A, 2, 8)]
    pool = _pool([(tx, 0) for tx in txs])
    local = tso_select(pool, 10, 10 * GAS)
    assert merge_ppb(local, local.txs, pool, 10, 1000, 10 * GAS) == local


def test_merge_rejects_late_local_receipt():
    """
    A remote transaction this node received after T + delta is left out
    """
    a, late = _tx(A, 1, 3, 0), _tx(B, 1, 9, 5)
    pool = _pool([(a, 0), (late, 10 + 1000 + 1)])
    local = PrePackedBody.build([a], 10)
    merged = merge_ppb(local, [late], pool, 10, 1000, 10 * GAS)
    assert merged.txs == (a,)
    on_time = _pool([(a, 0), (late, 10 + 1000)])
    assert late in merge_ppb(local, [late], on_time, 10, 1000, 10 * GAS).txs


def test_merge_ignores_unknown_transactions():
    """
    Remote transactions absent from the pool are dropped
    """
    a = _tx(A, 1, 3)
    pool = _pool([(a, 0)])
    local = PrePackedBody.build([a], 10)
    assert merge_ppb(local, [_tx(C, 1, 50)], pool, 10, 1000, 10 * GAS).txs == (a,)


def test_merge_converges_two_nodes():
    """
    X holds {a, b} eligible, Y holds {b, c}; after exchanging both end on TSO of {a, b, c}
    """
    a, b, c = _tx(A, 1, 3), _tx(B, 1, 5), _tx(C, 1, 4)
    pool_x = _pool([(a, 0), (b, 0), (c, 11)])
    pool_y = _pool([(b, 0), (c, 0), (a, 11)])
    x = PrePackedBody.build([b, a], 10)
    y = PrePackedBody.build([b, c], 10)
    merged_x = merge_ppb(x, y.txs, pool_x, 10, 1000, 10 * GAS)
    merged_y = merge_ppb(y, x.txs, pool_y, 10, 1000, 10 * GAS)
    assert merged_x.body_hash == merged_y.body_hash
    assert list(merged_x.txs) == [b, c, a]
    assert merge_ppb(merged_x, y.txs, pool_x, 10, 1000, 10 * GAS) == merged_x


def test_merge_is_commutative_on_shared_pool(rng):
    """
    Two nodes holding the same pool end on the same body whichever side merges, and a
    repeated merge changes nothing
    """
    for _ in range(oracle_cases(200, 2000)):
        txs = _random_pool_txs(rng, int(rng.integers(1, 16)))
        shared = _pool([(tx, 0) for tx in txs])
        x = tso_select(_pool([(tx, 0) for tx in txs if rng.random() < 0.6]), 100, 8 * GAS)
        y = tso_select(_pool([(tx, 0) for tx in txs if rng.random() < 0.6]), 100, 8 * GAS)
        xy = merge_ppb(x, y.txs, shared, 100, 1000, 8 * GAS)
        yx = merge_ppb(y, x.txs, shared, 100, 1000, 8 * GAS)
        assert xy.body_hash == yx.body_hash
        assert merge_ppb(xy, y.txs, shared, 100, 1000, 8 * GAS) == xy


def test_merge_rejects_negative_delta():
    """
    delta must be non-negative
    """
    with pytest.raises(ValueError):
        merge_ppb(PrePackedBody.build([], 0), [], TxPool(), 0, -1, GAS)
