#! /usr/bin/env python3
"""
Transaction workload: Poisson arrivals with the late, local and withheld kinds that
leave other nodes without a transaction a miner includes
Date: Mar 12, 2025
"""
# Standard Library Imports
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum

# Third Party Imports
import numpy as np

# Local Imports
from bbpsim.chain.model import Transaction, WorldState
from bbpsim.chain.primitives import COINBASE_PLACEHOLDER, AccountId
from bbpsim.netsim.scenario import Scenario

# public senders are 1..n_accounts
MINER_ACCOUNT_BASE = 1_000_000_000
PRIVATE_ACCOUNT_BASE = 2_000_000_000


class TxKind(str, Enum):
    NORMAL = "normal"
    LATE = "late"
    LOCAL = "local"
    WITHHELD = "withheld"

    @property
    def gossiped(self) -> bool:
        return self in (TxKind.NORMAL, TxKind.LATE)


@dataclass(frozen=True)
class WorkloadTx:
    time_ms: float
    tx: Transaction
    kind: TxKind
    origin: int


def miner_account(node: int) -> AccountId:
    return MINER_ACCOUNT_BASE + node


def private_accounts(node: int, per_miner: int) -> range:
    start = PRIVATE_ACCOUNT_BASE + node * per_miner
    return range(start, start + per_miner)


def initial_state(scenario: Scenario, miners: Sequence[int]) -> WorldState:
    """Public accounts and every miner's private senders start funded"""
    cfg = scenario.workload
    balance = cfg.initial_balance
    accounts = {account: (0, balance) for account in range(1, cfg.n_accounts + 1)}
    for node in miners:
        for account in private_accounts(node, cfg.private_accounts):
            accounts[account] = (0, balance)
    return WorldState(accounts)


def arrival_rate(scenario: Scenario) -> float:
    """Transactions per ms, enough to fill about n_t per block interval"""
    return scenario.workload.tx_rate_factor * scenario.n_t / scenario.t_g_ms


def workload(scenario: Scenario, miners: Sequence[int], rng: np.random.Generator) -> Iterator[WorkloadTx]:
    """
    Endless stream of transaction creations
    :param scenario: Run parameters
    :param miners: Mining node ids; special kinds originate at a miner
    :param rng: The workload stream
    :return: Generator of WorkloadTx in time order, empty if the rate is zero
    """
    cfg = scenario.workload
    rate = arrival_rate(scenario)
    if rate <= 0:
        return
    n_nodes = scenario.n_nodes
    nonces: dict[AccountId, int] = {}
    now = 0.0
    while True:
        now += float(rng.exponential(1 / rate))
        draw = float(rng.random())
        if draw < cfg.late_fraction:
            kind = TxKind.LATE
        elif draw < cfg.late_fraction + cfg.local_fraction:
            kind = TxKind.LOCAL
        elif draw < cfg.late_fraction + cfg.local_fraction + cfg.withheld_fraction:
            kind = TxKind.WITHHELD
        else:
            kind = TxKind.NORMAL

        if kind is TxKind.NORMAL:
            origin = int(rng.integers(n_nodes))
            sender = int(rng.integers(1, cfg.n_accounts + 1))
        else:
            origin = miners[int(rng.integers(len(miners)))]
            accounts = private_accounts(origin, cfg.private_accounts)
            sender = accounts[int(rng.integers(len(accounts)))]

        if rng.random() < cfg.coinbase_tx_fraction:
            recipient = COINBASE_PLACEHOLDER
        else:
            recipient = int(rng.integers(1, cfg.n_accounts + 1))
        gas_price = int(rng.integers(cfg.gas_price_min, cfg.gas_price_max + 1))
        if kind is TxKind.WITHHELD:
            gas_price *= 2
        nonces[sender] = nonce = nonces.get(sender, 0) + 1

        tx = Transaction(sender=sender, recipient=recipient, nonce=nonce, gas_price=gas_price,
                         amount=int(rng.integers(0, cfg.max_amount + 1)), created_ts=int(now), origin_node=origin,
                         is_local_only=kind is TxKind.LOCAL)
        yield WorkloadTx(now, tx, kind, origin)
