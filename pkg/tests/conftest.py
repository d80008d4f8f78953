#!/usr/bin/env python3
"""
Shared fixtures, including scripted nodes: protocol handlers driven by hand without the engine
Date: Mar 5, 2025
"""
# Third Party Imports
import numpy as np
import pytest

# Local Imports
from bbpsim.chain import Transaction, WorldState, genesis_block
from bbpsim.execution import ValidationCache
from bbpsim.netsim.scenario import CostModel, MessageSizes, Scenario
from bbpsim.netsim.workload import miner_account
from bbpsim.protocols import NodeState, ProtocolContext, get_protocol
from bbpsim.protocols.events import MessageArrival


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250305)


@pytest.fixture
def make_tx():
    """
    Factory with short defaults: make_tx(sender, recipient, nonce, gas_price=0, ...)
    """
    def _make(sender, recipient, nonce, gas_price=0, amount=0, gas_used=21_000, created_ts=0, **kwargs):
        return Transaction(sender=sender, recipient=recipient, nonce=nonce, gas_price=gas_price,
                           gas_used=gas_used, amount=amount, created_ts=created_ts, **kwargs)
    return _make


@pytest.fixture
def rich_state() -> WorldState:
    """Accounts 1..8 at nonce 0 with 10^12 wei each"""
    return WorldState({account: (0, 10 ** 12) for account in range(1, 9)})


@pytest.fixture
def small_scenario() -> Scenario:
    """Twenty nodes, five blocks, direct tx relay"""
    return Scenario(n_t=20, t_g_ms=10_000, run_blocks=5, tx_relay="direct",
                    topology={"n_nodes": 20, "attach_m": 3}, workload={"n_accounts": 200})


@pytest.fixture
def genesis():
    state = WorldState({account: (0, 10 ** 12) for account in range(1, 9)})
    return genesis_block(state), state


@pytest.fixture
def ctx() -> ProtocolContext:
    return ProtocolContext(costs=CostModel(), sizes=MessageSizes(), gas_limit=10 * 21_000, cache=ValidationCache())


@pytest.fixture
def protocol(ctx):
    """protocol("bbp") and so on, all sharing one context"""
    return lambda name: get_protocol(name, ctx)


@pytest.fixture
def make_node(genesis):
    block, state = genesis

    def _make(index, neighbors, **kwargs) -> NodeState:
        return NodeState(index, neighbors, block, state, np.random.default_rng(index), miner_account(index),
                         **kwargs)
    return _make


@pytest.fixture
def arrive():
    """arrive(proto, node, src, message, now) delivers one message and returns the outcome"""
    def _arrive(proto, node, src, message, now=0.0):
        return proto.on_event(node, MessageArrival(src, message), now)
    return _arrive
