#! /usr/bin/env python3
"""
Discrete-event engine: one virtual clock, events ordered by (time, sequence number),
protocol handlers charged simulated processing time before their output leaves the node
Date: Mar 13, 2025
"""
# Standard Library Imports
import heapq
import logging
import math
from dataclasses import dataclass
from itertools import count

# Local Imports
from bbpsim.chain.genesis import genesis_block
from bbpsim.errors import SimulationError
from bbpsim.execution.validation import ValidationCache
from bbpsim.netsim.link import deliver
from bbpsim.netsim.mining import choose_miners, is_voided, mining_process
from bbpsim.netsim.rng import RandomStreams
from bbpsim.netsim.scenario import Scenario
from bbpsim.netsim.topology import Topology, generate_topology
from bbpsim.netsim.trace import RawTrace
from bbpsim.netsim.workload import TxKind, initial_state, miner_account, workload
from bbpsim.protocols.base import NodeState, PropagationProtocol, ProtocolContext, get_protocol
from bbpsim.protocols.events import (CancelTimer, Committed, GossipStart, MessageArrival, Mined, MineBlock, Send,
                                     StaleObserved, Start, StartTimer, SyncObserved, TimerFired, TxBatch, TxCreated)
from bbpsim.protocols.messages import NewTx

logger = logging.getLogger(__name__)

ENGINE = -1


# engine-level events
@dataclass(frozen=True)
class _MiningTick:
    winner: int


@dataclass(frozen=True)
class _WorkloadTick:
    item: object


@dataclass(frozen=True)
class _BatchFlush:
    window: int


@dataclass(frozen=True)
class _Timer:
    token: int
    fired: TimerFired


class Simulation:
    """
    One run of one scenario. Build it, call ``run()`` once, read the RawTrace.
    """

    def __init__(self, scenario: Scenario, protocol: PropagationProtocol | None = None,
                 cache: ValidationCache | None = None, topology: Topology | None = None):
        """
        Constructor for Simulation class
        :param scenario: Run parameters
        :param protocol: Protocol instance, looked up from scenario.protocol when omitted
        :param cache: Validation cache to share, a fresh one by default
        :param topology: Prebuilt topology, generated from the topology stream when omitted
        """
        self.scenario = scenario
        self.streams = RandomStreams(scenario.seed)
        self.topology = topology or generate_topology(scenario.topology, scenario.link, self.streams["topology"])
        n_nodes = self.topology.n_nodes

        mining_rng = self.streams["mining"]
        self.miners = choose_miners(n_nodes, scenario.miner_fraction, mining_rng)
        n_dishonest = round(scenario.dishonest_miner_fraction * len(self.miners))
        dishonest = {self.miners[int(i)] for i in mining_rng.permutation(len(self.miners))[:n_dishonest]}

        self.genesis_state = initial_state(scenario, self.miners)
        self.genesis = genesis_block(self.genesis_state)
        self.protocol = protocol or get_protocol(scenario.protocol, ProtocolContext.from_scenario(scenario, cache))
        miner_set = set(self.miners)
        self.nodes = [
            NodeState(i, self.topology.neighbors(i), self.genesis, self.genesis_state, self.streams.node(i),
                      miner_account(i), is_miner=i in miner_set, dishonest=i in dishonest)
            for i in range(n_nodes)
        ]
        self.trace = RawTrace(protocol=self.protocol.name, n_nodes=n_nodes, seed=scenario.seed, n_t=scenario.n_t,
                              mean_link_ms=self.topology.mean_latency_ms())

        self._queue: list = []
        self._seq = count()
        self._tokens = count()
        self._timers: dict[tuple[int, str, object], int] = {}
        self._busy_until = [0.0] * n_nodes
        self._links_rng = self.streams["links"]
        self._mining = mining_process(scenario.t_g_ms, self.miners, mining_rng)
        self._workload = workload(scenario, self.miners, self.streams["workload"])
        self._batches: dict[int, dict[int, list]] = {}
        self._delays = None
        self._mined = 0
        self._stop_ms: float | None = None
        self.now = 0.0
        self.events_processed = 0

    # queue
    def _push(self, time_ms: float, target: int, event) -> None:
        heapq.heappush(self._queue, (time_ms, next(self._seq), target, event))

    def _schedule_mining(self) -> None:
        time_ms, winner = next(self._mining)
        self._push(time_ms, ENGINE, _MiningTick(winner))

    def _schedule_workload(self) -> None:
        item = next(self._workload, None)
        if item is not None:
            self._push(item.time_ms, ENGINE, _WorkloadTick(item))

    def run(self) -> RawTrace:
        """
        Execute the scenario to completion
        :return: RawTrace
        """
        for node in self.nodes:
            self._push(0.0, node.index, Start())
        self._schedule_mining()
        self._schedule_workload()

        handlers = {
            _MiningTick: self._on_mining_tick,
            _WorkloadTick: self._on_workload_tick,
            _BatchFlush: self._on_batch_flush,
        }
        while self._queue:
            time_ms, _, target, event = heapq.heappop(self._queue)
            if self._stop_ms is not None and time_ms > self._stop_ms:
                break
            self.now = time_ms
            self.events_processed += 1
            if target == ENGINE:
                handlers[type(event)](event, time_ms)
            else:
                self._deliver(target, event, time_ms)

        if self._mined < self.scenario.run_blocks:
            raise SimulationError(f"event queue exhausted after {self._mined} of {self.scenario.run_blocks} blocks")
        self.trace.final_heads = [node.chain.head_hash.hex() for node in self.nodes]
        logger.info("run finished at %.0f ms: %d blocks, %d events, cache hits %d misses %d", self.now, self._mined,
                    self.events_processed, self.protocol.cache.hits, self.protocol.cache.misses)
        return self.trace

    # engine events
    def _on_mining_tick(self, tick: _MiningTick, time_ms: float) -> None:
        top = max(node.chain.height for node in self.nodes)
        winner = self.nodes[tick.winner]
        if is_voided(winner.chain.height, top):
            logger.debug("mining event for node %d voided: height %d, network %d", tick.winner,
                         winner.chain.height, top)
        else:
            self._push(time_ms, tick.winner, MineBlock())
            self._mined += 1
        if self._mined < self.scenario.run_blocks:
            self._schedule_mining()
        else:
            self._stop_ms = time_ms + self.scenario.effective_drain_ms

    def _on_workload_tick(self, tick: _WorkloadTick, time_ms: float) -> None:
        item = tick.item
        direct = self.scenario.tx_relay == "direct"
        if item.kind is TxKind.NORMAL:
            self._push(time_ms, item.origin, TxCreated(item.tx, gossip=not direct))
            if direct:
                self._relay_direct(item.tx, item.origin, time_ms)
        elif item.kind is TxKind.LATE:
            self._push(time_ms, item.origin, TxCreated(item.tx, gossip=False))
            relay_ms = time_ms + self.scenario.workload.late_delay_ms
            if direct:
                self._relay_direct(item.tx, item.origin, relay_ms)
            else:
                self._push(relay_ms, item.origin, GossipStart(item.tx))
        else:
            self._push(time_ms, item.origin, TxCreated(item.tx, gossip=False, is_local=item.kind is TxKind.LOCAL))
        if self._stop_ms is None:
            self._schedule_workload()

    def _relay_direct(self, tx, origin: int, start_ms: float) -> None:
        """Hand the transaction to every other node after its shortest-path delay, batched by window"""
        if self._delays is None:
            self._delays = self.topology.path_delays(self.scenario.sizes.s_t)
        window_ms = self.scenario.tx_batch_ms
        for node, delay in self._delays[origin].items():
            if node == origin:
                continue
            window = math.ceil((start_ms + delay) / window_ms)
            batch = self._batches.get(window)
            if batch is None:
                batch = self._batches[window] = {}
                self._push(window * window_ms, ENGINE, _BatchFlush(window))
            batch.setdefault(node, []).append(tx)
        n_others = self.topology.n_nodes - 1
        self.trace.record_tx_traffic(n_others, n_others * NewTx(tx).size(self.scenario.sizes))

    def _on_batch_flush(self, flush: _BatchFlush, time_ms: float) -> None:
        for node, txs in sorted(self._batches.pop(flush.window).items()):
            self._push(time_ms, node, TxBatch(tuple(txs)))

    # node events
    def _deliver(self, index: int, event, time_ms: float) -> None:
        busy = self._busy_until[index]
        if busy > time_ms:
            self._push(busy, index, event)
            return
        if isinstance(event, _Timer):
            key = (index, event.fired.name, event.fired.key)
            if self._timers.get(key) != event.token:
                return
            del self._timers[key]
            event = event.fired
        outcome = self.protocol.on_event(self.nodes[index], event, time_ms)
        self._busy_until[index] = time_ms + outcome.busy_ms
        for action in outcome.actions:
            self._apply(index, action, time_ms + action.offset)

    def _apply(self, index: int, action, at_ms: float) -> None:
        if isinstance(action, Send):
            message = action.message
            n_bytes = message.size(self.scenario.sizes)
            delay = deliver(self.topology.link(index, action.dst), n_bytes, self._links_rng)
            self._push(at_ms + delay, action.dst, MessageArrival(index, message))
            if message.category != "tx" or self.scenario.trace_tx_messages:
                self.trace.record_message(at_ms, index, action.dst, message, n_bytes)
            else:
                self.trace.record_tx_traffic(1, n_bytes)
        elif isinstance(action, StartTimer):
            token = next(self._tokens)
            self._timers[(index, action.name, action.key)] = token
            self._push(at_ms + action.delay, index, _Timer(token, TimerFired(action.name, action.key)))
        elif isinstance(action, CancelTimer):
            self._timers.pop((index, action.name, action.key), None)
        elif isinstance(action, Committed):
            self.trace.record_commit(index, at_ms, action)
        elif isinstance(action, Mined):
            self.trace.record_mined(action.block, index, at_ms)
            logger.info("node %d mined block %d (%d txs) at %.0f ms", index, action.block.number,
                        len(action.block.body), at_ms)
        elif isinstance(action, SyncObserved):
            self.trace.record_sync(action.height, action.synced)
        elif isinstance(action, StaleObserved):
            self.trace.record_stale(action.kind, action.height)
            if action.kind == "invalid_block":
                logger.debug("node %d rejected a block at height %d", index, action.height)


def run(scenario: Scenario, cache: ValidationCache | None = None) -> RawTrace:
    """
    Execute one scenario
    :param scenario: Run parameters
    :param cache: Optional validation cache shared with other runs in this process
    :return: RawTrace
    """
    return Simulation(scenario, cache=cache).run()
