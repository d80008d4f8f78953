#!/usr/bin/env python3
"""
End-to-end runs of the event engine on a small network
Date: Mar 13, 2025
"""
# Standard Library Imports
import math
from collections import Counter

# Third Party Imports
import pytest

# Local Imports
from bbpsim.netsim.engine import Simulation, run
from bbpsim.protocols.events import Committed, Send, StaleObserved
from bbpsim.protocols.messages import BlockHashAnnounce, BlockHeaderMsg, CompactBlock, FullBlock, Inv

FORWARDED = (FullBlock, BlockHeaderMsg, CompactBlock, Inv, BlockHashAnnounce)


class RecordingSimulation(Simulation):
    """Keeps every block-carrying send and every commit with whether it moved the head"""

    def __init__(self, scenario):
        super().__init__(scenario)
        self.sent: list[tuple[int, int, object]] = []
        self.commits: list[tuple[int, object]] = []
        self.side: set[tuple[int, object]] = set()

    def _apply(self, index, action, at_ms):
        if isinstance(action, Send) and isinstance(action.message, FORWARDED):
            self.sent.append((index, action.dst, action.message))
        elif isinstance(action, Committed):
            self.commits.append((index, action.block_hash))
        elif isinstance(action, StaleObserved) and action.kind == "block":
            self.side.add(self.commits[-1])
        super()._apply(index, action, at_ms)


def _carried_hash(message):
    if isinstance(message, FullBlock):
        return message.block.hash
    if isinstance(message, (BlockHeaderMsg, CompactBlock)):
        return message.header.hash
    return message.block_hash


def _canonical_coverage(trace):
    committed = {}
    for commit in trace.commits:
        committed.setdefault(commit.block_hash, set()).add(commit.node)
    return [committed.get(h, set()) for h in trace.canonical_chain()]


@pytest.mark.parametrize("protocol", ["bbp", "lbp", "bhp", "cbp"])
def test_every_node_commits_the_chain(small_scenario, protocol):
    """
    All protocols deliver every block of the settled chain to every node
    """
    trace = run(small_scenario.model_copy(update={"protocol": protocol}))
    assert len(trace.blocks) == small_scenario.run_blocks
    assert trace.protocol == protocol
    chain = trace.canonical_chain()
    assert chain
    for nodes in _canonical_coverage(trace):
        assert nodes == set(range(small_scenario.n_nodes))
    assert len(set(trace.final_heads)) == 1


def test_heights_increase_along_chain(small_scenario):
    """
    The settled chain is a parent-linked sequence of heights 1, 2, ...
    """
    trace = run(small_scenario)
    heights = [trace.blocks[h].height for h in trace.canonical_chain()]
    assert heights == list(range(1, len(heights) + 1))


def test_runs_are_byte_identical(small_scenario, tmp_path):
    """
    Same scenario, same CSV bytes
    """
    for name in ("a", "b"):
        run(small_scenario).write(tmp_path / name)
    for stem in ("blocks", "messages", "sync", "stale", "commits"):
        assert (tmp_path / "a" / f"{stem}.csv").read_bytes() == (tmp_path / "b" / f"{stem}.csv").read_bytes()


def test_seed_changes_the_run(small_scenario):
    """
    Another seed gives other mining times
    """
    first = run(small_scenario)
    second = run(small_scenario.model_copy(update={"seed": 2}))
    assert sorted(b.mine_ms for b in first.blocks.values()) != sorted(b.mine_ms for b in second.blocks.values())


def test_bbp_mostly_header_only(small_scenario):
    """
    With synchronized pools most BBP hops carry only the header, and sync is recorded per height
    """
    trace = run(small_scenario)
    paths = Counter(c.path for c in trace.commits if c.path != "mined")
    assert paths["header"] >= 0.5 * sum(paths.values())
    assert trace.sync
    for synced, total in trace.sync.values():
        assert 0 <= synced <= total <= small_scenario.n_nodes


def test_lbp_never_uses_headers(small_scenario):
    """
    Legacy relay announces with Inv and ships whole blocks
    """
    trace = run(small_scenario.model_copy(update={"protocol": "lbp"}))
    types = Counter(m.type for m in trace.messages)
    assert types["BlockHeaderMsg"] == 0
    assert types["Inv"] > 0 and types["FullBlock"] > 0
    assert not trace.sync


def test_cbp_sends_compact_blocks(small_scenario):
    """
    Compact relay moves short ids instead of bodies
    """
    trace = run(small_scenario.model_copy(update={"protocol": "cbp"}))
    types = Counter(m.type for m in trace.messages)
    assert types["CompactBlock"] > 0


def test_gossip_mode_counts_tx_traffic(small_scenario):
    """
    Per-message tx gossip is aggregated unless tx messages are traced
    """
    scenario = small_scenario.model_copy(update={"tx_relay": "gossip", "run_blocks": 3})
    quiet = run(scenario)
    assert quiet.tx_messages > 0 and quiet.tx_bytes > 0
    assert all(m.category != "tx" for m in quiet.messages)
    traced = run(scenario.model_copy(update={"trace_tx_messages": True}))
    assert any(m.category == "tx" for m in traced.messages)


def test_voided_events_do_not_count(small_scenario):
    """
    Exactly run_blocks blocks are mined no matter how many events were voided
    """
    simulation = Simulation(small_scenario.model_copy(update={"run_blocks": 8, "t_g_ms": 3000}))
    trace = simulation.run()
    assert len(trace.blocks) == 8
    assert simulation.events_processed > 0
    assert trace.mean_link_ms == pytest.approx(simulation.topology.mean_latency_ms())


@pytest.mark.parametrize("protocol", ["bbp", "lbp", "bhp", "cbp"])
def test_block_sent_once_per_link(small_scenario, protocol):
    """
    A node forwards a given block to a given neighbour at most once per message type
    """
    simulation = RecordingSimulation(small_scenario.model_copy(update={"protocol": protocol}))
    simulation.run()
    assert simulation.sent
    sends = Counter((type(m).__name__, _carried_hash(m), src, dst) for src, dst, m in simulation.sent)
    assert max(sends.values()) == 1


@pytest.mark.parametrize("protocol", ["bbp", "lbp"])
def test_first_received_block_wins(small_scenario, protocol):
    """
    Frequent forks: no node moves its head to two different blocks on the same parent
    """
    scenario = small_scenario.model_copy(update={"protocol": protocol, "t_g_ms": 1500, "run_blocks": 12})
    simulation = RecordingSimulation(scenario)
    simulation.run()
    heads = Counter()
    for index, block_hash in simulation.commits:
        if (index, block_hash) not in simulation.side:
            parent = simulation.nodes[index].chain.get(block_hash).header.parent_hash
            heads[(index, parent)] += 1
    assert heads
    assert max(heads.values()) == 1


def test_bhp_pushes_to_square_root_of_degree(small_scenario):
    """
    Each node pushes a full block to at most ceil(sqrt(degree)) neighbours, and the miner
    to exactly that many
    """
    simulation = RecordingSimulation(small_scenario.model_copy(update={"protocol": "bhp"}))
    trace = simulation.run()
    pushes = Counter((src, m.block.hash.hex()) for src, _, m in simulation.sent if isinstance(m, FullBlock))
    for (src, _), n in pushes.items():
        assert n <= math.ceil(math.sqrt(simulation.topology.degree(src)))
    for block_hash, record in trace.blocks.items():
        assert pushes[(record.miner, block_hash)] == math.ceil(math.sqrt(simulation.topology.degree(record.miner)))
