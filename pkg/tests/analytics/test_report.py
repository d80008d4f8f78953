#!/usr/bin/env python3
"""
Test trace reduction, report.csv and the CSV schemas on hand-built traces
Date: Mar 15, 2025
"""
# Standard Library Imports
import csv
from collections import Counter

# Third Party Imports
import pytest

# Local Imports
from bbpsim.analytics.csv_schema import check_csv
from bbpsim.analytics.report import REPORT_COLUMNS, failed_cell, reduce_trace, summary_table, write_report
from bbpsim.errors import TraceError
from bbpsim.netsim.scenario import Scenario
from bbpsim.netsim.trace import BlockRecord, CommitRecord, MessageRecord, RawTrace
from bbpsim.protocols.messages import MESSAGE_TYPES

GENESIS = "00" * 32
B1, B2, SIBLING = "11" * 32, "22" * 32, "33" * 32


def _trace(protocol="bbp", n_nodes=10, paths=None) -> RawTrace:
    """One block mined by node 0 at 1000 ms, every other node commits it 100 ms later"""
    trace = RawTrace(protocol=protocol, n_nodes=n_nodes, seed=7, n_t=50, mean_link_ms=40.0)
    trace.blocks[B1] = BlockRecord(B1, GENESIS, 1, 0, 1000.0, 50)
    trace.commits.append(CommitRecord(B1, 0, 1000.0, "mined", 0, -1, 0.0, 50, 0, 50))
    paths = paths or ["header"] * (n_nodes - 1)
    for node, path in enumerate(paths, start=1):
        trace.commits.append(CommitRecord(B1, node, 1100.0, path, 1, 0, 2.5, 50, 2, 48))
        trace.messages.append(MessageRecord(1090.0, 0, node, "BlockHeaderMsg", 508, "block"))
        trace.messages.append(MessageRecord(500.0, 0, node, "CheckSync", 72, "sync"))
    trace.sync[1] = [n_nodes - 1, n_nodes]
    trace.stale = Counter({("tx", 1): 3, ("block", 1): 1})
    trace.final_heads = [B1] * n_nodes
    return trace


def test_uniform_delay_and_sync():
    """
    p90 of a block everyone gets after 100 ms, traffic per block and the non-synced share
    """
    report = reduce_trace(_trace())
    assert report.p90_ms == 100.0
    assert report.bytes_per_block == 9 * 508
    assert report.sync_fail_frac == pytest.approx(0.1)
    assert report.gamma == 0.0
    assert report.beta is None and report.alpha is None
    assert report.stale_tx == 3
    assert report.stale_block_rate == 0.0
    assert report.hops == 1.0
    assert report.processing_ms == 2.5
    assert report.tx_match_rate == pytest.approx(48 / 50)
    assert report.block_match_rate == 0.0
    assert report.seed == 7


def test_gamma_counts_full_block_commits():
    """
    Fallback commits are the share of BBP hops that needed a full block
    """
    report = reduce_trace(_trace(paths=["header"] * 6 + ["fallback"] * 3))
    assert report.gamma == pytest.approx(3 / 9)


def test_beta_counts_extra_rounds():
    """
    CBP hops that were not reconstructed from the pool alone
    """
    report = reduce_trace(_trace("cbp", paths=["compact"] * 3 + ["missed"] * 5 + ["full"]))
    assert report.beta == pytest.approx(6 / 9)
    assert report.gamma is None


def test_stale_block_rate_from_canonical_chain():
    """
    A sibling that lost the race is stale; a block on the settled chain is not
    """
    trace = _trace()
    trace.blocks[SIBLING] = BlockRecord(SIBLING, GENESIS, 1, 3, 1005.0, 10)
    trace.blocks[B2] = BlockRecord(B2, B1, 2, 4, 15_000.0, 40)
    trace.final_heads = [B2] * 10
    assert trace.canonical_chain() == [B1, B2]
    assert reduce_trace(trace).stale_block_rate == pytest.approx(1 / 3)


def test_blocks_short_of_coverage_are_left_out():
    """
    A block that never reached 90% of the nodes does not enter the average
    """
    trace = _trace()
    trace.blocks[B2] = BlockRecord(B2, B1, 2, 0, 20_000.0, 0)
    trace.commits.append(CommitRecord(B2, 0, 20_000.0, "mined", 0, -1, 0.0, 0, 0, 0))
    assert reduce_trace(trace).p90_ms == 100.0


def test_empty_trace_rejected():
    """
    Nothing mined, nothing to reduce
    """
    with pytest.raises(TraceError):
        reduce_trace(RawTrace(protocol="bbp", n_nodes=4, seed=1, n_t=10))


def test_model_prediction_filled_with_scenario():
    """
    With the scenario at hand the matching closed form is evaluated
    """
    report = reduce_trace(_trace(), Scenario(n_t=50))
    assert report.p90_model_ms is not None
    assert report.p90_model_ms > 0
    assert reduce_trace(_trace()).p90_model_ms is None


def test_report_csv_schema(tmp_path):
    """
    report.csv has the fixed columns and passes the schema check, failed cells included
    """
    reports = [reduce_trace(_trace()), failed_cell("lbp", 100, 2, "event queue exhausted")]
    path = write_report(reports, tmp_path / "report.csv")
    assert check_csv(path) == 2
    with path.open() as handle:
        rows = list(csv.DictReader(handle))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert rows[1]["error"] == "event queue exhausted"
    assert rows[1]["p90_ms"] == ""
    assert "FAILED" in summary_table(reports)


def test_trace_csvs_and_traffic_additivity(tmp_path):
    """
    Every trace file passes its schema; block traffic in the report equals the messages.csv sum
    """
    trace = _trace()
    paths = trace.write(tmp_path)
    for path in paths.values():
        check_csv(path)
    block_types = {cls.__name__ for cls in MESSAGE_TYPES if cls.category == "block"}
    with paths["messages"].open() as handle:
        total = sum(int(row["bytes"]) for row in csv.DictReader(handle) if row["type"] in block_types)
    assert reduce_trace(trace).bytes_per_block * len(trace.blocks) == total


def test_schema_rejects_bad_rows(tmp_path):
    """
    A wrong header or a malformed cell fails the check
    """
    bad_header = tmp_path / "sync.csv"
    bad_header.write_text("height,synced\n1,2\n")
    with pytest.raises(TraceError, match="header"):
        check_csv(bad_header)
    bad_cell = tmp_path / "stale.csv"
    bad_cell.write_text("kind,count,height\ntx,many,3\n")
    with pytest.raises(TraceError, match="count"):
        check_csv(bad_cell)
