#! /usr/bin/env python3
"""
Reduce a RawTrace to one report row, compare against the closed-form model and
write report.csv
Date: Mar 14, 2025
"""
# Standard Library Imports
import csv
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, fields
from pathlib import Path

# Local Imports
from bbpsim.analytics.models import AnalyticParams, latency_model
from bbpsim.analytics.stats import coverage_rank, mean, propagation_percentile
from bbpsim.errors import BbpSimError, TraceError
from bbpsim.logger import banner
from bbpsim.netsim.scenario import Scenario
from bbpsim.netsim.trace import CommitRecord, RawTrace


@dataclass(frozen=True)
class MetricsReport:
    """
    One (protocol, n_t, seed) cell. Fields that do not apply to the protocol, or
    that no block produced, are None. A failed sweep cell carries only its
    coordinates and ``error``.
    """
    protocol: str
    n_t: int
    seed: int
    p90_ms: float | None = None
    p90_model_ms: float | None = None
    bytes_per_block: float | None = None
    sync_fail_frac: float | None = None
    beta: float | None = None
    gamma: float | None = None
    stale_tx: int | None = None
    stale_block_rate: float | None = None
    alpha: float | None = None
    hops: float | None = None
    processing_ms: float | None = None
    tx_match_rate: float | None = None
    block_match_rate: float | None = None
    error: str = ""


REPORT_COLUMNS = tuple(f.name for f in fields(MetricsReport))


def _share(commits: Sequence[CommitRecord], predicate) -> float | None:
    if not commits:
        return None
    return sum(1 for c in commits if predicate(c)) / len(commits)


def _p90_hops(trace: RawTrace, grouped: dict[str, list[CommitRecord]]) -> float | None:
    """Hop count of the node that completes 90% coverage, averaged over blocks that reached it"""
    k = coverage_rank(trace.n_nodes, 90)
    hops = []
    for commits in grouped.values():
        if len(commits) >= k:
            hops.append(sorted(commits, key=lambda c: c.time_ms)[k - 1].hop)
    return mean(hops)


def model_params(trace: RawTrace, scenario: Scenario, report: MetricsReport) -> AnalyticParams:
    """
    Closed-form symbols for a run: costs and sizes from the scenario, gamma/alpha/beta,
    n_u, h and t_c measured from the trace
    """
    received = [c for c in trace.commits if c.path != "mined"]
    header_commits = [c for c in received if c.path == "header"]
    missed = [m.bytes for m in trace.messages if m.type == "MissedTxs"]
    n_t = mean([b.n_txs for b in trace.blocks.values()])
    costs, sizes = scenario.costs, scenario.sizes
    return AnalyticParams(
        s_h=sizes.s_h, s_hash=sizes.s_hash, s_t=sizes.s_t, s_txs=mean(missed) or 0.0,
        t_g=scenario.t_g_ms, t_e=costs.t_e, t_w=costs.t_w, t_r=costs.t_r, t_h=costs.t_h,
        t_c=trace.mean_link_ms, t_1=scenario.t1_ms, t_2=scenario.t2_ms, b_w=scenario.link.bandwidth_bps,
        n_t=n_t, n_u=mean([c.n_u for c in header_commits]) or 0.0, h=report.hops,
        gamma=report.gamma, alpha=report.alpha, beta=report.beta,
    )


def reduce_trace(trace: RawTrace, scenario: Scenario | None = None) -> MetricsReport:
    """
    Reduce one run to its report row
    :param trace: A complete RawTrace
    :param scenario: The run's scenario; without it p90_model_ms stays empty
    :return: MetricsReport
    """
    if not trace.blocks:
        raise TraceError(f"trace of {trace.protocol} seed {trace.seed} has no mined blocks")

    grouped = trace.commits_by_block()
    p90s = [propagation_percentile([c.time_ms - trace.blocks[h].mine_ms for c in grouped[h]], trace.n_nodes, 90)
            for h in trace.blocks]
    received = [c for c in trace.commits if c.path != "mined"]

    sync_total = sum(total for _, total in trace.sync.values())
    sync_fail = (sum(total - synced for synced, total in trace.sync.values()) / sync_total) if sync_total else None
    block_bytes = sum(m.bytes for m in trace.messages if m.category == "block")

    with_txs = [c for c in received if c.n_txs]
    report = MetricsReport(
        protocol=trace.protocol,
        n_t=trace.n_t,
        seed=trace.seed,
        p90_ms=mean([p for p in p90s if p is not None]),
        bytes_per_block=block_bytes / len(trace.blocks),
        sync_fail_frac=sync_fail,
        beta=_share(received, lambda c: c.path != "compact") if trace.protocol == "cbp" else None,
        gamma=_share(received, lambda c: c.path != "header") if trace.protocol == "bbp" else None,
        alpha=_share(received, lambda c: c.path == "announce") if trace.protocol == "bhp" else None,
        stale_tx=sum(n for (kind, _), n in trace.stale.items() if kind == "tx"),
        stale_block_rate=1 - len(trace.canonical_chain()) / len(trace.blocks) if trace.final_heads else None,
        hops=_p90_hops(trace, grouped),
        processing_ms=mean([c.proc_ms for c in received]),
        tx_match_rate=mean([c.pool_hits / c.n_txs for c in with_txs]),
        block_match_rate=_share(received, lambda c: c.pool_hits == c.n_txs),
    )
    if scenario is None or report.hops is None:
        return report
    try:
        predicted = latency_model(trace.protocol, model_params(trace, scenario, report))
    except BbpSimError:
        predicted = None
    return MetricsReport(**{**asdict(report), "p90_model_ms": predicted})


def failed_cell(protocol: str, n_t: int, seed: int, error: str) -> MetricsReport:
    return MetricsReport(protocol=protocol, n_t=n_t, seed=seed, error=error)


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_report(reports: Iterable[MetricsReport], path: str | Path) -> Path:
    """
    Write report.csv, one row per cell in the given order
    :param reports: Report rows
    :param path: Target file
    :return: The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for report in reports:
            writer.writerow([format_cell(getattr(report, name)) for name in REPORT_COLUMNS])
    return path


def summary_table(reports: Sequence[MetricsReport]) -> str:
    """
    Human-readable table of the main columns
    :param reports: Report rows
    :return: Multi-line string
    """
    columns = ("protocol", "n_t", "seed", "p90_ms", "p90_model_ms", "bytes_per_block", "sync_fail_frac",
               "stale_block_rate")
    rows = [[format_cell(getattr(r, c)) or "-" for c in columns] for r in reports]
    widths = [max(len(c), *(len(row[i]) for row in rows)) if rows else len(c) for i, c in enumerate(columns)]
    lines = [banner("Propagation report"), "  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    for report, row in zip(reports, rows):
        line = "  ".join(v.rjust(w) for v, w in zip(row, widths))
        lines.append(f"{line}  FAILED: {report.error}" if report.error else line)
    return "\n".join(lines)
