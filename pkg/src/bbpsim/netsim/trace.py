#! /usr/bin/env python3
"""
Raw measurements of one run and their CSV files
Date: Mar 13, 2025
"""
# Standard Library Imports
import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

# Local Imports
from bbpsim.analytics.stats import propagation_percentile

BLOCKS_COLUMNS = ("block_hash", "height", "miner", "mine_ms", "p50_ms", "p90_ms", "p99_ms")
MESSAGES_COLUMNS = ("time_ms", "src", "dst", "type", "bytes")
SYNC_COLUMNS = ("height", "synced_nodes", "total_nodes")
STALE_COLUMNS = ("kind", "count", "height")
COMMITS_COLUMNS = ("block_hash", "node", "time_ms", "path", "hop", "from_node", "proc_ms", "n_txs", "n_u",
                   "pool_hits")


@dataclass(frozen=True)
class BlockRecord:
    block_hash: str
    parent_hash: str
    height: int
    miner: int
    mine_ms: float
    n_txs: int


@dataclass(frozen=True)
class CommitRecord:
    block_hash: str
    node: int
    time_ms: float
    path: str
    hop: int
    from_node: int
    proc_ms: float
    n_txs: int
    n_u: int
    pool_hits: int


@dataclass(frozen=True)
class MessageRecord:
    time_ms: float
    src: int
    dst: int
    type: str
    bytes: int
    category: str


def _ms(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"


@dataclass
class RawTrace:
    """
    Everything a run measured. Records are appended in event order, so two runs of
    the same scenario produce identical traces.
    """
    protocol: str
    n_nodes: int
    seed: int
    n_t: int
    blocks: dict[str, BlockRecord] = field(default_factory=dict)
    commits: list[CommitRecord] = field(default_factory=list)
    messages: list[MessageRecord] = field(default_factory=list)
    sync: dict[int, list[int]] = field(default_factory=dict)
    stale: Counter = field(default_factory=Counter)
    tx_messages: int = 0
    tx_bytes: int = 0
    final_heads: list[str] = field(default_factory=list)
    mean_link_ms: float | None = None

    def record_mined(self, block, miner: int, time_ms: float) -> None:
        self.blocks[block.hash.hex()] = BlockRecord(block.hash.hex(), block.header.parent_hash.hex(), block.number,
                                                    miner, time_ms, len(block.body))

    def record_commit(self, node: int, time_ms: float, action) -> None:
        self.commits.append(CommitRecord(action.block_hash.hex(), node, time_ms, action.path, action.hop,
                                         action.from_node, action.proc_ms, action.n_txs, action.n_u,
                                         action.pool_hits))

    def record_message(self, time_ms: float, src: int, dst: int, message, n_bytes: int) -> None:
        self.messages.append(MessageRecord(time_ms, src, dst, message.type_name, n_bytes, message.category))

    def record_tx_traffic(self, count: int, n_bytes: int) -> None:
        self.tx_messages += count
        self.tx_bytes += n_bytes

    def record_sync(self, height: int, synced: bool) -> None:
        counts = self.sync.setdefault(height, [0, 0])
        counts[0] += int(synced)
        counts[1] += 1

    def record_stale(self, kind: str, height: int) -> None:
        self.stale[(kind, height)] += 1

    def commits_by_block(self) -> dict[str, list[CommitRecord]]:
        grouped: dict[str, list[CommitRecord]] = {h: [] for h in self.blocks}
        for commit in self.commits:
            grouped.setdefault(commit.block_hash, []).append(commit)
        return grouped

    def block_delays(self) -> dict[str, list[float]]:
        """Per mined block, commit time minus mine time at every node that committed it"""
        grouped = self.commits_by_block()
        return {h: [c.time_ms - record.mine_ms for c in grouped[h]] for h, record in self.blocks.items()}

    def canonical_chain(self) -> list[str]:
        """Mined blocks on the chain ending at the head most nodes settled on, oldest first"""
        if not self.final_heads:
            return []
        head = Counter(self.final_heads).most_common(1)[0][0]
        chain = []
        while head in self.blocks:
            chain.append(head)
            head = self.blocks[head].parent_hash
        return chain[::-1]

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        """
        Write blocks.csv, messages.csv, sync.csv, stale.csv and commits.csv
        :param out_dir: Target directory, created if needed
        :return: Map of file stem to path
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        delays = self.block_delays()
        block_rows = []
        for record in sorted(self.blocks.values(), key=lambda r: (r.mine_ms, r.block_hash)):
            samples = delays[record.block_hash]
            block_rows.append((record.block_hash, record.height, record.miner, _ms(record.mine_ms),
                               *(_ms(propagation_percentile(samples, self.n_nodes, q)) for q in (50, 90, 99))))
        tables = {
            "blocks": (BLOCKS_COLUMNS, block_rows),
            "messages": (MESSAGES_COLUMNS, [(_ms(m.time_ms), m.src, m.dst, m.type, m.bytes) for m in self.messages]),
            "sync": (SYNC_COLUMNS, [(h, s, t) for h, (s, t) in sorted(self.sync.items())]),
            "stale": (STALE_COLUMNS, [(k, c, h) for (k, h), c in sorted(self.stale.items(), key=lambda i: (i[0][1], i[0][0]))]),
            "commits": (COMMITS_COLUMNS, [(c.block_hash, c.node, _ms(c.time_ms), c.path, c.hop, c.from_node,
                                           _ms(c.proc_ms), c.n_txs, c.n_u, c.pool_hits) for c in self.commits]),
        }
        paths = {}
        for stem, (columns, rows) in tables.items():
            path = out_dir / f"{stem}.csv"
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(columns)
                writer.writerows(rows)
            paths[stem] = path
        return paths
