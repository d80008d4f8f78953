#! /usr/bin/env python3
"""
Events fed to protocol handlers and the actions they return
Date: Mar 10, 2025
"""
# Standard Library Imports
from dataclasses import dataclass, field
from typing import Any

# Local Imports
from bbpsim.chain.model import Block, Transaction
from bbpsim.chain.primitives import Hash256
from bbpsim.protocols.messages import WireMessage


# Events
@dataclass(frozen=True)
class Start:
    """Delivered once to every node at time 0"""


@dataclass(frozen=True)
class MessageArrival:
    src: int
    message: WireMessage


@dataclass(frozen=True)
class TimerFired:
    name: str
    key: Any


@dataclass(frozen=True)
class MineBlock:
    """This node found the next block"""


@dataclass(frozen=True)
class TxCreated:
    tx: Transaction
    gossip: bool = True
    is_local: bool = False


@dataclass(frozen=True)
class GossipStart:
    """Start relaying a transaction this node already holds"""
    tx: Transaction


@dataclass(frozen=True)
class TxBatch:
    """Transactions delivered together by the direct relay"""
    txs: tuple[Transaction, ...]


# Actions; offset is ms after the handler started
@dataclass(frozen=True)
class Send:
    dst: int
    message: WireMessage
    offset: float = 0.0


@dataclass(frozen=True)
class StartTimer:
    name: str
    key: Any
    delay: float
    offset: float = 0.0


@dataclass(frozen=True)
class CancelTimer:
    name: str
    key: Any
    offset: float = 0.0


@dataclass(frozen=True)
class Committed:
    block_hash: Hash256
    height: int
    path: str
    hop: int
    from_node: int
    proc_ms: float
    n_txs: int
    n_u: int
    pool_hits: int
    offset: float = 0.0


@dataclass(frozen=True)
class Mined:
    block: Block
    offset: float = 0.0


@dataclass(frozen=True)
class SyncObserved:
    height: int
    synced: bool
    offset: float = 0.0


@dataclass(frozen=True)
class StaleObserved:
    kind: str
    height: int
    offset: float = 0.0


Action = Send | StartTimer | CancelTimer | Committed | Mined | SyncObserved | StaleObserved


@dataclass
class Outcome:
    """
    Actions of one handler call plus the simulated processing time it took.
    Actions are stamped with the busy time reached when they are added.
    """
    actions: list = field(default_factory=list)
    busy_ms: float = 0.0

    def charge(self, ms: float) -> None:
        self.busy_ms += ms

    def send(self, dst: int, message: WireMessage) -> None:
        self.actions.append(Send(dst, message, self.busy_ms))

    def start_timer(self, name: str, key: Any, delay: float) -> None:
        self.actions.append(StartTimer(name, key, delay, self.busy_ms))

    def cancel_timer(self, name: str, key: Any) -> None:
        self.actions.append(CancelTimer(name, key, self.busy_ms))

    def committed(self, **fields) -> None:
        self.actions.append(Committed(**fields, offset=self.busy_ms))

    def mined(self, block: Block) -> None:
        self.actions.append(Mined(block, self.busy_ms))

    def sync(self, height: int, synced: bool) -> None:
        self.actions.append(SyncObserved(height, synced, self.busy_ms))

    def stale(self, kind: str, height: int) -> None:
        self.actions.append(StaleObserved(kind, height, self.busy_ms))

    def of_type(self, kind: type) -> list:
        return [action for action in self.actions if isinstance(action, kind)]

    def sends(self, message_type: type | None = None) -> list[Send]:
        return [a for a in self.actions if isinstance(a, Send)
                and (message_type is None or isinstance(a.message, message_type))]
