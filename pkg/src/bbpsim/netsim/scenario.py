#! /usr/bin/env python3
"""
Scenario parameters for one simulation run, loaded from JSON
Date: Mar 9, 2025
"""
# Standard Library Imports
import json
from pathlib import Path
from typing import Literal

# Third Party Imports
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

# Local Imports
from bbpsim.errors import ConfigError

GROUPS = ("Asia", "Oceania", "NorthAmerica", "Europe")


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CostModel(_Config):
    """
    Per-block processing costs in ms. Defaults give 12 ms for a synchronized
    2000-transaction header and about 102 ms for full validation of 200 transactions.
    """
    t_h: float = Field(2.0, ge=0)
    t_e: float = Field(0.4, ge=0)
    t_w: float = Field(0.1, ge=0)
    t_r: float = Field(0.005, ge=0)


class MessageSizes(_Config):
    s_hash: int = Field(72, ge=0)
    s_h: int = Field(508, ge=0)
    s_t: int = Field(250, ge=0)


class LinkConfig(_Config):
    bandwidth_bps: float = Field(55e6, gt=0)
    loss_min: float = Field(0.0, ge=0, le=1)
    loss_max: float = Field(0.01, ge=0, le=1)
    retransmit_multiplier: float = Field(2.0, ge=0)

    @model_validator(mode="after")
    def _loss_range(self):
        if self.loss_min > self.loss_max:
            raise ValueError("loss_min must not exceed loss_max")
        return self


class TopologyConfig(_Config):
    n_nodes: int = Field(200, ge=4)
    attach_m: int = Field(8, ge=1)
    triad_p: float = Field(0.3, ge=0, le=1)
    group_weights: dict[str, float] = Field(
        default_factory=lambda: {"Asia": 0.2, "Oceania": 0.05, "NorthAmerica": 0.4, "Europe": 0.35})
    max_retries: int = Field(10, ge=1)

    @model_validator(mode="after")
    def _check(self):
        unknown = set(self.group_weights) - set(GROUPS)
        if unknown:
            raise ValueError(f"unknown groups {sorted(unknown)}")
        if any(w < 0 for w in self.group_weights.values()) or abs(sum(self.group_weights.values()) - 1) > 1e-9:
            raise ValueError("group weights must be non-negative and sum to 1")
        if self.attach_m >= self.n_nodes:
            raise ValueError("attach_m must be smaller than n_nodes")
        return self


class WorkloadConfig(_Config):
    n_accounts: int = Field(2000, ge=1)
    initial_balance: int = Field(10 ** 18, ge=0)
    gas_price_min: int = Field(1, ge=0)
    gas_price_max: int = Field(100, ge=0)
    max_amount: int = Field(10 ** 6, ge=0)
    coinbase_tx_fraction: float = Field(0.01, ge=0, le=1)
    late_fraction: float = Field(0.0, ge=0, le=1)
    local_fraction: float = Field(0.0, ge=0, le=1)
    withheld_fraction: float = Field(0.0, ge=0, le=1)
    late_delay_ms: float = Field(2000.0, ge=0)
    tx_rate_factor: float = Field(1.2, ge=0)
    private_accounts: int = Field(20, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.gas_price_min > self.gas_price_max:
            raise ValueError("gas_price_min must not exceed gas_price_max")
        if self.late_fraction + self.local_fraction + self.withheld_fraction > 1:
            raise ValueError("late, local and withheld fractions must sum to at most 1")
        return self


class Scenario(_Config):
    """
    Everything a run depends on besides the code itself
    """
    protocol: Literal["bbp", "lbp", "bhp", "cbp"] = "bbp"
    seed: int = Field(1, ge=0)
    n_t: int = Field(200, ge=0)
    t_g_ms: float = Field(14_000.0, gt=0)
    miner_fraction: float = Field(0.1, gt=0, le=1)
    delta_ms: float = Field(1000.0, ge=0)
    gas_limit: int | None = Field(None, ge=0)
    run_blocks: int = Field(20, ge=1)
    drain_ms: float | None = Field(None, ge=0)
    t1_ms: float = Field(400.0, ge=0)
    t2_ms: float = Field(100.0, ge=0)
    max_sync_rounds: int = Field(4, ge=0)
    ppb_rebuild_delay_ms: float = Field(100.0, ge=0)
    tx_relay: Literal["gossip", "direct"] = "gossip"
    tx_batch_ms: float = Field(200.0, gt=0)
    trace_tx_messages: bool = False
    dishonest_miner_fraction: float = Field(0.0, ge=0, le=1)
    costs: CostModel = Field(default_factory=CostModel)
    sizes: MessageSizes = Field(default_factory=MessageSizes)
    link: LinkConfig = Field(default_factory=LinkConfig)
    topology: TopologyConfig = Field(default_factory=TopologyConfig)
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)

    @property
    def effective_gas_limit(self) -> int:
        return self.gas_limit if self.gas_limit is not None else self.n_t * 21_000

    @property
    def effective_drain_ms(self) -> float:
        return self.drain_ms if self.drain_ms is not None else 10 * self.t_g_ms

    @property
    def n_nodes(self) -> int:
        return self.topology.n_nodes


def _key_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def config_error(exc: ValidationError, source: str) -> ConfigError:
    """
    Turn a pydantic error into a ConfigError naming the first failing key
    :param exc: Validation error
    :param source: File or object being validated
    :return: ConfigError
    """
    first = exc.errors()[0]
    return ConfigError(f"{source}: invalid value for '{_key_path(first)}': {first['msg']}")


def read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def parse_model(model: type[BaseModel], data: dict, source: str = "config"):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise config_error(exc, source) from None


def load_scenario(path: str | Path) -> Scenario:
    """
    Load and validate a scenario file
    :param path: JSON file
    :return: Scenario
    """
    return parse_model(Scenario, read_json(path), str(path))
