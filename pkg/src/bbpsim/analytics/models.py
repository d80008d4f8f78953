#! /usr/bin/env python3
"""
Closed-form throughput, fork probability and per-protocol propagation latency
Date: Mar 14, 2025
"""
# Standard Library Imports
import math
from typing import Literal

# Third Party Imports
from pydantic import BaseModel, ConfigDict, Field

# Local Imports
from bbpsim.errors import ModelParameterError

Protocol = Literal["bbp", "lbp", "bhp", "cbp"]


class AnalyticParams(BaseModel):
    """
    Model symbols. Sizes in bytes, times in ms, b_w in bits/s. Any symbol may be left
    out; a model that needs a missing one raises ModelParameterError naming it.
    s_b defaults to s_h + n_t * s_t and s_c to s_h + n_t * s_hash.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    s_b: float | None = Field(None, ge=0)
    s_h: float | None = Field(None, ge=0)
    s_hash: float | None = Field(None, ge=0)
    s_t: float | None = Field(None, ge=0)
    s_c: float | None = Field(None, ge=0)
    s_txs: float | None = Field(None, ge=0)
    t_g: float | None = Field(None, gt=0)
    t_e: float | None = Field(None, ge=0)
    t_w: float | None = Field(None, ge=0)
    t_r: float | None = Field(None, ge=0)
    t_h: float | None = Field(None, ge=0)
    t_c: float | None = Field(None, ge=0)
    t_1: float | None = Field(None, ge=0)
    t_2: float | None = Field(None, ge=0)
    b_w: float | None = Field(None, gt=0)
    n_t: float | None = Field(None, ge=0)
    n_u: float | None = Field(None, ge=0)
    h: float | None = Field(None, ge=0)
    gamma: float | None = Field(None, ge=0, le=1)
    alpha: float | None = Field(None, ge=0, le=1)
    beta: float | None = Field(None, ge=0, le=1)
    k: float | None = Field(None, ge=0)

    def require(self, *names: str) -> tuple[float, ...]:
        values = []
        for name in names:
            value = self.derived(name)
            if value is None:
                raise ModelParameterError(name)
            values.append(value)
        return tuple(values)

    def derived(self, name: str) -> float | None:
        value = getattr(self, name)
        if value is not None:
            return value
        if name == "s_b" and None not in (self.s_h, self.n_t, self.s_t):
            return self.s_h + self.n_t * self.s_t
        if name == "s_c" and None not in (self.s_h, self.n_t, self.s_hash):
            return self.s_h + self.n_t * self.s_hash
        return None


def transfer_ms(n_bytes: float, b_w: float) -> float:
    return 8 * n_bytes / b_w * 1000


def tps(n_t: float, t_g_ms: float) -> float:
    """Transactions per second for n_t per block every t_g_ms"""
    if t_g_ms <= 0:
        raise ModelParameterError("t_g", "must be positive")
    return n_t / (t_g_ms / 1000)


def tps_from_sizes(s_b: float, s_t: float, t_g_ms: float) -> float:
    """Throughput of full blocks: s_b / s_t transactions per block"""
    if s_t <= 0:
        raise ModelParameterError("s_t", "must be positive")
    return tps(s_b / s_t, t_g_ms)


def fork_probability(t_l: float, t_g: float) -> float:
    """
    Stale-block probability when blocks take t_l to reach the network and arrive
    every t_g on average (same time unit)
    """
    if t_g <= 0:
        raise ModelParameterError("t_g", "must be positive")
    return 1 - math.exp(-t_l / t_g)


def fork_probability_tps(k: float, tps_value: float) -> float:
    """
    Fork probability when propagation time grows as k seconds per transaction
    :param k: Seconds of propagation per transaction in the block
    :param tps_value: Throughput in tx/s
    """
    return 1 - math.exp(-k * tps_value)


def _bbp(p: AnalyticParams) -> float:
    gamma, h, n_t, n_u, t_e, t_w, t_r, t_h, t_c, b_w, s_b, s_h = p.require(
        "gamma", "h", "n_t", "n_u", "t_e", "t_w", "t_r", "t_h", "t_c", "b_w", "s_b", "s_h")
    full = n_t * t_e + n_t * t_w + t_h + transfer_ms(s_b, b_w) + t_c
    header = (n_t - n_u) * t_r + n_u * t_e + t_h + transfer_ms(s_h, b_w) + t_c
    return gamma * h * full + (1 - gamma) * h * header


def _lbp(p: AnalyticParams) -> float:
    h, n_t, t_e, t_w, t_h, t_c, b_w, s_b, s_hash = p.require(
        "h", "n_t", "t_e", "t_w", "t_h", "t_c", "b_w", "s_b", "s_hash")
    return h * (n_t * t_e + n_t * t_w + t_h + transfer_ms(2 * s_hash + s_b, b_w) + 3 * t_c)


def _bhp(p: AnalyticParams) -> float:
    alpha, h, n_t, t_e, t_w, t_h, t_c, t_1, t_2, b_w, s_b, s_hash = p.require(
        "alpha", "h", "n_t", "t_e", "t_w", "t_h", "t_c", "t_1", "t_2", "b_w", "s_b", "s_hash")
    t_c_prime = 4 * t_c + t_1 + t_2
    push = h * (t_h + transfer_ms(s_b, b_w) + t_c)
    return push + alpha * h * (n_t * t_e + n_t * t_w + transfer_ms(3 * s_hash, b_w) + t_c_prime)


def _cbp(p: AnalyticParams) -> float:
    beta, h, n_t, t_e, t_w, t_h, t_c, b_w, s_hash, s_c = p.require(
        "beta", "h", "n_t", "t_e", "t_w", "t_h", "t_c", "b_w", "s_hash", "s_c")
    t_v = n_t * t_e + n_t * t_w + t_h
    base = h * (t_v + 3 * t_c + transfer_ms(2 * s_hash + s_c, b_w))
    if beta == 0:
        return base
    (s_txs,) = p.require("s_txs")
    return base + beta * h * (2 * t_c + transfer_ms(s_hash + s_txs, b_w))


LATENCY_MODELS = {"bbp": _bbp, "lbp": _lbp, "bhp": _bhp, "cbp": _cbp}


def latency_model(protocol: str, params: AnalyticParams) -> float:
    """
    Expected time in ms for a block to cross h hops
    :param protocol: bbp, lbp, bhp or cbp
    :param params: Symbols; the ones the protocol needs must be set or derivable
    :return: Latency in ms
    """
    try:
        model = LATENCY_MODELS[protocol]
    except KeyError:
        raise ModelParameterError("protocol", f"unknown protocol '{protocol}'") from None
    return model(params)


class ModelGrid(BaseModel):
    """
    Parameter grid evaluated by ``bbpsim model``: every protocol at every n_t, plus a
    fork probability row for each explicit t_l
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    params: AnalyticParams = Field(default_factory=AnalyticParams)
    protocols: list[Protocol] = Field(default_factory=lambda: ["bbp", "lbp", "bhp", "cbp"])
    n_t: list[int] = Field(default_factory=list)
    t_l_ms: list[float] = Field(default_factory=list)


MODEL_COLUMNS = ("protocol", "n_t", "t_l_ms", "tps", "latency_ms", "fork_probability")


def evaluate_grid(grid: ModelGrid) -> list[dict]:
    """
    :param grid: Parameter grid
    :return: Rows keyed by MODEL_COLUMNS; None where a value does not apply
    """
    rows = []
    (t_g,) = grid.params.require("t_g")
    for t_l in grid.t_l_ms:
        rows.append({"protocol": "", "n_t": None, "t_l_ms": t_l, "tps": None, "latency_ms": None,
                     "fork_probability": fork_probability(t_l, t_g)})
    n_values = grid.n_t or [grid.params.require("n_t")[0]]
    for n_t in n_values:
        params = grid.params.model_copy(update={"n_t": n_t})
        for protocol in grid.protocols:
            latency = latency_model(protocol, params)
            rows.append({"protocol": protocol, "n_t": n_t, "t_l_ms": latency, "tps": tps(n_t, t_g),
                         "latency_ms": latency, "fork_probability": fork_probability(latency, t_g)})
    return rows
