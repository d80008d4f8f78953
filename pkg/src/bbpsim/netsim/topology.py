#! /usr/bin/env python3
"""
Overlay topology: power-law graph with small-world clustering, continent groups
and per-link latency drawn from the group-pair range
Date: Mar 9, 2025
"""
# Standard Library Imports
import logging
from dataclasses import dataclass

# Third Party Imports
import networkx as nx
import numpy as np

# Local Imports
from bbpsim.errors import SimulationError
from bbpsim.netsim.link import Link
from bbpsim.netsim.scenario import GROUPS, LinkConfig, TopologyConfig

logger = logging.getLogger(__name__)

# ms, keyed by unordered group pair; a pair missing here is intra-group
LATENCY_RANGES = {
    frozenset(("Asia", "Oceania")): (40.0, 60.0),
    frozenset(("Oceania", "NorthAmerica")): (40.0, 60.0),
    frozenset(("NorthAmerica", "Europe")): (40.0, 60.0),
    frozenset(("Asia", "NorthAmerica")): (60.0, 90.0),
    frozenset(("Oceania", "Europe")): (60.0, 90.0),
    frozenset(("Asia", "Europe")): (90.0, 110.0),
}
INTRA_GROUP_RANGE = (10.0, 40.0)


def latency_range(group_a: str, group_b: str) -> tuple[float, float]:
    if group_a == group_b:
        return INTRA_GROUP_RANGE
    return LATENCY_RANGES[frozenset((group_a, group_b))]


@dataclass(frozen=True)
class Topology:
    graph: nx.Graph
    groups: tuple[str, ...]
    links: dict[tuple[int, int], Link]

    @property
    def n_nodes(self) -> int:
        return self.graph.number_of_nodes()

    def neighbors(self, node: int) -> tuple[int, ...]:
        return tuple(sorted(self.graph.neighbors(node)))

    def link(self, a: int, b: int) -> Link:
        return self.links[(a, b) if a < b else (b, a)]

    def degree(self, node: int) -> int:
        return self.graph.degree(node)

    def mean_latency_ms(self) -> float:
        return float(np.mean([link.latency_ms for link in self.links.values()]))

    def path_delays(self, n_bytes: int) -> dict[int, dict[int, float]]:
        """
        Loss-free shortest-path delay in ms between every pair of nodes for a message
        of n_bytes relayed hop by hop
        """
        def weight(a, b, _):
            return self.link(a, b).transfer_ms(n_bytes)
        return {source: dict(lengths) for source, lengths in nx.all_pairs_dijkstra_path_length(self.graph, weight=weight)}


def _connected_graph(cfg: TopologyConfig, rng: np.random.Generator) -> nx.Graph:
    for attempt in range(cfg.max_retries):
        sub_seed = int(rng.integers(0, 2 ** 31 - 1))
        graph = nx.powerlaw_cluster_graph(cfg.n_nodes, cfg.attach_m, cfg.triad_p, seed=sub_seed)
        if nx.is_connected(graph):
            return graph
        logger.debug("topology attempt %d disconnected, regenerating", attempt)
    raise SimulationError(f"no connected topology after {cfg.max_retries} attempts")


def generate_topology(cfg: TopologyConfig, link_cfg: LinkConfig, rng: np.random.Generator) -> Topology:
    """
    Build the overlay network
    :param cfg: Topology settings (node count, attachment, clustering, group weights)
    :param link_cfg: Bandwidth and loss settings
    :param rng: The topology stream
    :return: Topology
    """
    graph = _connected_graph(cfg, rng)
    names = [g for g in GROUPS if cfg.group_weights.get(g, 0) > 0]
    weights = np.array([cfg.group_weights[g] for g in names])
    groups = tuple(names[i] for i in rng.choice(len(names), size=cfg.n_nodes, p=weights / weights.sum()))

    links = {}
    for a, b in sorted(tuple(sorted(edge)) for edge in graph.edges()):
        low, high = latency_range(groups[a], groups[b])
        links[(a, b)] = Link(
            latency_ms=float(rng.uniform(low, high)),
            bandwidth_bps=link_cfg.bandwidth_bps,
            loss_prob=float(rng.uniform(link_cfg.loss_min, link_cfg.loss_max)),
            retransmit_multiplier=link_cfg.retransmit_multiplier,
        )
    logger.debug("topology: %d nodes, %d links", cfg.n_nodes, len(links))
    return Topology(graph=graph, groups=groups, links=links)
