"""Directed networks with typed links: data model, CSV I/O, metrics.

Edge-list CSV format: header ``source,target,link_type``, one edge per
row. Optional node-params CSV: header ``node,relay_probability,tendency``.
Untyped edge lists carry only ``source,target``. All files are UTF-8,
comma-separated, LF-terminated.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx
import numpy as np

from .belief import Frame

# Node-parameter defaults for files that do not carry them: every node
# relays, and its forwarding tendency is drawn once from this range
# under the load-time seed.
DEFAULT_RELAY_PROBABILITY = 1.0
TENDENCY_RANGE = (0.5, 1.0)

EDGE_HEADER = ["source", "target", "link_type"]
UNTYPED_HEADER = ["source", "target"]
PARAMS_HEADER = ["node", "relay_probability", "tendency"]


@dataclass(frozen=True)
class NodeParams:
    """Per-node propagation parameters."""

    relay_probability: float = DEFAULT_RELAY_PROBABILITY
    tendency: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.relay_probability <= 1.0:
            raise ValueError(f"relay_probability {self.relay_probability} outside [0, 1]")
        if not 0.0 <= self.tendency <= 1.0:
            raise ValueError(f"tendency {self.tendency} outside [0, 1]")


class Edge(NamedTuple):
    source: int
    target: int
    link_type: str


class HeteroNetwork:
    """Directed network whose every edge carries one link type.

    Immutable after construction; safe to share across workers. Parallel
    edges of different types between the same node pair are allowed,
    duplicate (source, target, type) triples are not.
    """

    def __init__(
        self,
        frame: Frame,
        nodes: Mapping[int, NodeParams],
        edges: Iterable[Edge],
    ):
        self._frame = frame
        self._params = dict(nodes)
        edge_list = []
        seen = set()
        out: dict[int, dict[str, list[int]]] = {node: {} for node in self._params}
        degree = {node: 0 for node in self._params}
        for edge in edges:
            edge = Edge(int(edge[0]), int(edge[1]), edge[2])
            if edge.source not in self._params or edge.target not in self._params:
                raise ValueError(f"edge {edge} has an endpoint outside the node set")
            if edge.link_type not in frame:
                raise ValueError(f"edge {edge} has unknown link type {edge.link_type!r}")
            if edge in seen:
                raise ValueError(f"duplicate edge {edge}")
            seen.add(edge)
            edge_list.append(edge)
            out[edge.source].setdefault(edge.link_type, []).append(edge.target)
            degree[edge.source] += 1
        for adjacency in out.values():
            for targets in adjacency.values():
                targets.sort()
        self._edges = tuple(edge_list)
        self._out = out
        self._degree = degree

    @property
    def frame(self) -> Frame:
        return self._frame

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def node_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._params))

    @property
    def node_count(self) -> int:
        return len(self._params)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def __contains__(self, node: int) -> bool:
        return node in self._params

    def params(self, node: int) -> NodeParams:
        self._check_node(node)
        return self._params[node]

    def out_degree(self, node: int) -> int:
        """Total out-degree across all link types."""
        self._check_node(node)
        return self._degree[node]

    def out_neighbors(self, node: int, link_type: str) -> tuple[int, ...]:
        """Targets of (node -> .) edges of the given type, ascending."""
        self._check_node(node)
        if link_type not in self._frame:
            raise ValueError(f"unknown link type {link_type!r}")
        return tuple(self._out[node].get(link_type, ()))

    def _check_node(self, node: int) -> None:
        if node not in self._params:
            raise ValueError(f"unknown node {node}")


def _default_params(nodes: Sequence[int], seed: int) -> dict[int, NodeParams]:
    """Default parameters: relay 1.0, tendency ~ U[0.5, 1.0] under ``seed``."""
    rng = random.Random(seed)
    lo, hi = TENDENCY_RANGE
    return {
        node: NodeParams(DEFAULT_RELAY_PROBABILITY, rng.uniform(lo, hi))
        for node in sorted(nodes)
    }


def _read_rows(path, expected_header: list[str]) -> list[tuple[int, list[str]]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        return []
    header_line, header = rows[0]
    if [h.strip() for h in header] != expected_header:
        raise ValueError(
            f"{path}: line {header_line}: expected header {','.join(expected_header)!r}"
        )
    return rows[1:]


def load_node_params(path) -> dict[int, NodeParams]:
    """Read a node-params CSV (header ``node,relay_probability,tendency``)."""
    params = {}
    for lineno, row in _read_rows(path, PARAMS_HEADER):
        if len(row) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
        try:
            node = int(row[0])
            relay = float(row[1])
            tendency = float(row[2])
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
        try:
            params[node] = NodeParams(relay, tendency)
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return params


def load_edge_list(
    path,
    frame: Frame,
    params_path=None,
    params_seed: int = 0,
) -> HeteroNetwork:
    """Read a typed edge-list CSV into a network.

    Node parameters come from ``params_path`` when given; nodes not
    covered there get the defaults (tendency drawn under ``params_seed``).
    """
    edges = []
    nodes: set[int] = set()
    for lineno, row in _read_rows(path, EDGE_HEADER):
        if len(row) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
        try:
            source, target = int(row[0]), int(row[1])
        except ValueError:
            raise ValueError(
                f"{path}: line {lineno}: node ids must be integers, got {row[:2]}"
            ) from None
        link_type = row[2].strip()
        if link_type not in frame:
            raise ValueError(f"{path}: line {lineno}: unknown link type {link_type!r}")
        edges.append(Edge(source, target, link_type))
        nodes.add(source)
        nodes.add(target)
    overrides = load_node_params(params_path) if params_path else {}
    nodes.update(overrides)
    params = _default_params(sorted(nodes), params_seed)
    params.update(overrides)
    return HeteroNetwork(frame, params, edges)


def save_edge_list(net: HeteroNetwork, path) -> None:
    """Write the typed edge list, rows sorted for deterministic output."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(EDGE_HEADER)
        for edge in sorted(net.edges):
            writer.writerow([edge.source, edge.target, edge.link_type])


def save_node_params(net: HeteroNetwork, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(PARAMS_HEADER)
        for node in net.node_ids():
            p = net.params(node)
            writer.writerow([node, repr(p.relay_probability), repr(p.tendency)])


def load_untyped_edge_list(path) -> list[tuple[int, int]]:
    """Read an untyped edge list (header ``source,target``)."""
    pairs = []
    for lineno, row in _read_rows(path, UNTYPED_HEADER):
        if len(row) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
        try:
            pairs.append((int(row[0]), int(row[1])))
        except ValueError:
            raise ValueError(
                f"{path}: line {lineno}: node ids must be integers, got {row}"
            ) from None
    return pairs


def assign_random_link_types(
    pairs: Sequence[tuple[int, int]],
    frame: Frame,
    weights: Sequence[float] | None = None,
    seed: int = 0,
) -> HeteroNetwork:
    """Type each untyped edge independently with probability ∝ ``weights``.

    The same seed always yields the same typed network; node parameters
    are drawn from the same stream.
    """
    if weights is None:
        weights = [1.0] * len(frame)
    weights = [float(w) for w in weights]
    if len(weights) != len(frame):
        raise ValueError("one weight per frame element required")
    if any(w < 0 for w in weights) or not any(weights):
        raise ValueError("weights must be nonnegative and not all zero")
    rng = random.Random(seed)
    types = rng.choices(frame.elements, weights=weights, k=len(pairs))
    edges = [Edge(s, t, lt) for (s, t), lt in zip(pairs, types)]
    nodes = sorted({n for pair in pairs for n in pair})
    lo, hi = TENDENCY_RANGE
    params = {
        node: NodeParams(DEFAULT_RELAY_PROBABILITY, rng.uniform(lo, hi))
        for node in nodes
    }
    return HeteroNetwork(frame, params, edges)


def generate_synthetic_network(
    frame: Frame,
    node_count: int,
    edge_count: int,
    seed: int = 0,
    weights: Sequence[float] | None = None,
    active_count: int | None = None,
    core_bias: float = 0.65,
) -> HeteroNetwork:
    """Random directed broadcaster-core graph with typed edges.

    A core of ``active_count`` broadcaster nodes (default: 30% of the
    network) holds all out-edges -- mirroring collected micro-blog data,
    where a minority of accounts does the posting while everyone can be
    reached. Targets fall inside the core with probability ``core_bias``
    (keeping multi-hop spread alive) and are uniform otherwise. Every
    node is covered by at least one edge when the budget allows, so the
    network survives edge-list round-trips intact. No self-loops or
    repeated (source, target) pairs; types and node parameters come from
    the same seeded stream, so one seed pins the whole network.
    """
    if node_count < 2:
        raise ValueError("need at least two nodes")
    if active_count is None:
        active_count = max(2, round(0.3 * node_count))
    if not 2 <= active_count <= node_count:
        raise ValueError(f"active_count must be in [2, {node_count}]")
    if not 0.0 <= core_bias <= 1.0:
        raise ValueError("core_bias must lie in [0, 1]")
    max_edges = active_count * (node_count - 1)
    if not 0 <= edge_count <= max_edges:
        raise ValueError(f"edge_count must be in [0, {max_edges}]")
    if weights is None:
        weights = [1.0] * len(frame)
    weights = [float(w) for w in weights]
    if len(weights) != len(frame) or any(w < 0 for w in weights) or not any(weights):
        raise ValueError("weights must be nonnegative, not all zero, one per type")
    rng = random.Random(seed)
    ids = list(range(node_count))
    rng.shuffle(ids)
    core = ids[:active_count]
    passive = ids[active_count:]
    pairs: set[tuple[int, int]] = set()

    def draw_target(source: int) -> int:
        while True:
            if rng.random() < core_bias:
                target = rng.choice(core)
            else:
                target = rng.randrange(node_count)
            if target != source:
                return target

    # coverage first, so no node ends up isolated: one out-edge per core
    # node, one in-edge per passive node (when the budget allows)
    for source in core:
        if len(pairs) >= edge_count:
            break
        target = draw_target(source)
        while (source, target) in pairs:
            target = draw_target(source)
        pairs.add((source, target))
    covered = {t for _, t in pairs}
    for target in passive:
        if len(pairs) >= edge_count:
            break
        if target in covered:
            continue
        source = rng.choice(core)
        while (source, target) in pairs:
            source = rng.choice(core)
        pairs.add((source, target))
    while len(pairs) < edge_count:
        source = rng.choice(core)
        target = draw_target(source)
        pairs.add((source, target))
    ordered = sorted(pairs)
    types = rng.choices(frame.elements, weights=weights, k=len(ordered))
    edges = [Edge(s, t, lt) for (s, t), lt in zip(ordered, types)]
    lo, hi = TENDENCY_RANGE
    params = {
        node: NodeParams(DEFAULT_RELAY_PROBABILITY, rng.uniform(lo, hi))
        for node in range(node_count)
    }
    return HeteroNetwork(frame, params, edges)


@dataclass(frozen=True)
class NetworkMetrics:
    vertex_count: int
    edge_count: int
    max_geodesic: int
    mean_betweenness: float
    mean_closeness: float
    mean_eigenvector: float

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "max_geodesic": self.max_geodesic,
            "mean_betweenness": self.mean_betweenness,
            "mean_closeness": self.mean_closeness,
            "mean_eigenvector": self.mean_eigenvector,
        }


def _simple_digraph(net: HeteroNetwork) -> nx.DiGraph:
    """Underlying simple directed graph: link types ignored, parallels collapsed."""
    graph = nx.DiGraph()
    graph.add_nodes_from(net.node_ids())
    graph.add_edges_from((e.source, e.target) for e in net.edges)
    return graph


def eigenvector_centrality(
    graph: nx.DiGraph, tol: float = 1e-10, max_iter: int = 500_000
) -> dict[int, float]:
    """In-edge eigenvector centrality, normalized to unit maximum.

    Power iteration on (I + A^T); the identity shift keeps the iteration
    convergent on periodic and acyclic graphs without changing the
    dominant eigenvector where one exists.
    """
    order = sorted(graph.nodes)
    n = len(order)
    index = {node: i for i, node in enumerate(order)}
    matrix = np.eye(n)
    for u, v in graph.edges:
        matrix[index[v], index[u]] += 1.0
    x = np.ones(n)
    for _ in range(max_iter):
        nxt = matrix @ x
        nxt /= nxt.max()
        if np.max(np.abs(nxt - x)) < tol:
            return {node: float(nxt[index[node]]) for node in order}
        x = nxt
    raise ValueError("eigenvector power iteration failed to converge")


def compute_metrics(net: HeteroNetwork) -> NetworkMetrics:
    """Structural metrics of the underlying directed simple graph.

    * max_geodesic: maximum finite shortest-path length over ordered pairs.
    * mean_betweenness: mean unnormalized shortest-path betweenness.
    * mean_closeness: mean harmonic closeness over outgoing distances,
      sum of 1/d over reachable targets divided by n-1 (well-defined on
      disconnected graphs).
    * mean_eigenvector: mean of the unit-max dominant eigenvector values.
    """
    if net.node_count == 0:
        raise ValueError("metrics are undefined on an empty network")
    graph = _simple_digraph(net)
    n = graph.number_of_nodes()
    max_geodesic = 0
    closeness_total = 0.0
    for node in graph.nodes:
        lengths = nx.single_source_shortest_path_length(graph, node)
        reachable = [d for other, d in lengths.items() if other != node]
        if reachable:
            max_geodesic = max(max_geodesic, max(reachable))
            if n > 1:
                closeness_total += sum(1.0 / d for d in reachable) / (n - 1)
    betweenness = nx.betweenness_centrality(graph, normalized=False)
    eigen = eigenvector_centrality(graph)
    return NetworkMetrics(
        vertex_count=net.node_count,
        edge_count=net.edge_count,
        max_geodesic=max_geodesic,
        mean_betweenness=sum(betweenness.values()) / n,
        mean_closeness=closeness_total / n,
        mean_eigenvector=sum(eigen.values()) / n,
    )
