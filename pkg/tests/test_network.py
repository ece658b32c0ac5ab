"""Network model, CSV I/O, and metrics tests (with a brute-force oracle)."""

import math
import random
from collections import Counter

import numpy as np
import pytest

from _oracles import metrics_oracle, random_strongly_connected
from evispread.belief import Frame
from evispread.network import (
    Edge,
    HeteroNetwork,
    NodeParams,
    assign_random_link_types,
    compute_metrics,
    generate_synthetic_network,
    load_edge_list,
    load_node_params,
    load_untyped_edge_list,
    save_edge_list,
    save_node_params,
)

FRAME = Frame(("Professional", "Familial", "Friendly", "Undefined"))


def single_type_net(pairs, n=None):
    frame = Frame(("t",))
    nodes = n if n is not None else 1 + max(max(p) for p in pairs)
    params = {i: NodeParams(1.0, 1.0) for i in range(nodes)}
    return HeteroNetwork(frame, params, [Edge(s, t, "t") for s, t in pairs])


# ------------------------------------------------------------ data model

def test_network_basic_invariants():
    net = single_type_net([(0, 1), (1, 2)])
    assert net.node_count == 3 and net.edge_count == 2
    assert net.out_degree(0) == 1
    assert net.out_neighbors(0, "t") == (1,)
    with pytest.raises(ValueError):
        net.out_neighbors(99, "t")
    with pytest.raises(ValueError):
        net.out_neighbors(0, "bogus")


def test_network_rejects_bad_edges():
    frame = Frame(("t",))
    params = {0: NodeParams(), 1: NodeParams()}
    with pytest.raises(ValueError):
        HeteroNetwork(frame, params, [Edge(0, 7, "t")])
    with pytest.raises(ValueError):
        HeteroNetwork(frame, params, [Edge(0, 1, "nope")])
    with pytest.raises(ValueError):
        HeteroNetwork(frame, params, [Edge(0, 1, "t"), Edge(0, 1, "t")])


def test_parallel_edges_of_different_types_allowed():
    params = {0: NodeParams(), 1: NodeParams()}
    net = HeteroNetwork(FRAME, params, [Edge(0, 1, "Professional"), Edge(0, 1, "Familial")])
    assert net.edge_count == 2


def test_typed_out_neighbors_sorted():
    frame = Frame(("Familial", "Professional"))
    params = {i: NodeParams() for i in (0, 5, 7, 9)}
    edges = [Edge(0, 9, "Familial"), Edge(0, 7, "Professional"), Edge(0, 5, "Familial")]
    net = HeteroNetwork(frame, params, edges)
    assert net.out_neighbors(0, "Familial") == (5, 9)
    assert net.out_neighbors(0, "Professional") == (7,)
    assert net.out_neighbors(5, "Familial") == ()


def test_node_params_range_checks():
    with pytest.raises(ValueError):
        NodeParams(relay_probability=1.5)
    with pytest.raises(ValueError):
        NodeParams(tendency=-0.1)


# ------------------------------------------------------------------- I/O

def test_load_edge_list_roundtrip(tmp_path):
    path = tmp_path / "net.csv"
    path.write_text(
        "source,target,link_type\n0,1,Professional\n1,2,Familial\n", encoding="utf-8"
    )
    net = load_edge_list(path, FRAME, params_seed=3)
    assert net.node_count == 3 and net.edge_count == 2
    out = tmp_path / "roundtrip.csv"
    save_edge_list(net, out)
    assert out.read_text(encoding="utf-8") == path.read_text(encoding="utf-8")
    # same params seed -> identical params on reload
    again = load_edge_list(out, FRAME, params_seed=3)
    assert all(again.params(n) == net.params(n) for n in net.node_ids())


def test_load_edge_list_errors(tmp_path):
    bad_type = tmp_path / "bad.csv"
    bad_type.write_text("source,target,link_type\n0,1,Work\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        load_edge_list(bad_type, FRAME)
    bad_id = tmp_path / "badid.csv"
    bad_id.write_text("source,target,link_type\nx,1,Familial\n", encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        load_edge_list(bad_id, FRAME)
    bad_header = tmp_path / "hdr.csv"
    bad_header.write_text("a,b,c\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        load_edge_list(bad_header, FRAME)


def test_load_empty_file_gives_empty_network(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    net = load_edge_list(empty, FRAME)
    assert net.node_count == 0 and net.edge_count == 0
    header_only = tmp_path / "header.csv"
    header_only.write_text("source,target,link_type\n", encoding="utf-8")
    net2 = load_edge_list(header_only, FRAME)
    assert net2.node_count == 0 and net2.edge_count == 0


def test_node_params_file_roundtrip(tmp_path):
    net = generate_synthetic_network(FRAME, 10, 20, seed=4)
    params_path = tmp_path / "params.csv"
    save_node_params(net, params_path)
    loaded = load_node_params(params_path)
    assert all(loaded[n] == net.params(n) for n in net.node_ids())
    # node-params override beats the seed-drawn default
    edge_path = tmp_path / "net.csv"
    save_edge_list(net, edge_path)
    net2 = load_edge_list(edge_path, FRAME, params_path=params_path, params_seed=999)
    assert all(net2.params(n) == net.params(n) for n in net.node_ids())


def test_untyped_edge_list(tmp_path):
    path = tmp_path / "untyped.csv"
    path.write_text("source,target\n0,1\n1,2\n", encoding="utf-8")
    assert load_untyped_edge_list(path) == [(0, 1), (1, 2)]


# ---------------------------------------------------- random link typing

def test_assign_degenerate_weights():
    pairs = [(0, 1), (1, 2), (2, 3)]
    net = assign_random_link_types(pairs, FRAME, weights=(1, 0, 0, 0), seed=9)
    assert all(e.link_type == "Professional" for e in net.edges)


def test_assign_partitions_and_determinism():
    pairs = [(i, (i + 1) % 30) for i in range(30)] + [(i, (i + 7) % 30) for i in range(30)]
    net1 = assign_random_link_types(pairs, FRAME, seed=5)
    net2 = assign_random_link_types(pairs, FRAME, seed=5)
    assert net1.edges == net2.edges
    counts = Counter(e.link_type for e in net1.edges)
    assert sum(counts.values()) == len(pairs)


def test_assign_rejects_bad_weights():
    with pytest.raises(ValueError):
        assign_random_link_types([(0, 1)], FRAME, weights=(0, 0, 0, 0), seed=1)
    with pytest.raises(ValueError):
        assign_random_link_types([(0, 1)], FRAME, weights=(1, 1), seed=1)


def test_assign_uniform_counts_within_binomial_band():
    # 350 edges, uniform weights: per-type count ~ Binomial(350, 1/4).
    # 99.9% band is mean +/- 3.29 sigma; misses should be ~0.1% of draws.
    pairs = [(i % 97, (i * 7 + 1) % 97) for i in range(350)]
    pairs = list(dict.fromkeys(pairs))[:350]
    mean = len(pairs) / 4
    sigma = math.sqrt(len(pairs) * 0.25 * 0.75)
    lo, hi = mean - 3.29 * sigma, mean + 3.29 * sigma
    draws = inside = 0
    for seed in range(1000):
        net = assign_random_link_types(pairs, FRAME, seed=seed)
        counts = Counter(e.link_type for e in net.edges)
        for label in FRAME:
            draws += 1
            inside += lo <= counts.get(label, 0) <= hi
    assert inside / draws >= 0.995


# ------------------------------------------------------ synthetic network

def test_synthetic_network_shape_and_determinism():
    net1 = generate_synthetic_network(FRAME, 97, 350, seed=0)
    net2 = generate_synthetic_network(FRAME, 97, 350, seed=0)
    assert net1.node_count == 97 and net1.edge_count == 350
    assert net1.edges == net2.edges
    assert all(net1.params(n) == net2.params(n) for n in net1.node_ids())
    distinct = {(e.source, e.target) for e in net1.edges}
    assert len(distinct) == 350
    assert all(s != t for s, t in distinct)


def test_synthetic_network_guards():
    with pytest.raises(ValueError):
        generate_synthetic_network(FRAME, 1, 0)
    with pytest.raises(ValueError):
        generate_synthetic_network(FRAME, 5, 10**6)
    with pytest.raises(ValueError):
        generate_synthetic_network(FRAME, 5, 4, active_count=1)


# ---------------------------------------------------------------- metrics

def test_metrics_three_cycle():
    net = single_type_net([(0, 1), (1, 2), (2, 0)])
    m = compute_metrics(net)
    assert m.max_geodesic == 2
    d, bet, clo, eig = metrics_oracle([(0, 1), (1, 2), (2, 0)], 3)
    assert m.max_geodesic == d
    assert len(set(round(b, 9) for b in bet)) == 1  # all betweenness equal
    assert m.mean_betweenness == pytest.approx(sum(bet) / 3, abs=1e-9)
    assert m.mean_closeness == pytest.approx(sum(clo) / 3, abs=1e-9)
    assert m.mean_eigenvector == pytest.approx(float(np.mean(eig)), abs=1e-9)


def test_metrics_single_edge():
    net = single_type_net([(0, 1)])
    m = compute_metrics(net)
    assert m.max_geodesic == 1
    assert m.mean_betweenness == 0.0
    assert m.mean_closeness == pytest.approx(0.5, abs=1e-9)


def test_metrics_empty_network_rejected():
    net = HeteroNetwork(Frame(("t",)), {}, [])
    with pytest.raises(ValueError):
        compute_metrics(net)


def test_metrics_ignore_link_types():
    # parallel typed edges collapse to one arc for the metric computation
    params = {0: NodeParams(), 1: NodeParams()}
    net = HeteroNetwork(FRAME, params, [Edge(0, 1, "Professional"), Edge(0, 1, "Familial")])
    m = compute_metrics(net)
    assert m.edge_count == 2  # raw count reported
    assert m.max_geodesic == 1


def test_metrics_match_bruteforce_oracle():
    rng = random.Random(77)
    for _ in range(20):
        pairs, n = random_strongly_connected(rng)
        net = single_type_net(pairs, n=n)
        m = compute_metrics(net)
        d, bet, clo, eig = metrics_oracle(pairs, n)
        assert m.max_geodesic == d
        assert m.mean_betweenness == pytest.approx(sum(bet) / n, abs=1e-9)
        assert m.mean_closeness == pytest.approx(sum(clo) / n, abs=1e-9)
        assert m.mean_eigenvector == pytest.approx(float(np.mean(eig)), abs=1e-9)
