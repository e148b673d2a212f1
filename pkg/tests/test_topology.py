import json
from math import factorial

import pytest

from cayley_steiner.perm_core import parity, signed_perm_rank
from cayley_steiner.topology import (
    build_alternating_network,
    build_burnt_pancake,
    build_godan,
    cluster_order,
    cluster_relabel,
    cross_edge_set,
    graph_from_edges,
    graph_json_dict,
    induced_subgraph,
    out_neighbour_bp,
    out_neighbour_ea,
    punctured_bp,
    to_dot,
)
from cayley_steiner.trees import BPContext, EAContext


@pytest.fixture(scope="module")
def bp3():
    return BPContext.get(3)


@pytest.fixture(scope="module")
def bp4():
    return BPContext.get(4)


def test_bp_counts():
    for n in (2, 3):
        g = build_burnt_pancake(n)
        assert g.order == factorial(n) << n
        assert g.edge_count == n * factorial(n) * (1 << (n - 1))
        assert all(g.degree(v) == n for v in range(g.order))


def test_bp_domain_error():
    with pytest.raises(ValueError):
        build_burnt_pancake(1)


def test_bp2_is_single_cycle():
    # 2-regular and connected forces one cycle; walk it explicitly
    g = build_burnt_pancake(2)
    assert g.order == 8 and g.edge_count == 8
    prev, cur = None, 0
    length = 0
    while True:
        nxt = [w for w in g.adj[cur] if w != prev]
        assert len(nxt) == (1 if prev is not None else 2)
        prev, cur = cur, nxt[0]
        length += 1
        if cur == 0:
            break
    assert length == 8


def test_cluster_decomposition(bp3):
    dec = bp3.dec
    assert len(dec.ids) == 6
    assert all(len(dec.members[j]) == 8 for j in dec.ids)
    assert dec.cluster_of[bp3.graph.index_of((1, 2, 3))] == 3
    assert dec.cluster_of[bp3.graph.index_of((-3, -2, -1))] == -1
    # partition
    assert sorted(v for j in dec.ids for v in dec.members[j]) == list(range(48))


def test_out_neighbour_bp(bp3):
    assert out_neighbour_bp((1, 2, 3)) == (-3, -2, -1)
    assert out_neighbour_bp(out_neighbour_bp((2, -3, 1))) == (2, -3, 1)
    # exhaustive over BP3: exactly one neighbour leaves the cluster
    g, dec = bp3.graph, bp3.dec
    for v in range(g.order):
        outs = [w for w in g.adj[v] if dec.cluster_of[w] != dec.cluster_of[v]]
        assert len(outs) == 1
        assert outs[0] == bp3.out_idx[v]
        assert dec.cluster_of[outs[0]] == -g.labels[v][0]


@pytest.mark.parametrize("n", [2, 3])
def test_out_neighbour_spread_small(n):
    # out-neighbours of a closed within-cluster neighbourhood reach n
    # distinct clusters, never the home cluster
    ctx = BPContext.get(n)
    g, dec = ctx.graph, ctx.dec
    for v in range(g.order):
        home = dec.cluster_of[v]
        hood = [v] + [w for w in g.adj[v] if dec.cluster_of[w] == home]
        clusters = {dec.cluster_of[ctx.out_idx[u]] for u in hood}
        assert len(clusters) == n
        assert home not in clusters


def test_cross_edge_counts(bp3, bp4):
    assert len(cross_edge_set(bp3.graph, bp3.dec, 1, 2)) == 2
    assert len(cross_edge_set(bp3.graph, bp3.dec, 1, -1)) == 0
    assert len(cross_edge_set(bp4.graph, bp4.dec, 2, 3)) == 8
    with pytest.raises(ValueError):
        cross_edge_set(bp3.graph, bp3.dec, 2, 2)


def test_cluster_relabel_examples():
    assert cluster_relabel((1, 2, 3)) == (1, 2)
    assert cluster_relabel((-3, 1, 2)) == (-2, 1)


def test_cluster_relabel_is_isomorphism(bp3):
    # edge-for-edge comparison of every BP3 cluster against BP2
    g2 = build_burnt_pancake(2)
    small_edges = set(g2.edges())
    for j in bp3.dec.ids:
        mapped = set()
        members = set(bp3.members[j])
        for v in bp3.members[j]:
            sv = signed_perm_rank(cluster_relabel(bp3.graph.labels[v]))
            for w in bp3.graph.adj[v]:
                if w in members:
                    sw = signed_perm_rank(cluster_relabel(bp3.graph.labels[w]))
                    mapped.add((sv, sw) if sv < sw else (sw, sv))
        assert mapped == small_edges


def test_punctured_bp(bp3):
    sub = punctured_bp(3, -3, bp3.graph, bp3.dec)
    assert sub.order == 40
    # BP2 minus a cluster is a path on 6 vertices: degree census by BFS
    sub2 = punctured_bp(2, 1)
    assert sub2.order == 6
    degs = sorted(sub2.degree(v) for v in range(6))
    assert degs == [1, 1, 2, 2, 2, 2]


def test_an_counts():
    g = build_alternating_network(3)
    assert g.order == 3 and g.edge_count == 3  # a triangle
    g4 = build_alternating_network(4)
    assert g4.order == 12 and g4.edge_count == 18
    assert all(g4.degree(v) == 3 for v in range(12))
    with pytest.raises(ValueError):
        build_alternating_network(2)


def test_ea_counts():
    g = build_godan(3)
    assert g.order == 6 and g.edge_count == 9
    g4 = build_godan(4)
    assert g4.order == 24 and g4.edge_count == 48
    with pytest.raises(ValueError):
        build_godan(2)


def test_out_neighbour_ea():
    assert out_neighbour_ea((1, 2, 3, 4)) == (2, 1, 3, 4)
    u = (3, 1, 4, 2)
    assert out_neighbour_ea(out_neighbour_ea(u)) == u
    assert parity(out_neighbour_ea(u)) != parity(u)


def test_ea_matching_exhaustive():
    # cross edges found by scanning adjacency equal the matching formula
    ctx = EAContext.get(4)
    g, dec = ctx.graph, ctx.dec
    scanned = {
        (u, w) for u, w in g.edges() if dec.cluster_of[u] != dec.cluster_of[w]
    }
    formula = {tuple(sorted((v, ctx.out_idx[v]))) for v in dec.members[1]}
    assert scanned == formula
    assert len(scanned) == g.order // 2


def test_induced_subgraph_monotone(bp3):
    keep = bp3.members[1]
    sub, old = induced_subgraph(bp3.graph, keep)
    assert old == keep
    assert sub.order == 8
    assert all(sub.degree(v) == 2 for v in range(8))


def test_graph_from_edges_and_errors():
    g = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert g.edge_count == 4
    with pytest.raises(ValueError):
        graph_from_edges(2, [(0, 0)])


def test_json_and_dot_stable(bp3):
    d1 = json.dumps(graph_json_dict(bp3.graph), sort_keys=True)
    d2 = json.dumps(graph_json_dict(bp3.graph), sort_keys=True)
    assert d1 == d2
    payload = graph_json_dict(bp3.graph)
    assert payload["order"] == 48
    assert len(payload["edges"]) == 72
    assert payload["labels"][0] == "1,2,3"
    dot = to_dot(bp3.graph, bp3.dec)
    assert dot.count(" -- ") == 72
    assert dot == to_dot(bp3.graph, bp3.dec)


def test_cluster_order():
    assert cluster_order(3) == (1, -1, 2, -2, 3, -3)
