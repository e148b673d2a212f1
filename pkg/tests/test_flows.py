import itertools
import random
from collections import deque

import pytest

from cayley_steiner.flows import (
    FlowInfeasible,
    available_backends,
    disjoint_linkage,
    fan,
    internally_disjoint_paths,
    local_connectivity,
    use_flow_backend,
    vertex_connectivity,
)
from cayley_steiner.topology import (
    build_alternating_network,
    graph_from_edges,
    punctured_bp,
)
from cayley_steiner.trees import BPContext, EAContext


def brute_force_kappa(graph):
    """Minimum size of a vertex set whose removal disconnects or trivializes
    the graph (subset enumeration; the independent oracle for small cases)."""
    verts = list(range(graph.order))

    def connected_without(removed):
        rest = [v for v in verts if v not in removed]
        if len(rest) <= 1:
            return False  # trivial remainder counts as broken
        seen = {rest[0]}
        queue = deque((rest[0],))
        while queue:
            u = queue.popleft()
            for w in graph.adj[u]:
                if w not in removed and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(rest)

    for k in range(graph.order):
        for removed in itertools.combinations(verts, k):
            if not connected_without(set(removed)):
                return k
    return graph.order - 1


@pytest.fixture(scope="module")
def bp2():
    return BPContext.get(2).graph


@pytest.fixture(scope="module")
def bp3():
    return BPContext.get(3).graph


def test_cycle_two_arcs(bp2):
    ps = internally_disjoint_paths(bp2, 0, 5, 2)
    ps.validate(bp2)
    assert len(ps.paths) == 2
    # the two arcs of the cycle partition the remaining vertices
    interior = set(ps.paths[0][1:-1]) | set(ps.paths[1][1:-1])
    assert interior == set(range(8)) - {0, 5}


def test_cycle_three_infeasible(bp2):
    with pytest.raises(FlowInfeasible) as exc:
        internally_disjoint_paths(bp2, 0, 5, 3)
    assert exc.value.found == 2
    assert len(exc.value.cut) == 2


def test_bp3_three_paths_everywhere(bp3):
    rng = random.Random(5)
    pairs = {tuple(sorted(rng.sample(range(48), 2))) for _ in range(25)}
    for x, y in pairs:
        ps = internally_disjoint_paths(bp3, x, y, 3)
        ps.validate(bp3)
        assert len(ps.paths) == 3


def test_bp3_four_paths_fail_with_real_cut(bp3):
    rng = random.Random(7)
    for _ in range(5):
        x, y = rng.sample(range(48), 2)
        if y in bp3.adj[x]:
            continue
        with pytest.raises(FlowInfeasible) as exc:
            internally_disjoint_paths(bp3, x, y, 4)
        cut = set(exc.value.cut)
        assert len(cut) == 3
        # independent check: removing the named cut separates x from y
        seen = {x}
        queue = deque((x,))
        while queue:
            u = queue.popleft()
            for w in bp3.adj[u]:
                if w not in cut and w not in seen:
                    seen.add(w)
                    queue.append(w)
        assert y not in seen


def test_vertex_connectivity_families(bp3):
    assert vertex_connectivity(bp3) == 3
    assert vertex_connectivity(build_alternating_network(4)) == 3
    assert vertex_connectivity(EAContext.get(4).graph) == 4


def test_vertex_connectivity_brute_force_small(bp2):
    an3 = build_alternating_network(3)
    ea3 = EAContext.get(3).graph
    for g in (bp2, an3, ea3):
        assert vertex_connectivity(g) == brute_force_kappa(g)


def test_vertex_connectivity_bp3_brute_force(bp3):
    # no cut of size <= 2 disconnects BP3, and a neighbourhood is a 3-cut
    def connected_without(removed):
        rest = [v for v in range(48) if v not in removed]
        seen = {rest[0]}
        queue = deque((rest[0],))
        while queue:
            u = queue.popleft()
            for w in bp3.adj[u]:
                if w not in removed and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(rest)

    for k in (1, 2):
        for removed in itertools.combinations(range(48), k):
            assert connected_without(set(removed))
    assert not connected_without(set(bp3.adj[0]))
    assert vertex_connectivity(bp3) == 3


def test_local_connectivity_not_below_kappa(bp3):
    rng = random.Random(3)
    for _ in range(10):
        x, y = rng.sample(range(48), 2)
        assert local_connectivity(bp3, x, y) >= 3


def test_vertex_connectivity_degenerate():
    # disconnected input and complete-graph convention
    two = graph_from_edges(2, [(0, 1)])
    assert vertex_connectivity(two) == 1
    disc = graph_from_edges(4, [(0, 1), (2, 3)])
    assert vertex_connectivity(disc) == 0
    k4 = graph_from_edges(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert vertex_connectivity(k4) == 3


def test_trivial_fan(bp3):
    x = 0
    targets = list(bp3.adj[x])
    fs = fan(bp3, x, targets, len(targets))
    fs.validate(bp3)
    assert sorted(p[-1] for p in fs.paths) == targets
    assert all(len(p) == 2 for p in fs.paths)


def test_fan_bp3_any_targets(bp3):
    rng = random.Random(11)
    for _ in range(10):
        x = rng.randrange(48)
        targets = rng.sample([v for v in range(48) if v != x], 3)
        fs = fan(bp3, x, targets, 3)
        fs.validate(bp3)


def test_fan_in_punctured_bp4():
    sub = punctured_bp(4, -4)
    rng = random.Random(13)
    x = rng.randrange(sub.order)
    targets = rng.sample([v for v in range(sub.order) if v != x], 3)
    fs = fan(sub, x, targets, 3)
    fs.validate(sub)


def test_fan_domain_errors(bp3):
    with pytest.raises(ValueError):
        fan(bp3, 0, [0, 1, 2], 2)  # source inside targets
    with pytest.raises(ValueError):
        fan(bp3, 0, [1, 2], 3)  # k > |targets|


def test_fan_fails_past_cut_vertex():
    star = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(FlowInfeasible) as exc:
        fan(star, 1, [2, 3], 2)
    assert exc.value.found == 1
    assert exc.value.cut == (0,)


def test_linkage_degenerate_overlap(bp3):
    ps = disjoint_linkage(bp3, [0, 1, 2], [2, 30], 2)
    ps.validate(bp3)
    assert (2,) in ps.paths


def test_linkage_inside_cluster(bp3):
    # a BP3 cluster is an 8-cycle with connectivity 2: two disjoint paths
    ctx = BPContext.get(3)
    members = ctx.members[2]
    X = list(members[:2])
    Y = list(members[-2:])
    ps = disjoint_linkage(bp3, X, Y, 2, allowed=ctx.member_sets[2])
    ps.validate(bp3, allowed=ctx.member_sets[2])
    assert len(ps.paths) == 2


def test_linkage_fails_on_star():
    star = graph_from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    with pytest.raises(FlowInfeasible):
        disjoint_linkage(star, [1, 2], [3, 4], 2)


def test_paths_deterministic(bp3):
    a = internally_disjoint_paths(bp3, 0, 30, 3)
    b = internally_disjoint_paths(bp3, 0, 30, 3)
    assert a == b


@pytest.mark.skipif(len(available_backends()) < 2, reason="compiled kernel not built")
def test_backend_parity(bp3):
    cases = [(0, 30, 3), (5, 17, 3), (2, 40, 2)]
    results = {}
    for name in available_backends():
        with use_flow_backend(name):
            results[name] = [
                (vertex_connectivity(bp3), internally_disjoint_paths(bp3, x, y, k))
                for x, y, k in cases
            ]
    names = list(results)
    assert results[names[0]] == results[names[1]]
