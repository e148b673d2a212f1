import itertools
import random

import pytest

from cayley_steiner.topology import build_alternating_network, graph_from_edges
from cayley_steiner.trees import (
    BPContext,
    EAContext,
    PackingInfeasible,
    SearchBudgetExceeded,
    bp_trees,
    bp_trees_same_cluster,
    bp_trees_three_clusters,
    bp_trees_two_clusters,
    ea_trees,
    generic_stree_packing,
    steiner_tree_bfs,
    stree_set_json_dict,
)
from cayley_steiner.verify import check


@pytest.fixture(scope="module")
def bp3():
    return BPContext.get(3)


@pytest.fixture(scope="module")
def bp4():
    return BPContext.get(4)


@pytest.fixture(scope="module")
def ea4():
    return EAContext.get(4)


def assert_valid(ctx, sts, expected_count):
    assert len(sts.trees) == expected_count
    result = check(ctx.graph, sts)
    assert result.ok, result.reason


def test_bp2_single_tree():
    ctx = BPContext.get(2)
    for S in [(0, 3, 5), (1, 2, 7)]:
        sts = bp_trees(2, S, context=ctx)
        assert sts.case == "base-cycle"
        assert_valid(ctx, sts, 1)


def test_bp_trees_accepts_labels(bp3):
    sts = bp_trees(3, [(1, 2, 3), (2, 1, 3), (-1, 2, 3)], context=bp3)
    assert sts.case == "same-cluster"
    assert_valid(bp3, sts, 2)


def test_bp_trees_rejects_duplicates(bp3):
    with pytest.raises(ValueError):
        bp_trees(3, [0, 0, 5], context=bp3)


def test_bp3_same_cluster(bp3):
    S = bp3.members[1][:3]
    sts = bp_trees_same_cluster(3, S, context=bp3)
    assert sts.case == "same-cluster"
    assert_valid(bp3, sts, 2)
    # the outside tree stays clear of the home cluster except at S
    home = set(bp3.members[1])
    outer = sts.trees[-1]
    outside_vertices = {v for e in outer for v in e} - set(S)
    assert not (outside_vertices & home)
    # the recursive tree stays inside the cluster
    inner_vertices = {v for e in sts.trees[0] for v in e}
    assert inner_vertices <= home
    with pytest.raises(ValueError):
        bp_trees_same_cluster(3, (0, 1, 30), context=bp3)


def test_bp3_two_clusters(bp3):
    S = (bp3.members[1][0], bp3.members[1][1], bp3.members[2][0])
    sts = bp_trees_two_clusters(3, S, context=bp3)
    assert sts.case == "two-clusters"
    assert_valid(bp3, sts, 2)
    with pytest.raises(ValueError):
        bp_trees_two_clusters(3, bp3.members[1][:3], context=bp3)


def test_bp3_two_clusters_degenerate_target(bp3):
    # find a triple where the third vertex is the out-neighbour of a
    # neighbour of x, forcing a zero-length fan path
    g, dec = bp3.graph, bp3.dec
    hit = None
    for x in range(g.order):
        jx = dec.cluster_of[x]
        for u in g.adj[x]:
            if dec.cluster_of[u] != jx:
                continue
            z = bp3.out_idx[u]
            for y in bp3.members[jx]:
                if y in (x, u):
                    continue
                sts = bp_trees(3, (x, y, z), context=bp3)
                if "zero-length-fan-path" in sts.notes:
                    hit = sts
                    break
            if hit:
                break
        if hit:
            break
    assert hit is not None
    assert hit.case == "two-clusters"
    assert check(g, hit).ok


def test_bp3_three_clusters_all_block_levels(bp3):
    seen = set()
    for S in itertools.combinations(range(16), 3):
        if len({bp3.cluster_of[v] for v in S}) != 3:
            continue
        sts = bp_trees_three_clusters(3, S, context=bp3)
        assert_valid(bp3, sts, 2)
        seen.add(sts.case)
    assert any(c.startswith("three-clusters:blocked-") for c in seen)
    with pytest.raises(ValueError):
        bp_trees_three_clusters(3, bp3.members[1][:3], context=bp3)


def test_bp4_case_labels(bp4):
    # one triple per dispatch route at n=4
    same = bp_trees(4, bp4.members[1][:3], context=bp4)
    assert same.case == "same-cluster"
    assert_valid(bp4, same, 3)

    two = bp_trees(
        4, (bp4.members[1][0], bp4.members[1][1], bp4.members[3][0]), context=bp4
    )
    assert two.case == "two-clusters"
    assert_valid(bp4, two, 3)

    opp = bp_trees(
        4, (bp4.members[1][0], bp4.members[-1][0], bp4.members[2][0]), context=bp4
    )
    assert opp.case == "three-clusters:opposite-pair"
    assert_valid(bp4, opp, 3)

    noopp = bp_trees(
        4, (bp4.members[1][0], bp4.members[2][0], bp4.members[3][0]), context=bp4
    )
    assert noopp.case == "three-clusters:no-opposite-pair"
    assert_valid(bp4, noopp, 3)


def test_bp4_random_sample(bp4):
    rng = random.Random(23)
    for _ in range(40):
        S = tuple(sorted(rng.sample(range(bp4.graph.order), 3)))
        sts = bp_trees(4, S, context=bp4)
        assert_valid(bp4, sts, 3)


def test_bp5_spot_runs():
    ctx = BPContext.get(5)
    three = bp_trees(
        5, (ctx.members[1][0], ctx.members[2][0], ctx.members[3][0]), context=ctx
    )
    assert three.case == "three-clusters:general"
    assert_valid(ctx, three, 4)
    rng = random.Random(31)
    for _ in range(5):
        S = tuple(sorted(rng.sample(range(ctx.graph.order), 3)))
        sts = bp_trees(5, S, context=ctx)
        assert_valid(ctx, sts, 4)


def test_bp_trees_deterministic(bp3):
    S = (0, 17, 33)
    assert bp_trees(3, S, context=bp3) == bp_trees(3, S, context=bp3)


def test_ea3_exhaustive():
    ctx = EAContext.get(3)
    for S in itertools.combinations(range(6), 3):
        sts = ea_trees(3, S, context=ctx)
        assert_valid(ctx, sts, 2)


def test_ea4_cases(ea4):
    same = ea_trees(4, ea4.part_members[1][:3], context=ea4)
    assert same.case == "same-part"
    assert_valid(ea4, same, 3)
    split = ea_trees(
        4,
        (ea4.part_members[1][0], ea4.part_members[1][1], ea4.part_members[2][0]),
        context=ea4,
    )
    assert split.case == "two-one-split"
    assert_valid(ea4, split, 3)


def test_ea_degenerate_fan_target(ea4):
    # z equal to the out-neighbour of a neighbour of x exercises the
    # zero-length fan path convention
    g = ea4.graph
    hit = None
    for x in ea4.part_members[1]:
        for w in g.adj[x]:
            if ea4.part_of[w] != 1:
                continue
            z = ea4.out_idx[w]
            for y in ea4.part_members[1]:
                if y in (x, w):
                    continue
                sts = ea_trees(4, (x, y, z), context=ea4)
                if "zero-length-fan-path" in sts.notes:
                    hit = sts
                    break
            if hit:
                break
        if hit:
            break
    assert hit is not None
    assert check(g, hit).ok


def test_ea5_spot_runs():
    ctx = EAContext.get(5)
    rng = random.Random(41)
    same = ea_trees(5, tuple(sorted(rng.sample(ctx.part_members[1], 3))), context=ctx)
    assert same.case == "same-part"
    assert_valid(ctx, same, 4)
    pair = rng.sample(ctx.part_members[2], 2)
    solo = rng.choice(ctx.part_members[1])
    split = ea_trees(5, tuple(sorted(pair + [solo])), context=ctx)
    assert split.case == "two-one-split"
    assert_valid(ctx, split, 4)


def test_ea_labels_and_duplicates():
    ctx = EAContext.get(3)
    sts = ea_trees(3, [(1, 2, 3), (2, 3, 1), (2, 1, 3)], context=ctx)
    assert_valid(ctx, sts, 2)
    with pytest.raises(ValueError):
        ea_trees(3, [(1, 2, 3), (1, 2, 3), (2, 1, 3)], context=ctx)


def test_steiner_tree_bfs_unreachable():
    g = graph_from_edges(4, [(0, 1), (2, 3)])
    from cayley_steiner.trees import TreeConstructionError

    with pytest.raises(TreeConstructionError):
        steiner_tree_bfs(g, [0, 2])


def test_packing_cycle():
    cycle = BPContext.get(2).graph
    one = generic_stree_packing(cycle, (0, 3, 5), 1)
    assert len(one.trees) == 1
    assert check(cycle, one).ok
    with pytest.raises(PackingInfeasible):
        generic_stree_packing(cycle, (0, 3, 5), 2)


def test_packing_an4_all_triples():
    an4 = build_alternating_network(4)
    for S in itertools.combinations(range(12), 3):
        sts = generic_stree_packing(an4, S, 2)
        assert check(an4, sts).ok


def test_packing_matches_builders(bp3):
    rng = random.Random(17)
    for _ in range(10):
        S = tuple(sorted(rng.sample(range(48), 3)))
        built = bp_trees(3, S, context=bp3)
        packed = generic_stree_packing(bp3.graph, S, len(built.trees))
        assert len(packed.trees) == len(built.trees)
        assert check(bp3.graph, packed).ok


def test_packing_budget():
    bp3 = BPContext.get(3)
    with pytest.raises(SearchBudgetExceeded):
        generic_stree_packing(bp3.graph, (0, 17, 33), 2, budget_ms=0)


def test_packing_env_budget(monkeypatch):
    bp3 = BPContext.get(3)
    monkeypatch.setenv("CAYLEY_STEINER_BUDGET_MS", "0")
    with pytest.raises(SearchBudgetExceeded):
        generic_stree_packing(bp3.graph, (0, 17, 33), 2)
    monkeypatch.setenv("CAYLEY_STEINER_BUDGET_MS", "lots")
    with pytest.raises(RuntimeError):
        generic_stree_packing(bp3.graph, (0, 17, 33), 2)


def test_packing_rejects_bad_input(bp3):
    with pytest.raises(ValueError):
        generic_stree_packing(bp3.graph, (0, 0, 1), 1)
    with pytest.raises(ValueError):
        generic_stree_packing(bp3.graph, (0, 1, 2), 1, allowed=[0, 1])


def test_stree_set_json(bp3):
    sts = bp_trees(3, (0, 17, 33), context=bp3)
    payload = stree_set_json_dict(sts, bp3.graph)
    assert payload["family"] == "BP"
    assert payload["n"] == 3
    assert len(payload["S"]) == 3
    assert payload["case"] == sts.case
    assert len(payload["trees"]) == 2
