"""Constructive Steiner tree packings for the network families.

For any three distinct vertices S of BP_n or EA_n the builders return n-1
trees that each contain S, pairwise intersect exactly in S, and share no
edge. The construction follows the cluster structure of the graphs:

* all of S inside one cluster: recurse inside the cluster (a copy of the
  one-dimension-smaller graph) and route one extra tree through the
  out-neighbours of S in the punctured rest of the graph;
* S split 2-1 over two clusters: internally disjoint paths inside the
  shared cluster, then a fan from the third vertex onto the out-neighbours
  of the path start vertices;
* S spread over three clusters: per tree, pick one attachment vertex in
  each home cluster whose out-neighbours meet in a private transit
  cluster, connect those out-neighbours there, and fan each terminal onto
  its attachments. When too few transit clusters remain (dimension 4 with
  pairwise non-opposite home clusters) the third tree routes through a
  connected union of two clusters; dimension 3 instead builds one tree in
  the union of the home clusters and one through the out-neighbours,
  rerouting any terminal whose own out-neighbour stays inside the union.

Every "choose a vertex" step takes the smallest admissible vertex index,
connectors are breadth-first Steiner trees, and the flow subroutines are
deterministic, so identical inputs give identical tree sets. Each returned
set is re-validated against the host graph before it leaves the builder.

generic_stree_packing is an independent exact search used both as a
cross-checking oracle and to pack trees inside alternating group networks,
where the builders do not have a bespoke construction.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass, field

from .flows import fan, internally_disjoint_paths
from .perm_core import (
    check_perm,
    check_signed_perm,
    format_perm,
    format_signed_perm,
    perm_rank,
    signed_perm_rank,
    signed_prefix_reversal,
)
from .topology import (
    Graph,
    build_burnt_pancake,
    build_godan,
    cluster_decomposition,
    cluster_order,
    cluster_relabel,
    ea_part_decomposition,
)

__all__ = [
    "TreeConstructionError",
    "PackingInfeasible",
    "SearchBudgetExceeded",
    "STreeSet",
    "stree_set_json_dict",
    "steiner_tree_bfs",
    "BPContext",
    "EAContext",
    "bp_trees",
    "bp_trees_same_cluster",
    "bp_trees_two_clusters",
    "bp_trees_three_clusters",
    "ea_trees",
    "generic_stree_packing",
]


class TreeConstructionError(RuntimeError):
    """A constructive step could not be completed; the message carries the
    case trace. Not expected for valid inputs."""


class PackingInfeasible(RuntimeError):
    """Exhaustive search proved that no packing of the requested size exists."""


class SearchBudgetExceeded(RuntimeError):
    """The packing search ran out of time budget; the instance is undecided."""


@dataclass(frozen=True)
class STreeSet:
    """A set of trees over a common terminal triple, internally edge disjoint.

    terminals are host vertex indices (sorted); each tree is a sorted tuple
    of normalized (u, w) edges; case records which construction route
    produced the set; notes flag degeneracies that were handled.
    """

    family: str
    n: int
    terminals: tuple
    case: str
    trees: tuple
    notes: tuple = ()


def _edge(u: int, w: int) -> tuple[int, int]:
    return (u, w) if u < w else (w, u)


def _path_edges(path) -> set:
    return {_edge(u, w) for u, w in zip(path, path[1:])}


def _tree_tuple(edges) -> tuple:
    return tuple(sorted(edges))


def _checked(graph: Graph, sts: STreeSet) -> STreeSet:
    # Unconditional self check: no tree set leaves a builder unverified.
    from .verify import check

    result = check(graph, sts)
    if not result.ok:
        raise TreeConstructionError(f"self check failed for case {sts.case}: {result.reason}")
    return sts


def steiner_tree_bfs(graph: Graph, terminals, allowed=None, banned_edges=frozenset()) -> frozenset:
    """Deterministic BFS Steiner connector inside an allowed vertex set.

    Grows from the smallest terminal and attaches each further terminal
    along a shortest path to the current tree (multi-source BFS seeded in
    ascending order). Returns the edge set; raises TreeConstructionError
    when some terminal cannot be reached.
    """
    terms = sorted(set(terminals))
    if allowed is not None:
        for t in terms:
            if t not in allowed:
                raise TreeConstructionError(f"terminal {t} outside the allowed set")
    tree_vertices = {terms[0]}
    edges: set = set()
    for t in terms[1:]:
        if t in tree_vertices:
            continue
        parent: dict[int, int] = {}
        seen = set(tree_vertices)
        queue = deque(sorted(tree_vertices))
        found = False
        while queue and not found:
            u = queue.popleft()
            for w in graph.adj[u]:
                if w in seen:
                    continue
                if allowed is not None and w not in allowed:
                    continue
                if banned_edges and _edge(u, w) in banned_edges:
                    continue
                parent[w] = u
                seen.add(w)
                if w == t:
                    found = True
                    break
                queue.append(w)
        if not found:
            raise TreeConstructionError(f"terminal {t} unreachable inside the allowed set")
        v = t
        while v not in tree_vertices:
            u = parent[v]
            edges.add(_edge(u, v))
            tree_vertices.add(v)
            v = u
    return frozenset(edges)


class BPContext:
    """A burnt pancake graph with its cluster machinery, cached per n."""

    _cache: dict[int, "BPContext"] = {}

    def __init__(self, n: int):
        self.n = n
        self.graph = build_burnt_pancake(n)
        self.dec = cluster_decomposition(self.graph)
        self.cluster_of = self.dec.cluster_of
        self.members = self.dec.members
        self.member_sets = {j: frozenset(m) for j, m in self.members.items()}
        labels = self.graph.labels
        self.out_idx = tuple(
            signed_perm_rank(signed_prefix_reversal(lab, n)) for lab in labels
        )
        # The out-neighbour of x lives in cluster -x_1.
        self.out_cluster = tuple(-lab[0] for lab in labels)
        self._complements: dict = {}
        self._unions: dict = {}
        self._sub_maps: dict = {}

    @classmethod
    def get(cls, n: int) -> "BPContext":
        ctx = cls._cache.get(n)
        if ctx is None:
            ctx = cls._cache[n] = cls(n)
        return ctx

    def complement(self, j: int) -> frozenset:
        """All vertices outside cluster j."""
        got = self._complements.get(j)
        if got is None:
            got = frozenset(range(self.graph.order)) - self.member_sets[j]
            self._complements[j] = got
        return got

    def union_members(self, clusters) -> frozenset:
        key = tuple(sorted(clusters))
        got = self._unions.get(key)
        if got is None:
            got = frozenset().union(*(self.member_sets[j] for j in key))
            self._unions[key] = got
        return got

    def sub_maps(self, j: int) -> tuple[dict, dict]:
        """Index bijection between cluster j and BP_{n-1} (to_small, to_big)."""
        got = self._sub_maps.get(j)
        if got is None:
            to_small: dict[int, int] = {}
            to_big: dict[int, int] = {}
            for v in self.members[j]:
                small = signed_perm_rank(cluster_relabel(self.graph.labels[v]))
                to_small[v] = small
                to_big[small] = v
            assert len(to_big) == len(self.members[j])
            got = self._sub_maps[j] = (to_small, to_big)
        return got


class EAContext:
    """A godan graph with its even/odd part machinery, cached per n."""

    _cache: dict[int, "EAContext"] = {}

    def __init__(self, n: int):
        self.n = n
        self.graph = build_godan(n)
        self.dec = ea_part_decomposition(self.graph)
        self.part_of = self.dec.cluster_of
        self.part_members = self.dec.members
        self.part_sets = {p: frozenset(m) for p, m in self.part_members.items()}
        self.out_idx = tuple(
            perm_rank((lab[1], lab[0]) + lab[2:]) for lab in self.graph.labels
        )

    @classmethod
    def get(cls, n: int) -> "EAContext":
        ctx = cls._cache.get(n)
        if ctx is None:
            ctx = cls._cache[n] = cls(n)
        return ctx


def _resolve_terminals(ctx, terminals, kind: str) -> tuple:
    idx = []
    order = ctx.graph.order
    for item in terminals:
        if isinstance(item, int):
            if not 0 <= item < order:
                raise ValueError(f"vertex index {item} out of range 0..{order - 1}")
            idx.append(item)
        else:
            if kind == "BP":
                lab = check_signed_perm(item)
                if len(lab) != ctx.n:
                    raise ValueError(f"label {item!r} has length {len(lab)}, expected {ctx.n}")
                idx.append(signed_perm_rank(lab))
            else:
                lab = check_perm(item)
                if len(lab) != ctx.n:
                    raise ValueError(f"label {item!r} has length {len(lab)}, expected {ctx.n}")
                idx.append(perm_rank(lab))
    if len(idx) != 3 or len(set(idx)) != 3:
        raise ValueError(f"need exactly three distinct vertices, got {terminals!r}")
    return tuple(sorted(idx))


def bp_trees(n: int, terminals, *, context: BPContext | None = None) -> STreeSet:
    """n-1 internally edge disjoint S-trees for three distinct BP_n vertices.

    terminals may be vertex indices or signed permutation labels. Dispatches
    on how many clusters the triple touches; n=2 returns the single tree
    that exists on the 8-cycle.
    """
    ctx = context or BPContext.get(n)
    return _bp_trees(ctx, _resolve_terminals(ctx, terminals, "BP"))


def bp_trees_same_cluster(n: int, terminals, *, context: BPContext | None = None) -> STreeSet:
    """The one-cluster construction; rejects triples not in a single cluster."""
    ctx = context or BPContext.get(n)
    S = _resolve_terminals(ctx, terminals, "BP")
    clusters = {ctx.cluster_of[v] for v in S}
    if len(clusters) != 1:
        raise ValueError("terminals are not in a single cluster")
    return _bp_same_cluster(ctx, S, clusters.pop())


def bp_trees_two_clusters(n: int, terminals, *, context: BPContext | None = None) -> STreeSet:
    """The two-cluster construction; rejects triples not split 2-1."""
    ctx = context or BPContext.get(n)
    S = _resolve_terminals(ctx, terminals, "BP")
    if len({ctx.cluster_of[v] for v in S}) != 2:
        raise ValueError("terminals do not touch exactly two clusters")
    return _bp_two_clusters(ctx, S)


def bp_trees_three_clusters(n: int, terminals, *, context: BPContext | None = None) -> STreeSet:
    """The three-cluster construction; rejects triples not in three clusters."""
    ctx = context or BPContext.get(n)
    S = _resolve_terminals(ctx, terminals, "BP")
    if len({ctx.cluster_of[v] for v in S}) != 3:
        raise ValueError("terminals do not touch three distinct clusters")
    return _bp_three_clusters(ctx, S)


def _bp_trees(ctx: BPContext, S: tuple) -> STreeSet:
    if ctx.n == 2:
        edges = steiner_tree_bfs(ctx.graph, S)
        sts = STreeSet("BP", 2, S, "base-cycle", (_tree_tuple(edges),))
        return _checked(ctx.graph, sts)
    clusters = {ctx.cluster_of[v] for v in S}
    if len(clusters) == 1:
        return _bp_same_cluster(ctx, S, clusters.pop())
    if len(clusters) == 2:
        return _bp_two_clusters(ctx, S)
    return _bp_three_clusters(ctx, S)


def _bp_same_cluster(ctx: BPContext, S: tuple, j: int) -> STreeSet:
    to_small, to_big = ctx.sub_maps(j)
    inner = _bp_trees(BPContext.get(ctx.n - 1), tuple(sorted(to_small[v] for v in S)))
    trees = [
        _tree_tuple(_edge(to_big[a], to_big[b]) for a, b in tree) for tree in inner.trees
    ]
    hats = sorted(ctx.out_idx[v] for v in S)
    outer = set(steiner_tree_bfs(ctx.graph, hats, ctx.complement(j)))
    outer.update(_edge(v, ctx.out_idx[v]) for v in S)
    trees.append(_tree_tuple(outer))
    notes = (f"inner:{inner.case}",) + tuple(f"inner:{m}" for m in inner.notes)
    sts = STreeSet("BP", ctx.n, S, "same-cluster", tuple(trees), notes)
    return _checked(ctx.graph, sts)


def _paths_plus_fan(graph: Graph, x: int, y: int, z: int, shared_allowed, other_allowed,
                    out_idx, k: int) -> tuple[list, bool]:
    """Shared two-cluster/two-part engine.

    Builds k internally disjoint (x,y)-paths inside the shared piece, takes
    the neighbour of x on each path, and fans z onto their out-neighbours
    in the other piece. A fan target equal to z itself becomes a length-0
    path. Returns (tree edge sets, degenerate flag).
    """
    ps = internally_disjoint_paths(graph, x, y, k, allowed=shared_allowed)
    starts = [p[1] for p in ps.paths]
    hats = [out_idx[u] for u in starts]
    degenerate = z in set(hats)
    fan_targets = [h for h in hats if h != z]
    paths_by_end: dict[int, tuple] = {}
    if fan_targets:
        fs = fan(graph, z, fan_targets, len(fan_targets), allowed=other_allowed)
        paths_by_end = {p[-1]: p for p in fs.paths}
    trees = []
    for p, u, h in zip(ps.paths, starts, hats):
        edges = _path_edges(p)
        edges.add(_edge(u, h))
        if h != z:
            edges |= _path_edges(paths_by_end[h])
        trees.append(edges)
    return trees, degenerate


def _bp_two_clusters(ctx: BPContext, S: tuple) -> STreeSet:
    by_cluster: dict[int, list[int]] = {}
    for v in S:
        by_cluster.setdefault(ctx.cluster_of[v], []).append(v)
    shared = next(j for j, vs in by_cluster.items() if len(vs) == 2)
    x, y = sorted(by_cluster[shared])
    (z,) = [v for v in S if ctx.cluster_of[v] != shared]
    trees, degenerate = _paths_plus_fan(
        ctx.graph, x, y, z,
        ctx.member_sets[shared], ctx.complement(shared),
        ctx.out_idx, ctx.n - 1,
    )
    notes = ("zero-length-fan-path",) if degenerate else ()
    sts = STreeSet("BP", ctx.n, S, "two-clusters", tuple(_tree_tuple(t) for t in trees), notes)
    return _checked(ctx.graph, sts)


def _pick_attach(ctx: BPContext, home: int, target_cluster: int, forbidden) -> int:
    """Smallest vertex of the home cluster whose out-neighbour lies in the
    target cluster, skipping forbidden vertices (the terminals)."""
    for v in ctx.members[home]:
        if v not in forbidden and ctx.out_cluster[v] == target_cluster:
            return v
    raise TreeConstructionError(
        f"no attachment vertex in cluster {home} toward cluster {target_cluster}"
    )


def _fan_paths_by_end(graph: Graph, src: int, targets, allowed) -> dict[int, tuple]:
    fs = fan(graph, src, targets, len(targets), allowed=allowed)
    return {p[-1]: p for p in fs.paths}


def _assemble_transit_trees(ctx: BPContext, S: tuple, picks: list) -> list:
    """Glue per-tree pieces: fans from the terminals onto their attachment
    vertices, the cross edges, and the transit connector trees."""
    x, y, z = S
    j1, j2, j3 = (ctx.cluster_of[v] for v in S)
    fx = _fan_paths_by_end(ctx.graph, x, [p[0] for p in picks], ctx.member_sets[j1])
    fy = _fan_paths_by_end(ctx.graph, y, [p[1] for p in picks], ctx.member_sets[j2])
    fz = _fan_paths_by_end(ctx.graph, z, [p[2] for p in picks], ctx.member_sets[j3])
    trees = []
    for u, r, w, connector in picks:
        edges = set(connector)
        edges |= _path_edges(fx[u])
        edges |= _path_edges(fy[r])
        edges |= _path_edges(fz[w])
        edges.add(_edge(u, ctx.out_idx[u]))
        edges.add(_edge(r, ctx.out_idx[r]))
        edges.add(_edge(w, ctx.out_idx[w]))
        trees.append(_tree_tuple(edges))
    return trees


def _bp_three_clusters(ctx: BPContext, S: tuple) -> STreeSet:
    if ctx.n == 3:
        return _bp_three_n3(ctx, S)
    homes = [ctx.cluster_of[v] for v in S]
    forbidden_clusters = {c for j in homes for c in (j, -j)}
    avail = [c for c in cluster_order(ctx.n) if c not in forbidden_clusters]
    if len(avail) >= ctx.n - 1:
        label = "three-clusters:general" if ctx.n >= 5 else "three-clusters:opposite-pair"
        return _bp_transit(ctx, S, avail[: ctx.n - 1], label)
    return _bp_two_transit_union(ctx, S)


def _bp_transit(ctx: BPContext, S: tuple, transits, label: str) -> STreeSet:
    """One private transit cluster per tree: attachments u, r, w in the home
    clusters send their out-neighbours into the transit cluster, where a
    BFS Steiner tree connects them."""
    x, y, z = S
    j1, j2, j3 = (ctx.cluster_of[v] for v in S)
    picks = []
    for transit in transits:
        u = _pick_attach(ctx, j1, transit, {x})
        r = _pick_attach(ctx, j2, transit, {y})
        w = _pick_attach(ctx, j3, transit, {z})
        connector = steiner_tree_bfs(
            ctx.graph,
            (ctx.out_idx[u], ctx.out_idx[r], ctx.out_idx[w]),
            ctx.member_sets[transit],
        )
        picks.append((u, r, w, connector))
    trees = _assemble_transit_trees(ctx, S, picks)
    sts = STreeSet("BP", ctx.n, S, label, tuple(trees))
    return _checked(ctx.graph, sts)


def _bp_two_transit_union(ctx: BPContext, S: tuple) -> STreeSet:
    """Dimension 4, pairwise non-opposite home clusters: only two clusters
    remain free, so the first two trees use them as transits and the third
    routes through the connected union of the clusters opposite to the
    homes of y and z."""
    x, y, z = S
    j1, j2, j3 = (ctx.cluster_of[v] for v in S)
    forbidden_clusters = {c for j in (j1, j2, j3) for c in (j, -j)}
    avail = [c for c in cluster_order(ctx.n) if c not in forbidden_clusters]
    picks = []
    for transit in avail:
        u = _pick_attach(ctx, j1, transit, {x})
        r = _pick_attach(ctx, j2, transit, {y})
        w = _pick_attach(ctx, j3, transit, {z})
        connector = steiner_tree_bfs(
            ctx.graph,
            (ctx.out_idx[u], ctx.out_idx[r], ctx.out_idx[w]),
            ctx.member_sets[transit],
        )
        picks.append((u, r, w, connector))
    # Third tree: x- and z-side attachments exit into the cluster opposite
    # y's home; the y-side attachment exits into the cluster opposite z's
    # home; those two clusters are non-opposite, so their union is connected.
    u3 = _pick_attach(ctx, j1, -j2, {x})
    w3 = _pick_attach(ctx, j3, -j2, {z})
    r3 = _pick_attach(ctx, j2, -j3, {y})
    union = ctx.union_members((-j2, -j3))
    connector3 = steiner_tree_bfs(
        ctx.graph,
        (ctx.out_idx[u3], ctx.out_idx[r3], ctx.out_idx[w3]),
        union,
    )
    picks.append((u3, r3, w3, connector3))
    trees = _assemble_transit_trees(ctx, S, picks)
    sts = STreeSet("BP", ctx.n, S, "three-clusters:no-opposite-pair", tuple(trees))
    return _checked(ctx.graph, sts)


def _bp_three_n3(ctx: BPContext, S: tuple) -> STreeSet:
    """Dimension 3: one tree inside the union H of the three home clusters,
    one through the out-neighbours outside H. A terminal whose own
    out-neighbour stays inside H is rerouted through a within-cluster
    neighbour whose out-neighbour leaves H (one always exists: the closed
    neighbourhood of a vertex inside its cluster reaches n distinct
    clusters)."""
    homes = [ctx.cluster_of[v] for v in S]
    H = ctx.union_members(homes)
    outside = frozenset(range(ctx.graph.order)) - H
    attach = []
    blocked = 0
    for t in S:
        if ctx.out_idx[t] not in H:
            attach.append(t)
            continue
        blocked += 1
        for v in ctx.graph.adj[t]:
            if ctx.cluster_of[v] == ctx.cluster_of[t] and ctx.out_idx[v] not in H:
                attach.append(v)
                break
        else:
            raise TreeConstructionError(
                f"no reroute neighbour for terminal {t} leaves the home union"
            )
    excluded = {a for a, t in zip(attach, S) if a != t}
    inner = steiner_tree_bfs(ctx.graph, S, H - excluded)
    outer = set(steiner_tree_bfs(ctx.graph, sorted(ctx.out_idx[a] for a in attach), outside))
    for a, t in zip(attach, S):
        if a != t:
            outer.add(_edge(t, a))
        outer.add(_edge(a, ctx.out_idx[a]))
    notes = (f"rerouted-terminals:{blocked}",) if blocked else ()
    sts = STreeSet(
        "BP", 3, S, f"three-clusters:blocked-{blocked}",
        (_tree_tuple(inner), _tree_tuple(outer)), notes,
    )
    return _checked(ctx.graph, sts)


def ea_trees(n: int, terminals, *, context: EAContext | None = None,
             budget_ms: float | None = None) -> STreeSet:
    """n-1 internally edge disjoint S-trees for three distinct EA_n vertices.

    terminals may be vertex indices or one-line permutation labels. A triple
    inside one part packs n-2 trees there by exact search and routes the
    last tree through the other part over the matching edges; a 2-1 split
    uses paths in the shared part plus a fan from the third vertex.
    """
    ctx = context or EAContext.get(n)
    S = _resolve_terminals(ctx, terminals, "EA")
    parts = {ctx.part_of[v] for v in S}
    if len(parts) == 1:
        return _ea_same_part(ctx, S, parts.pop(), budget_ms)
    return _ea_split(ctx, S)


def _ea_same_part(ctx: EAContext, S: tuple, part: int, budget_ms: float | None) -> STreeSet:
    other = 3 - part
    inner = generic_stree_packing(
        ctx.graph, S, ctx.n - 2, allowed=ctx.part_sets[part], budget_ms=budget_ms
    )
    hats = sorted(ctx.out_idx[v] for v in S)
    outer = set(steiner_tree_bfs(ctx.graph, hats, ctx.part_sets[other]))
    outer.update(_edge(v, ctx.out_idx[v]) for v in S)
    trees = inner.trees + (_tree_tuple(outer),)
    notes = (f"part:{part}", f"inner:{inner.case}")
    sts = STreeSet("EA", ctx.n, S, "same-part", trees, notes)
    return _checked(ctx.graph, sts)


def _ea_split(ctx: EAContext, S: tuple) -> STreeSet:
    by_part: dict[int, list[int]] = {}
    for v in S:
        by_part.setdefault(ctx.part_of[v], []).append(v)
    shared = next(p for p, vs in by_part.items() if len(vs) == 2)
    x, y = sorted(by_part[shared])
    (z,) = by_part[3 - shared]
    trees, degenerate = _paths_plus_fan(
        ctx.graph, x, y, z,
        ctx.part_sets[shared], ctx.part_sets[3 - shared],
        ctx.out_idx, ctx.n - 1,
    )
    notes = (f"part:{shared}",)
    if degenerate:
        notes += ("zero-length-fan-path",)
    sts = STreeSet("EA", ctx.n, S, "two-one-split", tuple(_tree_tuple(t) for t in trees), notes)
    return _checked(ctx.graph, sts)


# ---------------------------------------------------------------------------
# Exact packing search (oracle + alternating-network inner packing)
# ---------------------------------------------------------------------------


def _env_budget_ms() -> float | None:
    raw = os.environ.get("CAYLEY_STEINER_BUDGET_MS")
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise RuntimeError(f"CAYLEY_STEINER_BUDGET_MS={raw!r} is not a number") from None


def generic_stree_packing(graph: Graph, terminals, k: int, *, allowed=None,
                          budget_ms: float | None = None) -> STreeSet:
    """Exact backtracking search for k internally edge disjoint S-trees.

    Complete at desk scale: every minimal S-tree is a set of legs from a
    center vertex (two legs when the center is itself a terminal), so
    candidates are enumerated center by center, shortest-first, recursing
    on the residual graph with the used internal vertices removed and used
    terminal-terminal edges banned. Failed residual states are memoized.

    Raises PackingInfeasible when exhaustion proves no packing exists, and
    SearchBudgetExceeded when the time budget (budget_ms, defaulting to the
    CAYLEY_STEINER_BUDGET_MS environment variable) runs out first; the
    latter leaves the instance undecided.
    """
    idx = []
    for item in terminals:
        idx.append(item if isinstance(item, int) else graph.index_of(item))
    S = tuple(sorted(idx))
    if len(set(S)) != 3:
        raise ValueError(f"need exactly three distinct terminals, got {terminals!r}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    live_all = frozenset(allowed) if allowed is not None else frozenset(range(graph.order))
    for s in S:
        if s not in live_all:
            raise ValueError(f"terminal {s} outside the allowed set")
    if k == 0:
        return STreeSet(graph.family, graph.n, S, "packing:k=0", ())
    if budget_ms is None:
        budget_ms = _env_budget_ms()
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0
    state = _PackingState(graph, S, live_all, deadline)
    result = state.search(frozenset(), frozenset(), [], k)
    if result is None:
        raise PackingInfeasible(
            f"no {k} internally edge disjoint S-trees exist for S={list(S)}"
        )
    trees = tuple(_tree_tuple(t) for t in result)
    sts = STreeSet(graph.family, graph.n, S, f"packing:k={k}", trees)
    return _checked(graph, sts)


@dataclass
class _PackingState:
    graph: Graph
    S: tuple
    live_all: frozenset
    deadline: float | None
    failed: set = field(default_factory=set)

    def _tick(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded("packing search budget exhausted")

    def _ok(self, v: int, removed: frozenset) -> bool:
        return v in self.live_all and v not in removed

    def _edge_ok(self, u: int, w: int, banned: frozenset) -> bool:
        return not banned or _edge(u, w) not in banned

    def _s_connected(self, removed: frozenset, banned: frozenset) -> bool:
        want = set(self.S[1:])
        seen = {self.S[0]}
        queue = deque((self.S[0],))
        while queue and want:
            u = queue.popleft()
            for w in self.graph.adj[u]:
                if w in seen or not self._ok(w, removed):
                    continue
                if not self._edge_ok(u, w, banned):
                    continue
                seen.add(w)
                want.discard(w)
                queue.append(w)
        return not want

    def _dist_map(self, target: int, removed: frozenset, banned: frozenset) -> dict:
        dist = {target: 0}
        queue = deque((target,))
        while queue:
            u = queue.popleft()
            du = dist[u]
            for w in self.graph.adj[u]:
                if w in dist or not self._ok(w, removed):
                    continue
                if not self._edge_ok(u, w, banned):
                    continue
                dist[w] = du + 1
                queue.append(w)
        return dist

    def _leg_paths(self, start: int, target: int, removed: frozenset, banned: frozenset,
                   used: set, dist: dict):
        """All simple paths start->target whose interior avoids the terminals,
        the center, previously used interiors and removed vertices. Ordered
        by a shortest-first heuristic (neighbour with smaller remaining
        distance explored first), deterministic tiebreak by index."""
        sset = set(self.S)
        path = [start]
        on_path = {start}

        def step(u):
            self._tick()
            ranked = sorted(
                (w for w in self.graph.adj[u] if self._edge_ok(u, w, banned)),
                key=lambda w: (dist.get(w, 1 << 30), w),
            )
            for w in ranked:
                if w == target:
                    yield tuple(path) + (w,)
                    continue
                if w in sset or w in on_path or w in used or not self._ok(w, removed):
                    continue
                if w not in dist:
                    continue
                path.append(w)
                on_path.add(w)
                yield from step(w)
                path.pop()
                on_path.remove(w)

        yield from step(start)

    def _spiders(self, removed: frozenset, banned: frozenset):
        """Enumerate minimal S-trees of the residual graph: legs from every
        feasible center, nearest centers first."""
        dists = {t: self._dist_map(t, removed, banned) for t in self.S}
        centers = []
        for c in sorted(self.live_all - removed):
            total = 0
            feasible = True
            for t in self.S:
                if c == t:
                    continue
                d = dists[t].get(c)
                if d is None:
                    feasible = False
                    break
                total += d
            if feasible:
                centers.append((total, c))
        centers.sort()
        sset = set(self.S)
        for _, c in centers:
            targets = [t for t in self.S if t != c]

            def legs(i, used, edges):
                if i == len(targets):
                    interior = frozenset(
                        v for v in used | {c} if v not in sset
                    )
                    yield frozenset(edges), interior
                    return
                t = targets[i]
                for p in self._leg_paths(c, t, removed, banned, used, dists[t]):
                    pe = _path_edges(p)
                    if pe & edges:
                        continue
                    yield from legs(i + 1, used | set(p[1:-1]), edges | pe)

            yield from legs(0, set(), frozenset())

    def search(self, removed: frozenset, banned: frozenset, acc: list, k: int):
        self._tick()
        remaining = k - len(acc)
        if remaining == 0:
            return list(acc)
        if not self._s_connected(removed, banned):
            return None
        if remaining == 1:
            tree = steiner_tree_bfs(self.graph, self.S, self.live_all - removed, banned)
            return list(acc) + [set(tree)]
        key = (remaining, removed, banned)
        if key in self.failed:
            return None
        sset = set(self.S)
        for edges, interior in self._spiders(removed, banned):
            s_edges = frozenset(e for e in edges if e[0] in sset and e[1] in sset)
            result = self.search(removed | interior, banned | s_edges, acc + [set(edges)], k)
            if result is not None:
                return result
        self.failed.add(key)
        return None


def stree_set_json_dict(sts: STreeSet, graph: Graph) -> dict:
    """JSON-ready form: terminals as labels, trees as index edge pairs."""
    if graph.family == "BP":
        fmt = format_signed_perm
    else:
        fmt = format_perm
    return {
        "family": sts.family,
        "n": sts.n,
        "S": [fmt(graph.labels[v]) for v in sts.terminals],
        "terminal_indices": list(sts.terminals),
        "case": sts.case,
        "notes": list(sts.notes),
        "trees": [[[u, w] for u, w in tree] for tree in sts.trees],
    }
