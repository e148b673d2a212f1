"""Explicit construction of the three network families.

Builds the burnt pancake graph BP_n, the alternating group network AN_n
and the godan graph EA_n as plain adjacency-list graphs whose vertex index
is the dense rank of the vertex label (see perm_core), so arrays replace
hash maps in the hot paths. Also exposes the structure the tree
constructions lean on: the 2n clusters of BP_n obtained by fixing the last
symbol, cross edges and out-neighbours, the relabeling that identifies a
cluster with BP_{n-1}, punctured graphs, and the even/odd bipartition of
EA_n.

Builders re-derive vertex counts, regularity and adjacency symmetry while
constructing, so a successful build doubles as a self check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial

from .perm_core import (
    an_generators,
    check_perm,
    check_signed_perm,
    compose,
    ea_generators,
    parity,
    perm_rank,
    perm_unrank,
    signed_perm_rank,
    signed_perm_unrank,
    signed_prefix_reversal,
)

__all__ = [
    "Graph",
    "ClusterDecomposition",
    "MAX_BP_N",
    "MAX_EA_N",
    "build_burnt_pancake",
    "build_alternating_network",
    "build_godan",
    "cluster_order",
    "cluster_decomposition",
    "ea_part_decomposition",
    "out_neighbour_bp",
    "out_neighbour_ea",
    "cross_edge_set",
    "cluster_relabel",
    "punctured_bp",
    "induced_subgraph",
    "graph_from_edges",
    "graph_json_dict",
    "to_dot",
    "label_text",
]

# Desk-scale caps; BP_6 already has 46080 vertices.
MAX_BP_N = 6
MAX_EA_N = 7


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted adjacency lists and vertex labels."""

    family: str
    n: int
    labels: tuple
    adj: tuple

    @property
    def order(self) -> int:
        return len(self.adj)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj) // 2

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index_of(self, label) -> int:
        try:
            return self._label_index[tuple(label)]
        except KeyError:
            raise ValueError(f"label {label!r} is not a vertex of {self.family}_{self.n}") from None

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def edges(self):
        """Yield edges as (u, w) pairs with u < w, in sorted order."""
        for u, nbrs in enumerate(self.adj):
            for w in nbrs:
                if w > u:
                    yield (u, w)


def _finish(family: str, n: int, labels: tuple, adj: tuple, degree: int | None = None) -> Graph:
    """Validate adjacency structure (and optional regularity) and wrap it."""
    nbr_sets = [set(nbrs) for nbrs in adj]
    for u, nbrs in enumerate(adj):
        assert list(nbrs) == sorted(nbr_sets[u]), f"vertex {u}: unsorted or duplicated neighbours"
        assert u not in nbr_sets[u], f"vertex {u}: self loop"
        if degree is not None:
            assert len(nbrs) == degree, f"vertex {u}: degree {len(nbrs)} != {degree}"
        for w in nbrs:
            assert u in nbr_sets[w], f"asymmetric edge ({u}, {w})"
    return Graph(family, n, labels, adj)


def build_burnt_pancake(n: int) -> Graph:
    """Burnt pancake graph BP_n: all signed permutations of 1..n, adjacent
    exactly when one is a signed prefix reversal of the other. n-regular
    with 2**n * n! vertices and n * n! * 2**(n-1) edges."""
    if not 2 <= n <= MAX_BP_N:
        raise ValueError(f"burnt pancake graph needs 2 <= n <= {MAX_BP_N}, got {n}")
    order = factorial(n) << n
    labels = tuple(signed_perm_unrank(n, r) for r in range(order))
    adj = tuple(
        tuple(sorted(signed_perm_rank(signed_prefix_reversal(x, i)) for i in range(1, n + 1)))
        for x in labels
    )
    g = _finish("BP", n, labels, adj, degree=n)
    assert g.order == order
    assert g.edge_count == n * factorial(n) * (1 << (n - 1))
    return g


def build_alternating_network(n: int) -> Graph:
    """Alternating group network AN_n: the even permutations of 1..n, with u
    adjacent to compose(u, s) for each generator s. (n-1)-regular with n!/2
    vertices and n!(n-1)/4 edges."""
    if not 3 <= n <= MAX_EA_N:
        raise ValueError(f"alternating group network needs 3 <= n <= {MAX_EA_N}, got {n}")
    evens = []
    for r in range(factorial(n)):
        p = perm_unrank(n, r)
        if parity(p) == "even":
            evens.append(p)
    index = {p: i for i, p in enumerate(evens)}
    gens = an_generators(n)
    adj = tuple(tuple(sorted(index[compose(p, s)] for s in gens)) for p in evens)
    g = _finish("AN", n, tuple(evens), adj, degree=n - 1)
    assert g.order == factorial(n) // 2
    assert g.edge_count == factorial(n) * (n - 1) // 4
    return g


def build_godan(n: int) -> Graph:
    """Godan graph EA_n: all permutations of 1..n, with u adjacent to
    compose(u, s) for each generator s (the alternating generators plus the
    transposition (12)). n-regular with n! vertices and n*n!/2 edges."""
    if not 3 <= n <= MAX_EA_N:
        raise ValueError(f"godan graph needs 3 <= n <= {MAX_EA_N}, got {n}")
    order = factorial(n)
    labels = tuple(perm_unrank(n, r) for r in range(order))
    gens = ea_generators(n)
    adj = tuple(tuple(sorted(perm_rank(compose(p, s)) for s in gens)) for p in labels)
    g = _finish("EA", n, labels, adj, degree=n)
    assert g.order == order
    assert g.edge_count == n * order // 2
    return g


def cluster_order(n: int) -> tuple[int, ...]:
    """The fixed ordering of BP_n cluster ids: 1, -1, 2, -2, ..., n, -n."""
    out = []
    for a in range(1, n + 1):
        out.append(a)
        out.append(-a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ClusterDecomposition:
    """Partition of a vertex set into labelled clusters (or parts)."""

    ids: tuple
    cluster_of: tuple
    members: dict


def cluster_decomposition(graph: Graph) -> ClusterDecomposition:
    """BP cluster partition: the cluster of a vertex is its last symbol.

    Produces 2n clusters of 2**(n-1) * (n-1)! vertices each; every cluster
    induces a copy of BP_{n-1}."""
    if graph.family != "BP":
        raise ValueError(f"cluster decomposition applies to BP graphs, got {graph.family}")
    n = graph.n
    cluster_of = tuple(lab[-1] for lab in graph.labels)
    members: dict[int, list[int]] = {j: [] for j in cluster_order(n)}
    for v, j in enumerate(cluster_of):
        members[j].append(v)
    size = factorial(n - 1) << (n - 1)
    fixed = {j: tuple(vs) for j, vs in members.items()}
    assert all(len(vs) == size for vs in fixed.values())
    return ClusterDecomposition(cluster_order(n), cluster_of, fixed)


def ea_part_decomposition(graph: Graph) -> ClusterDecomposition:
    """Even/odd bipartition of EA_n: part 1 holds the even permutations."""
    if graph.family != "EA":
        raise ValueError(f"part decomposition applies to EA graphs, got {graph.family}")
    part_of = tuple(1 if parity(lab) == "even" else 2 for lab in graph.labels)
    members = {p: tuple(v for v, q in enumerate(part_of) if q == p) for p in (1, 2)}
    assert len(members[1]) == len(members[2]) == graph.order // 2
    return ClusterDecomposition((1, 2), part_of, members)


def out_neighbour_bp(x) -> tuple[int, ...]:
    """The unique neighbour of x outside its cluster: the full signed
    reversal of x. Lands in cluster -x_1; applying it twice restores x."""
    x = check_signed_perm(x)
    return signed_prefix_reversal(x, len(x))


def out_neighbour_ea(u) -> tuple[int, ...]:
    """The unique neighbour of u in the other part of EA_n: compose(u, (12)),
    i.e. the one-line form with its first two entries swapped."""
    u = check_perm(u)
    return (u[1], u[0]) + u[2:]


def cross_edge_set(graph: Graph, dec: ClusterDecomposition, i: int, j: int) -> tuple:
    """All edges with one endpoint in cluster i and the other in cluster j.

    For BP_n the count is (n-2)! * 2**(n-2) when j != -i and 0 when j == -i.
    """
    if i == j:
        raise ValueError("cross edges need two distinct clusters")
    if i not in dec.members or j not in dec.members:
        raise ValueError(f"unknown cluster id in ({i}, {j})")
    edges = []
    for v in dec.members[i]:
        for w in graph.adj[v]:
            if dec.cluster_of[w] == j:
                edges.append((v, w) if v < w else (w, v))
    return tuple(sorted(set(edges)))


def cluster_relabel(x) -> tuple[int, ...]:
    """Map a vertex of a BP_n cluster onto the corresponding BP_{n-1} vertex.

    Drops the fixed last symbol and renumbers the remaining absolute values
    onto 1..n-1 preserving their order, keeping each sign. On every cluster
    this map is a graph isomorphism onto BP_{n-1}."""
    x = check_signed_perm(x)
    rest = x[:-1]
    renum = {a: k + 1 for k, a in enumerate(sorted(abs(v) for v in rest))}
    return tuple(renum[abs(v)] if v > 0 else -renum[abs(v)] for v in rest)


def induced_subgraph(graph: Graph, keep, family: str | None = None) -> tuple[Graph, tuple]:
    """Induced subgraph on the given vertex ids.

    Returns (subgraph, old_ids) where old_ids[i] is the host index of the
    subgraph vertex i. Labels are preserved; vertex order follows the host
    ordering, so the mapping is monotone."""
    old_ids = tuple(sorted(set(keep)))
    new_of_old = {v: i for i, v in enumerate(old_ids)}
    adj = tuple(
        tuple(new_of_old[w] for w in graph.adj[v] if w in new_of_old) for v in old_ids
    )
    labels = tuple(graph.labels[v] for v in old_ids)
    sub = _finish(family or f"{graph.family}-induced", graph.n, labels, adj)
    return sub, old_ids


def punctured_bp(n: int, j: int, graph: Graph | None = None,
                 dec: ClusterDecomposition | None = None) -> Graph:
    """BP_n with the whole cluster j removed (an induced subgraph).

    The result keeps connectivity n-1, which is what lets the tree
    constructions fan into it."""
    if graph is None:
        graph = build_burnt_pancake(n)
    if dec is None:
        dec = cluster_decomposition(graph)
    if j not in dec.members:
        raise ValueError(f"unknown cluster id {j}")
    keep = [v for v in range(graph.order) if dec.cluster_of[v] != j]
    sub, _ = induced_subgraph(graph, keep, family="BP-punctured")
    return sub


def graph_from_edges(order: int, edges, family: str = "G", n: int = 0,
                     labels: tuple | None = None) -> Graph:
    """Small helper for ad-hoc graphs (tests, examples)."""
    nbrs: list[set[int]] = [set() for _ in range(order)]
    for u, w in edges:
        if u == w or not (0 <= u < order and 0 <= w < order):
            raise ValueError(f"bad edge ({u}, {w})")
        nbrs[u].add(w)
        nbrs[w].add(u)
    adj = tuple(tuple(sorted(s)) for s in nbrs)
    if labels is None:
        labels = tuple(range(order))
    return _finish(family, n, tuple(labels), adj)


def label_text(graph: Graph, v: int) -> str:
    """Stable textual form of a vertex label."""
    lab = graph.labels[v]
    if isinstance(lab, tuple):
        return ",".join(str(e) for e in lab)
    return str(lab)


def graph_json_dict(graph: Graph) -> dict:
    """JSON-ready dump with stable ordering: {family, n, order, edges, labels}."""
    return {
        "family": graph.family,
        "n": graph.n,
        "order": graph.order,
        "edges": [[u, w] for u, w in graph.edges()],
        "labels": [label_text(graph, v) for v in range(graph.order)],
    }


_DOT_PALETTE = (
    "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c", "#fb9a99", "#e31a1c",
    "#fdbf6f", "#ff7f00", "#cab2d6", "#6a3d9a", "#ffff99", "#b15928",
)


def to_dot(graph: Graph, dec: ClusterDecomposition | None = None) -> str:
    """DOT export; when a decomposition is given, vertices are coloured by
    cluster (palette cycles deterministically over the sorted cluster ids)."""
    lines = [f'graph "{graph.family}{graph.n}" {{']
    lines.append("  node [style=filled, fillcolor=white];")
    color = {}
    if dec is not None:
        for k, j in enumerate(dec.ids):
            color[j] = _DOT_PALETTE[k % len(_DOT_PALETTE)]
    for v in range(graph.order):
        attrs = [f'label="{label_text(graph, v)}"']
        if dec is not None:
            attrs.append(f'fillcolor="{color[dec.cluster_of[v]]}"')
        lines.append(f'  {v} [{", ".join(attrs)}];')
    for u, w in graph.edges():
        lines.append(f"  {u} -- {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
