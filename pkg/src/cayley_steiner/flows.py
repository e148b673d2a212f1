"""Internally disjoint path systems via unit vertex-capacity maximum flow.

A host graph is compiled into the standard vertex-split digraph: vertex v
becomes v_in = 2v and v_out = 2v+1 joined by a capacity-1 arc, and every
edge contributes a capacity-1 arc in each direction between the matching
out/in nodes. Maximum flow then bounds how many paths may share a vertex,
which yields, with suitable sources and sinks:

* internally_disjoint_paths: k (x,y)-paths sharing only x and y;
* fan: k paths from x to distinct vertices of a target set Y, sharing only
  x and never passing through Y (targets absorb: their split arc is
  dropped and replaced by an arc into a super sink);
* disjoint_linkage: k fully vertex-disjoint paths from a set X to a set Y
  (super source over X, super sink over Y, no split arc on X or Y).

Arc creation order is fixed (ascending vertex index), the Dinic kernels
follow that order, and paths are decoded smallest-arc-first from the
residual, so identical inputs give identical path systems: certificates
built on top are reproducible byte for byte.

The kernel has a compiled Cython implementation with a pure Python twin;
select one explicitly with set_flow_backend() or the CAYLEY_STEINER_BACKEND
environment variable ("compiled" or "pure").
"""

from __future__ import annotations

import os
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass

from . import _flowpure
from .topology import Graph

try:  # compiled kernel is optional; the pure twin is always available
    from . import _flowcore
except ImportError:  # pragma: no cover - depends on the build
    _flowcore = None

__all__ = [
    "FlowInfeasible",
    "PathSystem",
    "FlowNetwork",
    "flow_backend",
    "available_backends",
    "set_flow_backend",
    "use_flow_backend",
    "vertex_connectivity",
    "local_connectivity",
    "internally_disjoint_paths",
    "fan",
    "disjoint_linkage",
]

_INF_FLOW = 1 << 30

_BACKENDS = {"pure": _flowpure}
if _flowcore is not None:
    _BACKENDS["compiled"] = _flowcore


def _initial_backend() -> str:
    env = os.environ.get("CAYLEY_STEINER_BACKEND")
    if env:
        if env not in _BACKENDS:
            raise RuntimeError(
                f"CAYLEY_STEINER_BACKEND={env!r} but available backends are {sorted(_BACKENDS)}"
            )
        return env
    return "compiled" if "compiled" in _BACKENDS else "pure"


_ACTIVE = _initial_backend()


def flow_backend() -> str:
    """Name of the active kernel backend ("compiled" or "pure")."""
    return _ACTIVE


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_flow_backend(name: str) -> None:
    global _ACTIVE
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(_BACKENDS)}")
    _ACTIVE = name


@contextmanager
def use_flow_backend(name: str):
    """Temporarily switch the kernel backend (used by tests and benchmarks)."""
    prev = _ACTIVE
    set_flow_backend(name)
    try:
        yield
    finally:
        set_flow_backend(prev)


class FlowInfeasible(RuntimeError):
    """Fewer paths exist than requested; carries the blocking vertex cut."""

    def __init__(self, message: str, found: int, cut: tuple):
        super().__init__(f"{message} (found {found}; cut {list(cut)})")
        self.found = found
        self.cut = tuple(cut)


@dataclass(frozen=True)
class PathSystem:
    """A disjoint path system returned by one of the three flow wrappers.

    kind is "paths", "fan" or "linkage"; endpoints is (x, y), (x, targets)
    or (sources, targets) respectively. Paths are vertex sequences.
    """

    kind: str
    endpoints: tuple
    paths: tuple

    def validate(self, graph: Graph, allowed=None) -> None:
        """Re-check every contract of this path system; raises ValueError."""
        for p in self.paths:
            if not p:
                raise ValueError("empty path")
            if len(set(p)) != len(p):
                raise ValueError(f"repeated vertex in path {p}")
            for u, w in zip(p, p[1:]):
                if w not in graph.adj[u]:
                    raise ValueError(f"non-edge ({u}, {w}) in path {p}")
            if allowed is not None:
                for v in p:
                    if v not in allowed:
                        raise ValueError(f"path leaves the allowed set at {v}")
        if self.kind == "paths":
            x, y = self.endpoints
            ends = {x, y}
            for p in self.paths:
                if p[0] != x or p[-1] != y:
                    raise ValueError(f"path {p} does not join {x} and {y}")
            for i, p in enumerate(self.paths):
                for q in self.paths[i + 1 :]:
                    if set(p) & set(q) != ends:
                        raise ValueError(f"paths {p} and {q} share internal vertices")
        elif self.kind == "fan":
            x, targets = self.endpoints
            tset = set(targets)
            seen_ends = set()
            for p in self.paths:
                if p[0] != x:
                    raise ValueError(f"fan path {p} does not start at {x}")
                if p[-1] not in tset:
                    raise ValueError(f"fan path {p} does not end in the target set")
                if p[-1] in seen_ends:
                    raise ValueError(f"duplicate fan terminus {p[-1]}")
                seen_ends.add(p[-1])
                for v in p[1:-1]:
                    if v in tset or v == x:
                        raise ValueError(f"fan path {p} passes through a terminal at {v}")
            for i, p in enumerate(self.paths):
                for q in self.paths[i + 1 :]:
                    if set(p) & set(q) != {x}:
                        raise ValueError(f"fan paths {p} and {q} overlap beyond {x}")
        elif self.kind == "linkage":
            sources, targets = self.endpoints
            sset, tset = set(sources), set(targets)
            for p in self.paths:
                if p[0] not in sset or p[-1] not in tset:
                    raise ValueError(f"linkage path {p} has a bad endpoint")
                for v in p[1:-1]:
                    if v in sset or v in tset:
                        raise ValueError(f"linkage path {p} passes through a terminal at {v}")
            for i, p in enumerate(self.paths):
                for q in self.paths[i + 1 :]:
                    if set(p) & set(q):
                        raise ValueError(f"linkage paths {p} and {q} intersect")
        else:
            raise ValueError(f"unknown path system kind {self.kind!r}")


class FlowNetwork:
    """Vertex-split flow network over a host graph.

    `allowed` restricts the network to an induced vertex set without
    re-indexing; `absorbed` vertices get no split arc (used for fan and
    linkage terminals, which must not be crossed internally). Extra arcs
    (super source/sink wiring) may be added before finalize().
    """

    def __init__(self, graph: Graph, allowed=None, absorbed=()):
        order = graph.order
        mask = bytearray(order)
        if allowed is None:
            for v in range(order):
                mask[v] = 1
        else:
            for v in allowed:
                mask[v] = 1
        self.vertex_count = order
        self.n_nodes = 2 * order + 2
        self.super_source = 2 * order
        self.super_sink = 2 * order + 1
        self._mask = mask
        self._to: list[int] = []
        self._cap0: list[int] = []
        self._by_node: list[list[int]] = [[] for _ in range(self.n_nodes)]
        self._split_arc = [-1] * order
        ab = set(absorbed)
        for v in range(order):
            if mask[v] and v not in ab:
                self._split_arc[v] = len(self._to)
                self._add(2 * v, 2 * v + 1, 1)
        for u in range(order):
            if not mask[u]:
                continue
            for w in graph.adj[u]:
                if w > u and mask[w]:
                    self._add(2 * u + 1, 2 * w, 1)
                    self._add(2 * w + 1, 2 * u, 1)
        self._finalized = False
        self._np_arrays = None
        self._cap = None
        self._flow = 0
        self._last = (None, None)

    def _add(self, u: int, v: int, cap: int) -> None:
        a = len(self._to)
        self._to.append(v)
        self._cap0.append(cap)
        self._by_node[u].append(a)
        self._to.append(u)
        self._cap0.append(0)
        self._by_node[v].append(a + 1)

    def add_arc(self, u: int, v: int, cap: int = 1) -> None:
        if self._finalized:
            raise RuntimeError("network already finalized")
        self._add(u, v, cap)

    def finalize(self) -> None:
        if self._finalized:
            return
        first = [0] * (self.n_nodes + 1)
        flat: list[int] = []
        for u in range(self.n_nodes):
            first[u] = len(flat)
            flat.extend(self._by_node[u])
        first[self.n_nodes] = len(flat)
        self._csr_first = first
        self._csr_arc = flat
        self._finalized = True

    def run(self, s: int, t: int, limit: int | None = None) -> int:
        """Max flow from node s to node t (fresh residual each call)."""
        self.finalize()
        lim = _INF_FLOW if limit is None else int(limit)
        if _ACTIVE == "compiled":
            import numpy as np

            if self._np_arrays is None:
                self._np_arrays = (
                    np.asarray(self._csr_first, dtype=np.int32),
                    np.asarray(self._csr_arc, dtype=np.int32),
                    np.asarray(self._to, dtype=np.int32),
                    np.asarray(self._cap0, dtype=np.int32),
                )
            cf, ca, to, cap0 = self._np_arrays
            cap = cap0.copy()
            value = _BACKENDS["compiled"].max_flow(self.n_nodes, cf, ca, to, cap, s, t, lim)
        else:
            cap = list(self._cap0)
            value = _flowpure.max_flow(
                self.n_nodes, self._csr_first, self._csr_arc, self._to, cap, s, t, lim
            )
        self._cap = cap
        self._flow = int(value)
        self._last = (s, t)
        return self._flow

    def extract_paths(self) -> list[tuple[int, ...]]:
        """Decode the last run's flow into node paths, smallest arc first."""
        s, t = self._last
        cap = self._cap
        used = [c0 - int(cap[a]) for a, c0 in enumerate(self._cap0)]
        paths = []
        for _ in range(self._flow):
            u = s
            nodes = [s]
            while u != t:
                for slot in range(self._csr_first[u], self._csr_first[u + 1]):
                    a = self._csr_arc[slot]
                    if self._cap0[a] > 0 and used[a] > 0:
                        used[a] -= 1
                        u = self._to[a]
                        nodes.append(u)
                        break
                else:  # pragma: no cover - flow conservation makes this unreachable
                    raise RuntimeError("flow decoding failed")
            paths.append(self.vertices_of(nodes))
        return paths

    def vertices_of(self, nodes) -> tuple[int, ...]:
        """Collapse a node path (in/out ids) to the host vertex sequence."""
        out: list[int] = []
        for nd in nodes:
            if nd >= 2 * self.vertex_count:
                continue
            v = nd // 2
            if not out or out[-1] != v:
                out.append(v)
        return tuple(out)

    def residual_cut_vertices(self, s: int) -> tuple[int, ...]:
        """A vertex set covering the residual reachability cut of the last run.

        Every saturated forward arc leaving the reachable side is charged to
        one of its endpoint vertices (never a terminal of the run), so
        removing the returned vertices kills every source-sink path except a
        possible direct source-sink edge. Used for failure diagnostics.
        """
        reach = {s}
        queue = deque((s,))
        cap = self._cap
        while queue:
            u = queue.popleft()
            for slot in range(self._csr_first[u], self._csr_first[u + 1]):
                a = self._csr_arc[slot]
                if int(cap[a]) > 0:
                    v = self._to[a]
                    if v not in reach:
                        reach.add(v)
                        queue.append(v)
        s_node, t_node = self._last
        terminal_vertices = {
            nd // 2 for nd in (s_node, t_node) if nd is not None and nd < 2 * self.vertex_count
        }
        cut = set()
        for a in range(0, len(self._to), 2):  # forward arcs only
            if self._cap0[a] <= 0:
                continue
            u_node = self._to[a ^ 1]
            v_node = self._to[a]
            if u_node not in reach or v_node in reach:
                continue
            for node in (v_node, u_node):
                if node < 2 * self.vertex_count and node // 2 not in terminal_vertices:
                    cut.add(node // 2)
                    break
        return tuple(sorted(cut))


def _check_vertices(graph: Graph, vertices, allowed) -> None:
    for v in vertices:
        if not 0 <= v < graph.order:
            raise ValueError(f"vertex {v} out of range")
        if allowed is not None and v not in allowed:
            raise ValueError(f"vertex {v} outside the allowed set")


def internally_disjoint_paths(graph: Graph, x: int, y: int, k: int, allowed=None) -> PathSystem:
    """k paths from x to y pairwise sharing only x and y.

    Raises FlowInfeasible (naming the blocking cut) when fewer exist.
    """
    if x == y:
        raise ValueError("need two distinct endpoints")
    if k < 0:
        raise ValueError("k must be nonnegative")
    _check_vertices(graph, (x, y), allowed)
    if k == 0:
        return PathSystem("paths", (x, y), ())
    net = FlowNetwork(graph, allowed)
    got = net.run(2 * x + 1, 2 * y, limit=k)
    if got < k:
        raise FlowInfeasible(
            f"only {got} internally disjoint ({x},{y})-paths exist, wanted {k}",
            got,
            net.residual_cut_vertices(2 * x + 1),
        )
    return PathSystem("paths", (x, y), tuple(net.extract_paths()))


def fan(graph: Graph, x: int, targets, k: int, allowed=None) -> PathSystem:
    """A k-fan from x into the target set: k paths sharing only x, ending at
    k distinct targets, with no internal vertex in the target set."""
    tgts = tuple(sorted(set(targets)))
    if x in tgts:
        raise ValueError("fan source may not belong to the target set")
    if k < 0 or k > len(tgts):
        raise ValueError(f"fan needs 0 <= k <= |targets|, got k={k}, |targets|={len(tgts)}")
    _check_vertices(graph, (x, *tgts), allowed)
    if k == 0:
        return PathSystem("fan", (x, tgts), ())
    net = FlowNetwork(graph, allowed, absorbed=tgts)
    for y in tgts:
        net.add_arc(2 * y, net.super_sink, 1)
    got = net.run(2 * x + 1, net.super_sink, limit=k)
    if got < k:
        raise FlowInfeasible(
            f"only a {got}-fan exists from {x} into {len(tgts)} targets, wanted {k}",
            got,
            net.residual_cut_vertices(2 * x + 1),
        )
    return PathSystem("fan", (x, tgts), tuple(net.extract_paths()))


def disjoint_linkage(graph: Graph, sources, targets, k: int, allowed=None) -> PathSystem:
    """k pairwise vertex-disjoint paths, each from a source to a target, with
    no internal vertex in sources | targets. A vertex lying in both sets
    yields a length-0 path."""
    xs = tuple(sorted(set(sources)))
    ys = tuple(sorted(set(targets)))
    if k < 0 or k > len(xs) or k > len(ys):
        raise ValueError(f"linkage needs 0 <= k <= min(|X|, |Y|), got k={k}")
    _check_vertices(graph, xs + ys, allowed)
    common = sorted(set(xs) & set(ys))
    degenerate = [(v,) for v in common]
    if len(degenerate) >= k:
        return PathSystem("linkage", (xs, ys), tuple(degenerate[:k]))
    k_rest = k - len(degenerate)
    rest_allowed = set(allowed) if allowed is not None else set(range(graph.order))
    rest_allowed -= set(common)
    x_rest = [v for v in xs if v not in common]
    y_rest = [v for v in ys if v not in common]
    net = FlowNetwork(graph, rest_allowed, absorbed=set(x_rest) | set(y_rest))
    for v in x_rest:
        net.add_arc(net.super_source, 2 * v + 1, 1)
    for v in y_rest:
        net.add_arc(2 * v, net.super_sink, 1)
    got = net.run(net.super_source, net.super_sink, limit=k_rest)
    if got < k_rest:
        raise FlowInfeasible(
            f"only {len(degenerate) + got} disjoint (X,Y)-paths exist, wanted {k}",
            len(degenerate) + got,
            net.residual_cut_vertices(net.super_source),
        )
    return PathSystem("linkage", (xs, ys), tuple(degenerate) + tuple(net.extract_paths()))


def local_connectivity(graph: Graph, x: int, y: int, allowed=None, limit: int | None = None) -> int:
    """Maximum number of internally disjoint (x,y)-paths (optionally capped)."""
    if x == y:
        raise ValueError("need two distinct endpoints")
    _check_vertices(graph, (x, y), allowed)
    net = FlowNetwork(graph, allowed)
    return net.run(2 * x + 1, 2 * y, limit=limit)


def _component_of(graph: Graph, start: int, vset) -> set:
    reach = {start}
    queue = deque((start,))
    while queue:
        u = queue.popleft()
        for w in graph.adj[u]:
            if w in vset and w not in reach:
                reach.add(w)
                queue.append(w)
    return reach


def vertex_connectivity(graph: Graph, allowed=None) -> int:
    """Minimum vertex cut size, computed by max flow.

    Complete graphs get the usual convention order-1; disconnected input
    returns 0. One flow network is reused across all required pairs: from a
    fixed minimum-degree vertex to each of its non-neighbours, plus each
    non-adjacent pair of its neighbours (a minimum cut either avoids the
    fixed vertex or separates two of its neighbours).
    """
    verts = sorted(allowed) if allowed is not None else list(range(graph.order))
    if len(verts) <= 1:
        return 0
    vset = set(verts)
    if len(_component_of(graph, verts[0], vset)) != len(verts):
        return 0
    deg = {v: sum(1 for w in graph.adj[v] if w in vset) for v in verts}
    x0 = min(verts, key=lambda v: (deg[v], v))
    best = deg[x0]
    net = FlowNetwork(graph, vset)
    nbrs = [w for w in graph.adj[x0] if w in vset]
    nbr_set = set(nbrs)
    for y in verts:
        if y == x0 or y in nbr_set or best == 0:
            continue
        got = net.run(2 * x0 + 1, 2 * y, limit=best)
        if got < best:
            best = got
    for i, u in enumerate(nbrs):
        for w in nbrs[i + 1 :]:
            if w in graph.adj[u] or best == 0:
                continue
            got = net.run(2 * u + 1, 2 * w, limit=best)
            if got < best:
                best = got
    return best
