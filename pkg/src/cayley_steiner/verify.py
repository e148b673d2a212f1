"""Validation of tree packings, bound calculators, and family certification.

check() re-derives every property a claimed tree set must have (each tree
is a subgraph tree containing the terminals; pairwise the trees share
exactly the terminal vertices and no edge). certify_family() builds a
family graph, re-checks its structural formulas, computes connectivity by
flow, runs the constructive tree builder plus check() over an exhaustive
or stratified-sampled triple space, and emits a Certificate whose claimed
generalized 3-connectivity is reported only when the constructed tree
count meets the degree upper bound.

Certificates contain no timestamps or environment data, and every choice
downstream is deterministic, so identical runs produce byte-identical
certificate JSON.
"""

from __future__ import annotations

import json
import random
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb, factorial

from . import trees as trees_mod
from .flows import FlowInfeasible, vertex_connectivity
from .topology import Graph, build_alternating_network, cluster_order
from .trees import (
    BPContext,
    EAContext,
    PackingInfeasible,
    SearchBudgetExceeded,
    STreeSet,
    TreeConstructionError,
)

__all__ = [
    "CheckResult",
    "check",
    "kappa3_upper_bound",
    "kappa3_lower_bound",
    "Certificate",
    "certify_family",
    "stratified_triples",
    "bp_structure_report",
    "ea_structure_report",
    "CERTIFICATE_SCHEMA",
]

CERTIFICATE_SCHEMA = 1


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check(graph: Graph, sts: STreeSet) -> CheckResult:
    """Pass iff every tree is a tree of the graph containing all terminals
    and every pair of trees shares exactly the terminal vertices and no
    edge. Failure is a result with a reason, not an exception."""
    S = set(sts.terminals)
    vertex_sets = []
    edge_sets = []
    for ti, tree in enumerate(sts.trees):
        edges = set(tree)
        if len(edges) != len(tree):
            return CheckResult(False, f"tree {ti}: duplicate edge")
        verts: set[int] = set()
        for u, w in edges:
            if not (0 <= u < graph.order) or w not in graph.adj[u]:
                return CheckResult(False, f"tree {ti}: ({u},{w}) is not an edge of the graph")
            verts.add(u)
            verts.add(w)
        if not S <= verts:
            missing = min(S - verts)
            return CheckResult(False, f"tree {ti}: terminal {missing} not covered")
        if len(edges) != len(verts) - 1:
            return CheckResult(False, f"tree {ti}: {len(edges)} edges on {len(verts)} vertices")
        nbrs: dict[int, list[int]] = {v: [] for v in verts}
        for u, w in edges:
            nbrs[u].append(w)
            nbrs[w].append(u)
        start = min(verts)
        seen = {start}
        queue = deque((start,))
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if seen != verts:
            return CheckResult(False, f"tree {ti}: disconnected")
        vertex_sets.append(verts)
        edge_sets.append(edges)
    for i in range(len(sts.trees)):
        for j in range(i + 1, len(sts.trees)):
            shared = vertex_sets[i] & vertex_sets[j]
            if shared != S:
                offender = min(shared - S)
                return CheckResult(
                    False, f"trees {i} and {j}: share non-terminal vertex {offender}"
                )
            common_edges = edge_sets[i] & edge_sets[j]
            if common_edges:
                return CheckResult(
                    False, f"trees {i} and {j}: share edge {min(common_edges)}"
                )
    return CheckResult(True)


def kappa3_upper_bound(graph: Graph) -> int | None:
    """delta-1 when two adjacent vertices both have minimum degree; None
    otherwise. Upper-bounds the generalized 3-connectivity."""
    degs = [len(nbrs) for nbrs in graph.adj]
    d = min(degs)
    for u in range(graph.order):
        if degs[u] != d:
            continue
        for w in graph.adj[u]:
            if degs[w] == d:
                return d - 1
    return None


def kappa3_lower_bound(kappa: int) -> int:
    """Lower bound on generalized 3-connectivity implied by connectivity:
    writing kappa = 4q + r with r in 0..3, the bound is 3q + ceil(r/2)."""
    if kappa < 1:
        raise ValueError(f"connectivity must be at least 1, got {kappa}")
    q, r = divmod(kappa, 4)
    return 3 * q + (r + 1) // 2


@dataclass(frozen=True, eq=False)
class Certificate:
    """Per-family verification report; see to_json_dict for the schema."""

    schema: int
    family: str
    n: int
    mode: str
    sample_count: int | None
    seed: int | None
    structure: dict
    kappa: int
    kappa_expected: int
    kappa3_upper: int | None
    kappa3_lower: int
    triples_checked: int
    case_tallies: dict
    failures: tuple
    claimed_kappa3: int | None
    passing: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": self.schema,
            "family": self.family,
            "n": self.n,
            "mode": self.mode,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "structure": self.structure,
            "kappa": self.kappa,
            "kappa_expected": self.kappa_expected,
            "kappa3_upper": self.kappa3_upper,
            "kappa3_lower": self.kappa3_lower,
            "triples_checked": self.triples_checked,
            "case_tallies": dict(sorted(self.case_tallies.items())),
            "failures": list(self.failures),
            "claimed_kappa3": self.claimed_kappa3,
            "passing": self.passing,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def bp_structure_report(ctx: BPContext) -> dict:
    """Re-derive the structural formulas of BP_n from the built graph."""
    g = ctx.graph
    n = ctx.n
    problems = []
    if g.order != factorial(n) << n:
        problems.append(f"order {g.order} != 2^n*n!")
    if g.edge_count != n * factorial(n) * (1 << (n - 1)):
        problems.append(f"size {g.edge_count} != n*n!*2^(n-1)")
    if any(g.degree(v) != n for v in range(g.order)):
        problems.append("not n-regular")
    size = factorial(n - 1) << (n - 1)
    if any(len(ctx.members[j]) != size for j in ctx.members):
        problems.append("cluster sizes off")
    # Cross-edge counts for every unordered cluster pair, via one edge scan.
    counts: dict[tuple[int, int], int] = {}
    for u, w in g.edges():
        cu, cw = ctx.cluster_of[u], ctx.cluster_of[w]
        if cu != cw:
            key = tuple(sorted((cu, cw)))
            counts[key] = counts.get(key, 0) + 1
    expected = factorial(n - 2) << (n - 2) if n >= 2 else 0
    ids = cluster_order(n)
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            i, j = ids[a], ids[b]
            want = 0 if i == -j else expected
            got = counts.get(tuple(sorted((i, j))), 0)
            if got != want:
                problems.append(f"cross edges ({i},{j}): {got} != {want}")
    # Each cluster induces a connected (n-1)-regular subgraph.
    for j in ids:
        members = set(ctx.members[j])
        inner_deg = {v: sum(1 for w in g.adj[v] if w in members) for v in members}
        if any(d != n - 1 for d in inner_deg.values()):
            problems.append(f"cluster {j}: not (n-1)-regular inside")
        start = next(iter(ctx.members[j]))
        seen = {start}
        queue = deque((start,))
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if w in members and w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(members):
            problems.append(f"cluster {j}: disconnected")
    return {
        "ok": not problems,
        "order": g.order,
        "size": g.edge_count,
        "degree": n,
        "clusters": len(ids),
        "cluster_size": size,
        "problems": problems,
    }


def ea_structure_report(ctx: EAContext) -> dict:
    """Re-derive the structural claims of EA_n: counts, the even/odd parts,
    the cross-edge perfect matching, equality of the even part with AN_n,
    and the matching-map isomorphism of the odd part onto AN_n."""
    g = ctx.graph
    n = ctx.n
    problems = []
    if g.order != factorial(n):
        problems.append("order != n!")
    if g.edge_count != n * factorial(n) // 2:
        problems.append("size != n*n!/2")
    if any(g.degree(v) != n for v in range(g.order)):
        problems.append("not n-regular")
    even, odd = ctx.part_sets[1], ctx.part_sets[2]
    cross = set()
    even_edges = set()
    odd_edges_mapped = set()
    for u, w in g.edges():
        pu, pw = ctx.part_of[u], ctx.part_of[w]
        if pu != pw:
            cross.add((u, w))
        elif pu == 1:
            even_edges.add((g.labels[u], g.labels[w]))
        else:
            mu, mw = ctx.out_idx[u], ctx.out_idx[w]
            a, b = g.labels[mu], g.labels[mw]
            odd_edges_mapped.add((a, b) if a < b else (b, a))
    matching = {tuple(sorted((v, ctx.out_idx[v]))) for v in even}
    if cross != matching:
        problems.append("cross edges are not exactly the matching {u, u*(12)}")
    if len(cross) != g.order // 2:
        problems.append("cross edges do not form a perfect matching")
    an = build_alternating_network(n)
    an_edges = set()
    for u, w in an.edges():
        a, b = an.labels[u], an.labels[w]
        an_edges.add((a, b) if a < b else (b, a))
    even_norm = {(a, b) if a < b else (b, a) for a, b in even_edges}
    if even_norm != an_edges:
        problems.append("even part edge set differs from the alternating group network")
    if odd_edges_mapped != an_edges:
        problems.append("odd part is not carried onto the alternating group network")
    return {
        "ok": not problems,
        "order": g.order,
        "size": g.edge_count,
        "degree": n,
        "part_size": g.order // 2,
        "cross_edges": len(cross),
        "problems": problems,
    }


def _context(family: str, n: int):
    return BPContext.get(n) if family == "BP" else EAContext.get(n)


def _build_one(family: str, n: int, triple: tuple) -> STreeSet:
    ctx = _context(family, n)
    if family == "BP":
        return trees_mod.bp_trees(n, triple, context=ctx)
    return trees_mod.ea_trees(n, triple, context=ctx)


def _run_chunk(args) -> tuple[dict, list, int]:
    family, n, chunk = args
    ctx = _context(family, n)
    graph = ctx.graph
    tallies: dict[str, int] = {}
    failures: list[dict] = []
    expected = n - 1
    for triple in chunk:
        try:
            sts = _build_one(family, n, triple)
        except (TreeConstructionError, FlowInfeasible, PackingInfeasible,
                SearchBudgetExceeded) as exc:
            failures.append({"triple": list(triple), "error": str(exc)})
            continue
        tallies[sts.case] = tallies.get(sts.case, 0) + 1
        if len(sts.trees) != expected:
            failures.append(
                {"triple": list(triple), "error": f"{len(sts.trees)} trees, expected {expected}"}
            )
            continue
        result = check(graph, sts)
        if not result.ok:
            failures.append({"triple": list(triple), "error": result.reason})
    return tallies, failures, len(chunk)


def _bp_strata(n: int) -> tuple[str, ...]:
    if n == 3:
        return ("same-cluster", "two-clusters", "three-clusters")
    if n == 4:
        return (
            "same-cluster",
            "two-clusters",
            "three-clusters:opposite-pair",
            "three-clusters:no-opposite-pair",
        )
    return ("same-cluster", "two-clusters", "three-clusters:general")


def _draw_bp_triple(ctx: BPContext, stratum: str, rng: random.Random) -> tuple:
    ids = list(cluster_order(ctx.n))
    if stratum == "same-cluster":
        j = rng.choice(ids)
        return tuple(sorted(rng.sample(ctx.members[j], 3)))
    if stratum == "two-clusters":
        j, k = rng.sample(ids, 2)
        pair = rng.sample(ctx.members[j], 2)
        solo = rng.choice(ctx.members[k])
        return tuple(sorted(pair + [solo]))
    if stratum == "three-clusters:opposite-pair":
        a = rng.choice(range(1, ctx.n + 1))
        rest = [c for c in ids if abs(c) != a]
        homes = [a, -a, rng.choice(rest)]
    elif stratum == "three-clusters:no-opposite-pair":
        vals = rng.sample(range(1, ctx.n + 1), 3)
        homes = [v if rng.random() < 0.5 else -v for v in vals]
    else:  # any three distinct clusters
        homes = rng.sample(ids, 3)
    return tuple(sorted(rng.choice(ctx.members[j]) for j in homes))


def _ea_strata() -> tuple[str, ...]:
    return ("same-part:1", "same-part:2", "split:1", "split:2")


def _draw_ea_triple(ctx: EAContext, stratum: str, rng: random.Random) -> tuple:
    kind, part = stratum.split(":")
    p = int(part)
    if kind == "same-part":
        return tuple(sorted(rng.sample(ctx.part_members[p], 3)))
    pair = rng.sample(ctx.part_members[p], 2)
    solo = rng.choice(ctx.part_members[3 - p])
    return tuple(sorted(pair + [solo]))


def _stratum_capacity(family: str, n: int, stratum: str, ctx) -> int:
    """Exact number of distinct triples in one stratum (the strata partition
    the whole triple space, which keeps the quota arithmetic honest)."""
    if family == "BP":
        ids = cluster_order(n)
        m = len(ctx.members[ids[0]])
        if stratum == "same-cluster":
            return len(ids) * comb(m, 3)
        if stratum == "two-clusters":
            return len(ids) * (len(ids) - 1) * comb(m, 2) * m
        if stratum == "three-clusters:opposite-pair":
            cluster_triples = n * (2 * n - 2)
        elif stratum == "three-clusters:no-opposite-pair":
            cluster_triples = comb(n, 3) * 8
        else:  # any three distinct clusters
            cluster_triples = comb(len(ids), 3)
        return cluster_triples * m**3
    half = len(ctx.part_members[1])
    kind = stratum.split(":")[0]
    if kind == "same-part":
        return comb(half, 3)
    return comb(half, 2) * half


def stratified_triples(family: str, n: int, count: int, seed: int) -> list:
    """Seeded triple sample stratified by construction case so that rare
    cases are forced into coverage. Quotas are split evenly over the strata,
    capped at each stratum's exact capacity with overflow redistributed;
    triples are distinct."""
    ctx = _context(family, n)
    rng = random.Random(seed)
    strata = _bp_strata(n) if family == "BP" else _ea_strata()
    caps = [_stratum_capacity(family, n, s, ctx) for s in strata]
    total_space = comb(ctx.graph.order, 3)
    assert sum(caps) == total_space, "strata must partition the triple space"
    count = min(count, total_space)
    quotas = [min(count // len(strata), cap) for cap in caps]
    leftover = count - sum(quotas)
    while leftover > 0:
        for i in range(len(strata)):
            if leftover > 0 and quotas[i] < caps[i]:
                quotas[i] += 1
                leftover -= 1
    seen: set[tuple] = set()
    out: list[tuple] = []
    for stratum, quota in zip(strata, quotas):
        budget = 200 * quota + 1000  # duplicates are rare; this never binds
        attempts = 0
        while quota > 0:
            attempts += 1
            if attempts > budget:
                raise RuntimeError(f"sampling stalled in stratum {stratum}")
            if family == "BP":
                triple = _draw_bp_triple(ctx, stratum, rng)
            else:
                triple = _draw_ea_triple(ctx, stratum, rng)
            if len(set(triple)) != 3 or triple in seen:
                continue
            seen.add(triple)
            out.append(triple)
            quota -= 1
    return out


def _exhaustive_triples(order: int):
    for a in range(order - 2):
        for b in range(a + 1, order - 1):
            for c in range(b + 1, order):
                yield (a, b, c)


def certify_family(family: str, n: int, mode: str = "exhaustive", *,
                   sample_count: int | None = None, seed: int | None = None,
                   workers: int = 1) -> Certificate:
    """Build the family graph, re-check its structural formulas, compute
    connectivity, construct and check trees for every covered triple, and
    aggregate everything into a Certificate."""
    if family not in ("BP", "EA"):
        raise ValueError(f"certifiable families are BP and EA, got {family!r}")
    if mode not in ("exhaustive", "sample"):
        raise ValueError(f"mode must be 'exhaustive' or 'sample', got {mode!r}")
    if mode == "sample":
        if not sample_count or sample_count <= 0:
            raise ValueError("sample mode needs a positive sample_count")
        if seed is None:
            raise ValueError("sample mode needs a seed")
    ctx = _context(family, n)
    graph = ctx.graph
    structure = bp_structure_report(ctx) if family == "BP" else ea_structure_report(ctx)
    kappa = vertex_connectivity(graph)
    kappa_expected = n  # both families are n-connected
    upper = kappa3_upper_bound(graph)
    lower = kappa3_lower_bound(kappa) if kappa >= 1 else 0

    if mode == "exhaustive":
        triples = list(_exhaustive_triples(graph.order))
    else:
        triples = stratified_triples(family, n, sample_count, seed)

    failures: list[dict] = list(
        {"triple": [], "error": p} for p in structure.get("problems", [])
    )
    tallies: dict[str, int] = {}
    checked = 0
    if workers <= 1 or len(triples) < 64:
        t, f, c = _run_chunk((family, n, triples))
        _merge(tallies, t)
        failures.extend(f)
        checked += c
    else:
        chunk_size = max(1, (len(triples) + workers * 4 - 1) // (workers * 4))
        chunks = [triples[i : i + chunk_size] for i in range(0, len(triples), chunk_size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for t, f, c in pool.map(_run_chunk, [(family, n, ch) for ch in chunks]):
                _merge(tallies, t)
                failures.extend(f)
                checked += c

    target = n - 1
    passing = (
        structure["ok"]
        and kappa == kappa_expected
        and upper == target
        and lower <= target
        and checked > 0
        and not failures
    )
    return Certificate(
        schema=CERTIFICATE_SCHEMA,
        family=family,
        n=n,
        mode=mode,
        sample_count=sample_count if mode == "sample" else None,
        seed=seed if mode == "sample" else None,
        structure=structure,
        kappa=kappa,
        kappa_expected=kappa_expected,
        kappa3_upper=upper,
        kappa3_lower=lower,
        triples_checked=checked,
        case_tallies=tallies,
        failures=tuple(failures),
        claimed_kappa3=target if passing else None,
        passing=passing,
    )


def _merge(into: dict, new: dict) -> None:
    for k, v in new.items():
        into[k] = into.get(k, 0) + v
