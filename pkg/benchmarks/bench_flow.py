#!/usr/bin/env python3
"""Benchmark the compiled flow kernel against the pure Python twin.

The flow kernel dominates certification runtime (connectivity sweeps run
hundreds of max-flow calls over one shared network; every tree build runs
several fans), so this measures exactly the hot path:

* vertex connectivity of BP_3, BP_4, AN_5 and EA_4;
* punctured-graph connectivity of BP_4 (one cluster removed);
* a certification slice: building and checking trees for sampled BP_4
  triples.

Usage: python benchmarks/bench_flow.py [--triples N]
"""

import argparse
import time

from cayley_steiner.flows import available_backends, use_flow_backend, vertex_connectivity
from cayley_steiner.topology import build_alternating_network, punctured_bp
from cayley_steiner.trees import BPContext, EAContext, bp_trees
from cayley_steiner.verify import check, stratified_triples


def bench_kappa(graph):
    def run():
        return vertex_connectivity(graph)

    return run


def bench_certify_slice(n, triples):
    ctx = BPContext.get(n)

    def run():
        bad = 0
        for S in triples:
            sts = bp_trees(n, S, context=ctx)
            if not check(ctx.graph, sts).ok:
                bad += 1
        return bad

    return run


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--triples", type=int, default=500,
                        help="BP4 triples in the certification slice (default 500)")
    args = parser.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print(f"only {backends} available; build the extension to compare backends")

    cases = [
        ("kappa(BP3)", bench_kappa(BPContext.get(3).graph)),
        ("kappa(BP4)", bench_kappa(BPContext.get(4).graph)),
        ("kappa(AN5)", bench_kappa(build_alternating_network(5))),
        ("kappa(EA4)", bench_kappa(EAContext.get(4).graph)),
        ("kappa(BP4 minus cluster)", bench_kappa(punctured_bp(4, -4))),
        (f"certify slice: {args.triples} BP4 triples",
         bench_certify_slice(4, stratified_triples("BP", 4, args.triples, seed=99))),
    ]

    timings: dict[str, dict[str, float]] = {}
    results: dict[str, dict[str, object]] = {}
    for backend in backends:
        with use_flow_backend(backend):
            for name, fn in cases:
                fn()  # warm caches so both backends measure steady state
                t0 = time.perf_counter()
                value = fn()
                elapsed = time.perf_counter() - t0
                timings.setdefault(name, {})[backend] = elapsed
                results.setdefault(name, {})[backend] = value

    width = max(len(name) for name, _ in cases)
    header = f"{'case'.ljust(width)}  " + "  ".join(f"{b:>10}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for name, _ in cases:
        row = name.ljust(width) + "  "
        row += "  ".join(f"{timings[name][b]:9.3f}s" for b in backends)
        if len(backends) == 2:
            pure = timings[name].get("pure")
            comp = timings[name].get("compiled")
            if pure and comp:
                row += f"  {pure / comp:7.1f}x"
        print(row)
        values = set(map(str, results[name].values()))
        if len(values) > 1:
            print(f"  WARNING: backends disagree on {name}: {results[name]}")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
