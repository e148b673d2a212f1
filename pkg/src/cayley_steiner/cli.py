"""Command line front end.

Commands:

  gen      build a family graph and write a JSON, DOT or text dump
  props    print structural properties and the connectivity bound values
  kappa    print the flow-computed vertex connectivity
  trees    construct, verify and print the S-trees for three vertices
  certify  run whole-family certification and write a certificate file

Exit status: 0 on success or a passing certificate, 1 on a failing
certificate or failed check, 2 on usage errors. Identical commands (same
seed) produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .flows import flow_backend, vertex_connectivity
from .perm_core import parse_perm, parse_signed_perm
from .topology import (
    MAX_BP_N,
    MAX_EA_N,
    build_alternating_network,
    build_burnt_pancake,
    build_godan,
    cluster_decomposition,
    ea_part_decomposition,
    graph_json_dict,
    to_dot,
)
from .trees import BPContext, EAContext, bp_trees, ea_trees, stree_set_json_dict
from .verify import certify_family, check, kappa3_lower_bound, kappa3_upper_bound

_FAMILY_RANGE = {"BP": (2, MAX_BP_N), "AN": (3, MAX_EA_N), "EA": (3, MAX_EA_N)}


def _build(family: str, n: int):
    if family == "BP":
        return build_burnt_pancake(n)
    if family == "AN":
        return build_alternating_network(n)
    return build_godan(n)


def _check_n(parser: argparse.ArgumentParser, family: str, n: int) -> None:
    lo, hi = _FAMILY_RANGE[family]
    if not lo <= n <= hi:
        parser.error(f"{family} supports {lo} <= n <= {hi}, got {n}")


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_gen(parser, args) -> int:
    _check_n(parser, args.family, args.n)
    graph = _build(args.family, args.n)
    dec = None
    if args.family == "BP":
        dec = cluster_decomposition(graph)
    elif args.family == "EA":
        dec = ea_part_decomposition(graph)
    if args.format == "dot":
        text = to_dot(graph, dec)
    elif args.format == "json":
        text = json.dumps(graph_json_dict(graph), sort_keys=True, indent=2) + "\n"
    else:
        lines = [f"{args.family}{args.n} order={graph.order} size={graph.edge_count}"]
        lines.extend(f"{u} {w}" for u, w in graph.edges())
        text = "\n".join(lines) + "\n"
    path = args.output or f"{args.family}{args.n}.{args.format}"
    _write(path, text)
    degree = len(graph.adj[0])
    print(f"{args.family}{args.n}: {graph.order} vertices, {graph.edge_count} edges, "
          f"{degree}-regular")
    print(f"wrote {path}")
    return 0


def _cmd_props(parser, args) -> int:
    _check_n(parser, args.family, args.n)
    graph = _build(args.family, args.n)
    degree = len(graph.adj[0])
    print(f"{args.family}{args.n}: {graph.order} vertices, {graph.edge_count} edges, "
          f"{degree}-regular")
    if args.family == "BP":
        dec = cluster_decomposition(graph)
        sizes = {len(m) for m in dec.members.values()}
        print(f"clusters: {len(dec.ids)} of size {sorted(sizes)}")
    elif args.family == "EA":
        dec = ea_part_decomposition(graph)
        print(f"parts: even {len(dec.members[1])}, odd {len(dec.members[2])}")
    upper = kappa3_upper_bound(graph)
    print(f"kappa3 upper bound (adjacent minimum-degree pair): {upper}")
    return 0


def _cmd_kappa(parser, args) -> int:
    _check_n(parser, args.family, args.n)
    graph = _build(args.family, args.n)
    kappa = vertex_connectivity(graph)
    print(f"kappa({args.family}{args.n}) = {kappa}")
    print(f"kappa3 lower bound from kappa: {kappa3_lower_bound(kappa)}")
    return 0


def _cmd_trees(parser, args) -> int:
    if args.family == "AN":
        parser.error("trees supports the BP and EA families")
    _check_n(parser, args.family, args.n)
    parse = parse_signed_perm if args.family == "BP" else parse_perm
    try:
        labels = [parse(s) for s in (args.s1, args.s2, args.s3)]
        for lab in labels:
            if len(lab) != args.n:
                raise ValueError(f"label {lab} has length {len(lab)}, expected {args.n}")
        if len(set(labels)) != 3:
            raise ValueError("the three vertex labels must be distinct")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.family == "BP":
        ctx = BPContext.get(args.n)
        sts = bp_trees(args.n, labels, context=ctx)
    else:
        ctx = EAContext.get(args.n)
        sts = ea_trees(args.n, labels, context=ctx)
    result = check(ctx.graph, sts)
    if not result.ok:  # builders self-check, so this is belt and braces
        print(f"verification failed: {result.reason}", file=sys.stderr)
        return 1
    text = json.dumps(stree_set_json_dict(sts, ctx.graph), sort_keys=True, indent=2) + "\n"
    if args.output:
        _write(args.output, text)
        print(f"case {sts.case}: {len(sts.trees)} trees, wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_certify(parser, args) -> int:
    if args.family == "AN":
        parser.error("certify supports the BP and EA families")
    _check_n(parser, args.family, args.n)
    if args.exhaustive and args.sample is not None:
        parser.error("choose one of --exhaustive or --sample")
    if not args.exhaustive and args.sample is None:
        parser.error("choose --exhaustive or --sample COUNT")
    mode = "exhaustive" if args.exhaustive else "sample"
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    cert = certify_family(
        args.family,
        args.n,
        mode,
        sample_count=args.sample,
        seed=args.seed if mode == "sample" else None,
        workers=workers,
    )
    path = args.output or f"certificate_{args.family}{args.n}.json"
    _write(path, cert.to_json())
    print(f"{args.family}{args.n} [{mode}] triples={cert.triples_checked} "
          f"kappa={cert.kappa} upper={cert.kappa3_upper} lower={cert.kappa3_lower}")
    for case in sorted(cert.case_tallies):
        print(f"  {case}: {cert.case_tallies[case]}")
    if cert.failures:
        print(f"  failures: {len(cert.failures)} (first: {cert.failures[0]})")
    verdict = "PASS" if cert.passing else "FAIL"
    claimed = cert.claimed_kappa3 if cert.claimed_kappa3 is not None else "-"
    print(f"{verdict}: claimed kappa3 = {claimed}; wrote {path}")
    return 0 if cert.passing else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayley-steiner",
        description="Burnt pancake / godan graph construction, Steiner tree "
                    "packing and connectivity certification "
                    f"(flow backend: {flow_backend()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family graph dump")
    p.add_argument("family", choices=("BP", "AN", "EA"))
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=("json", "dot", "text"), default="json")
    p.add_argument("--output", "-o")

    p = sub.add_parser("props", help="print structural properties")
    p.add_argument("family", choices=("BP", "AN", "EA"))
    p.add_argument("n", type=int)

    p = sub.add_parser("kappa", help="print the flow-computed connectivity")
    p.add_argument("family", choices=("BP", "AN", "EA"))
    p.add_argument("n", type=int)

    p = sub.add_parser("trees", help="construct and verify S-trees for three vertices")
    p.add_argument("family", choices=("BP", "EA", "AN"))
    p.add_argument("n", type=int)
    p.add_argument("s1")
    p.add_argument("s2")
    p.add_argument("s3")
    p.add_argument("--output", "-o")

    p = sub.add_parser("certify", help="certify a whole family at one dimension")
    p.add_argument("family", choices=("BP", "EA", "AN"))
    p.add_argument("n", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--sample", type=int, default=None, metavar="COUNT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output", "-o")

    return parser


_HANDLERS = {
    "gen": _cmd_gen,
    "props": _cmd_props,
    "kappa": _cmd_kappa,
    "trees": _cmd_trees,
    "certify": _cmd_certify,
}


def _protect_signed_labels(argv: list[str]) -> list[str]:
    """argparse reads "-1,2,3" as an option flag, so for the trees command
    pull the known options out and put every other token after a "--"
    separator. A user-supplied "--" disables the rewrite."""
    if not argv or argv[0] != "trees" or "--" in argv:
        return argv
    if not any(re.match(r"^-\d", tok) for tok in argv):
        return argv
    options: list[str] = []
    positionals: list[str] = []
    i = 1
    while i < len(argv):
        tok = argv[i]
        if tok in ("-o", "--output") and i + 1 < len(argv):
            options.extend(argv[i : i + 2])
            i += 2
            continue
        if tok.startswith("--output=") or tok in ("-h", "--help"):
            options.append(tok)
        else:
            positionals.append(tok)
        i += 1
    return ["trees"] + options + ["--"] + positionals


def main(argv=None) -> int:
    args_list = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_protect_signed_labels(args_list))
    return _HANDLERS[args.command](parser, args)


if __name__ == "__main__":
    sys.exit(main())
