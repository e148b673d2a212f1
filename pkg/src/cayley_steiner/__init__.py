"""Burnt pancake and godan graph toolkit.

Builds the burnt pancake graph BP_n, the alternating group network AN_n
and the godan graph EA_n; packs internally edge disjoint Steiner trees
over any three vertices by the constructive cluster routings (plus an
exact search oracle); and certifies at desk scale that both BP_n and EA_n
support n-1 such trees for every triple, matching the degree upper bound,
so their generalized 3-connectivity is n-1.
"""

from .flows import (
    FlowInfeasible,
    PathSystem,
    available_backends,
    disjoint_linkage,
    fan,
    flow_backend,
    internally_disjoint_paths,
    local_connectivity,
    set_flow_backend,
    use_flow_backend,
    vertex_connectivity,
)
from .perm_core import (
    an_generators,
    compose,
    ea_generators,
    parity,
    parse_cycles,
    parse_perm,
    parse_signed_perm,
    perm_rank,
    perm_unrank,
    signed_perm_rank,
    signed_perm_unrank,
    signed_prefix_reversal,
)
from .topology import (
    ClusterDecomposition,
    Graph,
    build_alternating_network,
    build_burnt_pancake,
    build_godan,
    cluster_decomposition,
    cluster_relabel,
    cross_edge_set,
    ea_part_decomposition,
    graph_from_edges,
    graph_json_dict,
    out_neighbour_bp,
    out_neighbour_ea,
    punctured_bp,
    to_dot,
)
from .trees import (
    BPContext,
    EAContext,
    PackingInfeasible,
    STreeSet,
    SearchBudgetExceeded,
    TreeConstructionError,
    bp_trees,
    bp_trees_same_cluster,
    bp_trees_three_clusters,
    bp_trees_two_clusters,
    ea_trees,
    generic_stree_packing,
    steiner_tree_bfs,
    stree_set_json_dict,
)
from .verify import (
    Certificate,
    CheckResult,
    certify_family,
    check,
    kappa3_lower_bound,
    kappa3_upper_bound,
    stratified_triples,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # permutations
    "signed_prefix_reversal", "compose", "parity", "an_generators", "ea_generators",
    "perm_rank", "perm_unrank", "signed_perm_rank", "signed_perm_unrank",
    "parse_cycles", "parse_perm", "parse_signed_perm",
    # topology
    "Graph", "ClusterDecomposition", "build_burnt_pancake", "build_alternating_network",
    "build_godan", "cluster_decomposition", "ea_part_decomposition", "out_neighbour_bp",
    "out_neighbour_ea", "cross_edge_set", "cluster_relabel", "punctured_bp",
    "graph_from_edges", "graph_json_dict", "to_dot",
    # flows
    "PathSystem", "FlowInfeasible", "vertex_connectivity", "local_connectivity",
    "internally_disjoint_paths", "fan", "disjoint_linkage",
    "flow_backend", "available_backends", "set_flow_backend", "use_flow_backend",
    # trees
    "STreeSet", "TreeConstructionError", "PackingInfeasible", "SearchBudgetExceeded",
    "BPContext", "EAContext", "bp_trees", "bp_trees_same_cluster",
    "bp_trees_two_clusters", "bp_trees_three_clusters", "ea_trees",
    "generic_stree_packing", "steiner_tree_bfs", "stree_set_json_dict",
    # verify
    "CheckResult", "check", "kappa3_upper_bound", "kappa3_lower_bound",
    "Certificate", "certify_family", "stratified_triples",
]
