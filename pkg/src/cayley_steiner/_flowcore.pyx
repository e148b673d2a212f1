# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled Dinic max-flow kernel.

Twin of _flowpure.max_flow: identical algorithm, arc order and tie
breaking, so both backends produce bit-identical residual capacities.
Keep the two in sync when changing either.
"""

import numpy as np

__all__ = ["max_flow"]


def max_flow(int n_nodes, int[::1] csr_first, int[::1] csr_arc,
             int[::1] arc_to, int[::1] arc_cap, int s, int t, long limit):
    """Run Dinic from s to t, stopping once the flow reaches `limit`.

    Returns the achieved flow value. arc_cap (int32) is mutated in place
    and holds the residual capacities on return.
    """
    cdef long total = 0
    cdef int i, u, v, a, k, lu, qh, qt, depth, aug, c
    cdef bint reached, advanced, stuck

    if limit <= 0:
        return 0

    level_arr = np.empty(n_nodes, dtype=np.int32)
    iters_arr = np.empty(n_nodes, dtype=np.int32)
    queue_arr = np.empty(n_nodes, dtype=np.int32)
    path_arr = np.empty(n_nodes + 1, dtype=np.int32)
    cdef int[::1] level = level_arr
    cdef int[::1] iters = iters_arr
    cdef int[::1] queue = queue_arr
    cdef int[::1] path = path_arr

    while True:
        # BFS phase: distance labels over residual arcs.
        for i in range(n_nodes):
            level[i] = -1
        level[s] = 0
        queue[0] = s
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            lu = level[u]
            for k in range(csr_first[u], csr_first[u + 1]):
                a = csr_arc[k]
                if arc_cap[a] > 0:
                    v = arc_to[a]
                    if level[v] < 0:
                        level[v] = lu + 1
                        queue[qt] = v
                        qt += 1
        if level[t] < 0:
            return total
        for i in range(n_nodes):
            iters[i] = csr_first[i]
        # Blocking flow: iterative DFS along level-increasing arcs.
        while total < limit:
            depth = 0
            u = s
            reached = False
            stuck = False
            while True:
                if u == t:
                    reached = True
                    break
                advanced = False
                while iters[u] < csr_first[u + 1]:
                    a = csr_arc[iters[u]]
                    v = arc_to[a]
                    if arc_cap[a] > 0 and level[v] == level[u] + 1:
                        path[depth] = a
                        depth += 1
                        u = v
                        advanced = True
                        break
                    iters[u] += 1
                if advanced:
                    continue
                level[u] = -1  # dead end for this phase
                if depth == 0:
                    stuck = True
                    break
                depth -= 1
                a = path[depth]
                u = arc_to[a ^ 1]
                iters[u] += 1
            if stuck or not reached:
                break
            aug = arc_cap[path[0]]
            for k in range(1, depth):
                c = arc_cap[path[k]]
                if c < aug:
                    aug = c
            if aug > limit - total:
                aug = <int> (limit - total)
            for k in range(depth):
                a = path[k]
                arc_cap[a] -= aug
                arc_cap[a ^ 1] += aug
            total += aug
        if total >= limit:
            return total
