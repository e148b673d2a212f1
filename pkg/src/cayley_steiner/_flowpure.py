"""Pure Python Dinic max-flow kernel.

Twin of the compiled kernel in _flowcore.pyx: identical algorithm, arc
order and tie breaking, so both backends produce bit-identical residual
capacities and therefore identical decoded path systems. Keep the two in
sync when changing either.

Arcs are stored in creation order as parallel arrays; arc a's reverse is
a ^ 1. Adjacency is a CSR over arc ids (csr_first, csr_arc). arc_cap is
mutated in place and holds the residual capacities on return.
"""

from __future__ import annotations

from collections import deque

__all__ = ["max_flow"]


def max_flow(n_nodes, csr_first, csr_arc, arc_to, arc_cap, s, t, limit):
    """Run Dinic from s to t, stopping once the flow reaches `limit`.

    Returns the achieved flow value. arc_cap is left as the residual.
    """
    if limit <= 0:
        return 0
    total = 0
    level = [-1] * n_nodes
    iters = [0] * n_nodes
    while True:
        # BFS phase: distance labels over residual arcs.
        for i in range(n_nodes):
            level[i] = -1
        level[s] = 0
        queue = deque((s,))
        while queue:
            u = queue.popleft()
            lu = level[u]
            for k in range(csr_first[u], csr_first[u + 1]):
                a = csr_arc[k]
                if arc_cap[a] > 0:
                    v = arc_to[a]
                    if level[v] < 0:
                        level[v] = lu + 1
                        queue.append(v)
        if level[t] < 0:
            return total
        for i in range(n_nodes):
            iters[i] = csr_first[i]
        # Blocking flow: iterative DFS along level-increasing arcs.
        while total < limit:
            path = []
            u = s
            reached = False
            while True:
                if u == t:
                    reached = True
                    break
                advanced = False
                while iters[u] < csr_first[u + 1]:
                    a = csr_arc[iters[u]]
                    v = arc_to[a]
                    if arc_cap[a] > 0 and level[v] == level[u] + 1:
                        path.append(a)
                        u = v
                        advanced = True
                        break
                    iters[u] += 1
                if advanced:
                    continue
                level[u] = -1  # dead end for this phase
                if not path:
                    break
                a = path.pop()
                u = arc_to[a ^ 1]
                iters[u] += 1
            if not reached:
                break
            aug = min(arc_cap[a] for a in path)
            if aug > limit - total:
                aug = limit - total
            for a in path:
                arc_cap[a] -= aug
                arc_cap[a ^ 1] += aug
            total += aug
        if total >= limit:
            return total
