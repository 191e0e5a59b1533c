"""Bottleneck assignment: threshold bipartite matching via Hopcroft-Karp."""

from __future__ import annotations

from collections import deque

import numpy as np

_INF = float("inf")


def hopcroft_karp(adj: list[list[int]], n_left: int, n_right: int) -> int:
    """Maximum bipartite matching size; adj[u] lists right-neighbors of u."""
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0.0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = _INF
        return False

    matched = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                matched += 1
    return matched


def bottleneck_value(cost: np.ndarray) -> float:
    """Min over perfect matchings of the max edge cost, for a square cost
    matrix.  Binary search over the sorted pairwise costs; feasibility by
    perfect matching on the threshold graph (edges with cost <= candidate)."""
    cost = np.asarray(cost, dtype=np.float64)
    n = cost.shape[0]
    if n == 0:
        return 0.0
    cands = np.unique(cost.ravel())

    def feasible(c: float) -> bool:
        adj = [list(np.nonzero(cost[u] <= c)[0]) for u in range(n)]
        return hopcroft_karp(adj, n, n) == n

    lo, hi = 0, cands.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(float(cands[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(cands[lo])
