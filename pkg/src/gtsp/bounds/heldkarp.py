"""Exact graphic TSP by bitmask dynamic programming over the hop metric."""

from __future__ import annotations

import os
from itertools import permutations

import numpy as np

from ..graph_core import Graph, GraphError, graphic_metric

DEFAULT_CAP = 18


def oracle_cap() -> int:
    return int(os.environ.get("GTSP_ORACLE_CAP", DEFAULT_CAP))


def held_karp_exact(g: Graph, cap: int | None = None) -> tuple[int, list[int]]:
    """Optimal tour cost and one optimal vertex order (closed, starting at 0)."""
    cap = oracle_cap() if cap is None else cap
    if g.n > cap:
        raise GraphError(f"n = {g.n} exceeds the exact-oracle cap {cap}")
    dist = graphic_metric(g)
    n = g.n
    if n == 1:
        return 0, [0, 0]
    if n == 2:
        return int(2 * dist[0, 1]), [0, 1, 0]
    k = n - 1  # vertex i+1 is bit i
    d = dist[1:, 1:]
    start = dist[0, 1:]
    big = np.iinfo(np.int64).max // 4
    dp = np.full((1 << k, k), big, dtype=np.int64)
    bits = 1 << np.arange(k, dtype=np.int64)
    for j in range(k):
        dp[1 << j, j] = start[j]
    for mask in range(1, 1 << k):
        row = dp[mask]
        if row.min() >= big:
            continue
        # cheapest extension to every vertex, then keep the ones outside mask
        ext = (row[:, None] + d).min(axis=0)
        out = np.flatnonzero((mask & bits) == 0)
        targets = mask | bits[out]
        dp[targets, out] = np.minimum(dp[targets, out], ext[out])
    full = (1 << k) - 1
    closing = dp[full] + start
    best = int(closing.min())
    # backtrack one optimal order
    j = int(closing.argmin())
    mask = full
    order = [j]
    while mask != 1 << j:
        prev_mask = mask & ~(1 << j)
        cand = dp[prev_mask] + d[:, j]
        cand = np.where([(prev_mask >> i) & 1 for i in range(k)], cand, big)
        i = int(np.flatnonzero(cand == dp[mask, j])[0])
        order.append(i)
        mask, j = prev_mask, i
    tour = [0] + [v + 1 for v in reversed(order)] + [0]
    return best, tour


def brute_force_tsp(g: Graph) -> int:
    """Permutation search over Floyd-Warshall distances; independent of the DP path."""
    n = g.n
    if n > 10:
        raise GraphError("brute force limited to n <= 10")
    inf = float("inf")
    dist = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v in g.edges:
        dist[u][v] = dist[v][u] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    if any(inf in row for row in dist):
        raise GraphError("graph is disconnected")
    if n == 1:
        return 0
    best = inf
    for perm in permutations(range(1, n)):
        c = dist[0][perm[0]] + dist[perm[-1]][0]
        for a, b in zip(perm, perm[1:]):
            c += dist[a][b]
        best = min(best, c)
    return int(best)
