from __future__ import annotations

import itertools
import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gtsp.graph_core import Graph
from gtsp.harness.generators import generate_random_2vc

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def theta(paths: int, k: int) -> Graph:
    """Hubs 0 and 1 joined by ``paths`` internally disjoint paths of length ``k``."""
    edges, nxt = [], 2
    for _ in range(paths):
        prev = 0
        for _ in range(k - 1):
            edges.append((prev, nxt))
            prev, nxt = nxt, nxt + 1
        edges.append((prev, 1))
    return Graph.from_edges(nxt, edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


# dense Hamiltonian graph on which the selected tour pays 16 (found by a random sweep)
F1_RATIO_G = Graph.from_edges(10, [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 8), (0, 9), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6),
    (1, 8), (1, 9), (2, 3), (2, 4), (2, 5), (2, 6), (2, 8), (2, 9), (3, 4), (3, 5), (3, 6), (3, 8), (3, 9),
    (4, 7), (4, 8), (4, 9), (5, 7), (5, 8), (5, 9), (6, 7), (6, 8), (6, 9), (7, 8), (7, 9),
])


# independent oracles, deliberately naive

def connected_oracle(n: int, edges, removed=()) -> bool:
    alive = [v for v in range(n) if v not in removed]
    if not alive:
        return True
    seen = {alive[0]}
    stack = [alive[0]]
    while stack:
        x = stack.pop()
        for u, v in edges:
            for a, b in ((u, v), (v, u)):
                if a == x and b not in seen and b not in removed:
                    seen.add(b)
                    stack.append(b)
    return len(seen) == len(alive)


def two_vc_oracle(n: int, edges) -> bool:
    """Connected with every vertex present, n >= 3, and no single vertex removal disconnects."""
    edges = list(edges)
    touched = {x for e in edges for x in e}
    if n < 3 or len(touched) < n:
        return False
    return connected_oracle(n, edges) and all(connected_oracle(n, edges, {v}) for v in range(n))


def floyd(n: int, edges):
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v in edges:
        d[u][v] = d[v][u] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                d[i][j] = min(d[i][j], d[i][k] + d[k][j])
    return d


@st.composite
def two_connected_graphs(draw, n_min: int = 4, n_max: int = 9):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.sampled_from([0.4, 0.5, 0.6, 0.75, 0.9]))
    seed = draw(st.integers(0, 2**32 - 1))
    return generate_random_2vc(n, p, seed)


@pytest.fixture
def k4() -> Graph:
    return complete(4)
