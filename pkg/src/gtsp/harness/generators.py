"""Instance generators: the theta family with a known gap, and random 2-connected graphs."""

from __future__ import annotations

import random

from ..graph_core import Graph, GraphError, is_two_vertex_connected

VERIFY_UP_TO = 5


class GenerationError(GraphError):
    pass


def tight_example_edges(k: int) -> tuple[int, list[tuple[int, int]]]:
    """Theta core (hubs joined by three k-paths) plus two chords closing a Hamiltonian cycle.

    Labels put the first chord at vertices 0 and 1 so it has the smallest edge
    id and greedy deletion removes it first; the minimal 2-connected subgraph
    left over is the theta core itself.
    """
    if k < 3 or k % 2 == 0:
        raise GraphError(f"k must be an odd integer >= 3, got {k}")
    p2_1, p3_1, a, b = 0, 1, 2, 3
    nxt = 4

    def path(first: int | None) -> list[int]:
        nonlocal nxt
        inner = [] if first is None else [first]
        while len(inner) < k - 1:
            inner.append(nxt)
            nxt += 1
        return [a, *inner, b]

    p1, p2, p3 = path(None), path(p2_1), path(p3_1)
    edges = [e for p in (p1, p2, p3) for e in zip(p, p[1:])]
    edges += [(p2_1, p3_1), (p3[-2], a)]
    return nxt, edges


def generate_tight_example(k: int, verify: bool = True) -> Graph:
    """Family member where the pipeline pays 4k-2 against an optimum of 3k-1."""
    n, edges = tight_example_edges(k)
    g = Graph.from_edges(n, edges)
    if not verify:
        return g
    from ..tour import run_algorithm3

    cost = run_algorithm3(g).tour.cost
    if cost != 4 * k - 2:
        raise GenerationError(f"pipeline cost {cost} != {4 * k - 2} for k={k}")
    if k <= VERIFY_UP_TO:
        from ..bounds.heldkarp import held_karp_exact

        opt, _ = held_karp_exact(g, cap=max(n, 18))
        if opt != 3 * k - 1:
            raise GenerationError(f"optimum {opt} != {3 * k - 1} for k={k}")
    return g


def generate_random_2vc(n: int, p: float, seed: int, budget: int = 10_000) -> Graph:
    """G(n, p) samples drawn from ``random.Random(seed)`` until one is 2-connected."""
    if n < 3:
        raise GraphError("n must be at least 3")
    if not 0 < p <= 1:
        raise GraphError("p must lie in (0, 1]")
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for _ in range(budget):
        edges = [e for e in pairs if rng.random() < p]
        if len(edges) >= n and is_two_vertex_connected(edges, n):
            return Graph.from_edges(n, edges)
    raise GenerationError(f"no 2-connected sample in {budget} draws (n={n}, p={p})")
