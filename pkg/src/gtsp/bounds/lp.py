"""The cut LP relaxation of 2-edge-connected spanning subgraph, solved exactly.

    min  sum_e x_e   s.t.  x(delta(S)) >= 2 for cuts S,  0 <= x_e <= 1

It is solved through its dual (max 2 sum y_S - sum z_e), whose slack basis is
feasible, so every optimum comes with a matching dual certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import networkx as nx

from ..graph_core import Graph, GraphError, is_connected
from .simplex import Unbounded, maximize

Cut = frozenset


class LpInfeasible(GraphError):
    """Some cut of the graph has fewer than two edges."""


@dataclass(frozen=True)
class LpSolution:
    x: dict[tuple[int, int], Fraction]
    objective: Fraction
    separating_cuts_used: tuple[Cut, ...]
    y: dict[Cut, Fraction] = field(default_factory=dict, repr=False)
    z: dict[tuple[int, int], Fraction] = field(default_factory=dict, repr=False)
    rounds: int = 1


def canonical_cut(side, n: int) -> Cut:
    """The shore containing vertex 0."""
    s = frozenset(side)
    return s if 0 in s else frozenset(range(n)) - s


def crossing(cut: Cut, e: tuple[int, int]) -> bool:
    return (e[0] in cut) != (e[1] in cut)


def cut_value(x: dict[tuple[int, int], Fraction], cut: Cut) -> Fraction:
    return sum((v for e, v in x.items() if crossing(cut, e)), Fraction(0))


def solve_restricted(g: Graph, cuts: list[Cut]) -> LpSolution:
    """Optimum over the given cut rows only, verified by exact duality."""
    m = g.m
    nc = len(cuts)
    c = [2] * nc + [-1] * m
    rows = []
    for i, e in enumerate(g.edges):
        row = {j: 1 for j, s in enumerate(cuts) if crossing(s, e)}
        row[nc + i] = -1
        rows.append(row)
    try:
        res = maximize(c, rows, [1] * m)
    except Unbounded:
        raise LpInfeasible("cut LP is infeasible (the graph has a bridge)") from None
    x = dict(zip(g.edges, res.duals))
    y = {s: v for s, v in zip(cuts, res.x[:nc]) if v}
    z = {e: v for e, v in zip(g.edges, res.x[nc:]) if v}
    _verify(g, cuts, x, y, z, res.value)
    return LpSolution(x=x, objective=res.value, separating_cuts_used=tuple(cuts), y=y, z=z)


def _verify(g, cuts, x, y, z, value) -> None:
    if sum(x.values(), Fraction(0)) != value:
        raise AssertionError("primal and dual objectives differ")
    if any(not 0 <= v <= 1 for v in x.values()):
        raise AssertionError("primal bound violated")
    for s in cuts:
        if cut_value(x, s) < 2:
            raise AssertionError(f"primal cut {sorted(s)} violated")
    for e in g.edges:
        lhs = sum((v for s, v in y.items() if crossing(s, e)), Fraction(0))
        if lhs > 1 + z.get(e, 0):
            raise AssertionError(f"dual constraint of {e} violated")


def min_cut(g: Graph, x: dict[tuple[int, int], Fraction]) -> tuple[Fraction, Cut]:
    """Global minimum cut of ``g`` under edge weights ``x`` (Stoer-Wagner)."""
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    for e in g.edges:
        nxg.add_edge(*e, weight=x.get(e, Fraction(0)))
    value, (side, _other) = nx.stoer_wagner(nxg)
    return Fraction(value), canonical_cut(side, g.n)


def solve_ec_lp(g: Graph, max_rounds: int = 500) -> LpSolution:
    """Cutting planes: degree cuts first, then global min-cut separation."""
    if g.n < 3 or not is_connected(g):
        raise GraphError("cut LP needs a connected graph with at least 3 vertices")
    cuts = [canonical_cut({v}, g.n) for v in range(g.n)]
    for rounds in range(1, max_rounds + 1):
        sol = solve_restricted(g, cuts)
        value, cut = min_cut(g, sol.x)
        if value >= 2:
            return LpSolution(sol.x, sol.objective, sol.separating_cuts_used, sol.y, sol.z, rounds)
        if cut in cuts:
            raise AssertionError("separation returned an active cut")
        cuts.append(cut)
    raise RuntimeError("cutting-plane loop did not converge")


def all_cuts(n: int) -> list[Cut]:
    rest = range(1, n)
    out = []
    for k in range(0, n - 1):
        for extra in combinations(rest, k):
            out.append(frozenset((0, *extra)))
    return out


def solve_ec_lp_enumerated(g: Graph) -> LpSolution:
    """The same LP with every one of the 2^(n-1) - 1 cuts written out."""
    if g.n < 3 or not is_connected(g):
        raise GraphError("cut LP needs a connected graph with at least 3 vertices")
    return solve_restricted(g, all_cuts(g.n))
