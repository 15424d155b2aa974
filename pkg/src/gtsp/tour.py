"""Euler tour construction from the structured 2-VCSS.

The degree-3 vertices K of F1 and the segments of F1 between them form a cubic
multigraph. Parallel links are subdivided (zero-cost edge between the two new
vertices) to make it simple, the result is split into three disjoint perfect
matchings, each matching is turned into a K-join on F1, and the cheapest tour
after dropping redundant doubled edges is kept.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Any

import networkx as nx

from . import findings as fc
from .findings import Finding
from .graph_core import EdgeInstance, EdgeMultiset, Graph, expand_to_walk, is_eulerian
from .vcss import Decomposition, Segment, classify_segments, run_algorithm1

log = logging.getLogger(__name__)

FOUR_THIRDS = Fraction(4, 3)


class ReductionError(RuntimeError):
    """F1 does not have the shape the cubic reduction needs."""


@dataclass(frozen=True)
class Link:
    index: int
    u: int
    v: int
    segment: Segment

    @property
    def cost(self) -> int:
        return self.segment.cost


@dataclass(frozen=True, order=True)
class TEdge:
    """Edge of the transformed cubic graph.

    ``link`` is the F1 segment the edge stands for (None for zero-cost edges).
    ``whole`` is False once the link has been subdivided.
    """

    a: int
    b: int
    link: int | None
    cost: int
    whole: bool = True

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


def _tedge(a: int, b: int, link: int | None, cost: int, whole: bool = False) -> TEdge:
    return TEdge(min(a, b), max(a, b), link, cost, whole)


@dataclass(frozen=True)
class Subdivision:
    kind: str  # "parallel" or "leftover"
    new_vertices: tuple[int, int]
    split: tuple[TEdge, TEdge]
    zero_edge: TEdge


@dataclass(frozen=True)
class CubicReduction:
    nodes: tuple[int, ...]
    links: tuple[Link, ...]
    edges: tuple[TEdge, ...]
    degenerate: bool
    next_vertex: int
    subdivisions: tuple[Subdivision, ...] = ()
    findings: tuple[Finding, ...] = ()

    @property
    def parallel_groups(self) -> list[tuple[int, ...]]:
        groups: dict[tuple[int, int], list[int]] = {}
        for ln in self.links:
            groups.setdefault((ln.u, ln.v), []).append(ln.index)
        return [tuple(v) for v in groups.values() if len(v) > 1]

    def vertices(self) -> list[int]:
        return sorted({x for e in self.edges for x in e.pair})

    def is_simple(self) -> bool:
        pairs = [e.pair for e in self.edges]
        return len(pairs) == len(set(pairs))

    def degrees(self) -> dict[int, int]:
        deg: dict[int, int] = {}
        for e in self.edges:
            for x in e.pair:
                deg[x] = deg.get(x, 0) + 1
        return deg

    def is_cubic(self) -> bool:
        return all(d == 3 for d in self.degrees().values())


@dataclass(frozen=True)
class MatchingTriple:
    reduction: CubicReduction
    classes: tuple[tuple[TEdge, ...], tuple[TEdge, ...], tuple[TEdge, ...]]
    colorable: bool
    leftover: int = 0
    findings: tuple[Finding, ...] = ()


@dataclass(frozen=True)
class KJoin:
    links: frozenset[int]
    edges: EdgeMultiset
    repaired: bool = False

    @property
    def cost(self) -> int:
        return self.edges.cost


@dataclass(frozen=True)
class TourMultiset:
    edges: EdgeMultiset
    chosen_matching: int | None
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def cost(self) -> int:
        return self.edges.cost


# -------------------------------------------------------------- reduction


def _has_bridge(nodes, links) -> list[int]:
    bridges = []
    for ln in links:
        adj = {v: [] for v in nodes}
        for other in links:
            if other.index != ln.index:
                adj[other.u].append(other.v)
                adj[other.v].append(other.u)
        seen, todo = {ln.u}, [ln.u]
        while todo:
            x = todo.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        if ln.v not in seen:
            bridges.append(ln.index)
    return bridges


def build_cubic_reduction(d: Decomposition) -> CubicReduction:
    """Cubic multigraph on the degree-3 vertices of F1 with F1 segments as links."""
    deg = d.f1_degrees()
    bad = [v for v, k in enumerate(deg) if k not in (0, 2, 3)]
    if bad:
        raise ReductionError(f"F1 has vertices of degree outside {{2, 3}}: {bad}")
    nodes = tuple(v for v, k in enumerate(deg) if k == 3)
    links: list[Link] = []
    for s in d.f1_segments:
        if s.closed:
            continue
        u, v = s.ends
        if u == v:
            raise ReductionError(f"F1 segment {s.path} is a loop at {u}")
        links.append(Link(len(links), u, v, s))
    found: list[Finding] = []
    bridges = _has_bridge(nodes, links)
    if bridges:
        found.append(Finding(fc.BRIDGED_REDUCTION, f"cubic reduction has bridge links {bridges}",
                             {"links": bridges}))
    return CubicReduction(
        nodes=nodes,
        links=tuple(links),
        edges=tuple(TEdge(ln.u, ln.v, ln.index, ln.cost) for ln in links),
        degenerate=not nodes,
        next_vertex=d.n,
        findings=tuple(found),
    )


def _split(e: TEdge, p: int) -> tuple[TEdge, TEdge]:
    """Halves of ``e`` at new vertex ``p``; the half at the smaller endpoint keeps the cost."""
    lo, hi = e.a, e.b
    return _tedge(lo, p, e.link, e.cost), _tedge(p, hi, e.link, 0)


def subdivide_pair(c: CubicReduction, e1: TEdge, e2: TEdge, kind: str) -> CubicReduction:
    p, q = c.next_vertex, c.next_vertex + 1
    zero = _tedge(p, q, None, 0)
    edges = [e for e in c.edges if e not in (e1, e2)]
    edges.extend(_split(e1, p))
    edges.extend(_split(e2, q))
    edges.append(zero)
    return replace(
        c,
        edges=tuple(sorted(edges)),
        next_vertex=q + 1,
        subdivisions=c.subdivisions + (Subdivision(kind, (p, q), (e1, e2), zero),),
    )


def simplify_parallel_edges(c: CubicReduction) -> CubicReduction:
    """Subdivide parallel pairs until the graph is simple."""
    while True:
        groups: dict[tuple[int, int], list[TEdge]] = {}
        for e in c.edges:
            groups.setdefault(e.pair, []).append(e)
        par = sorted(sorted(g) for g in groups.values() if len(g) > 1)
        if not par:
            return c
        e1, e2 = par[0][:2]
        c = subdivide_pair(c, e1, e2, "parallel")


# --------------------------------------------------------------- coloring


def _search_coloring(edges: list[TEdge], budget: int = 200_000) -> dict[TEdge, int] | None:
    """Backtracking proper 3-edge-coloring; None if none exists or the budget runs out."""
    if not edges:
        return {}
    incident: dict[int, list[TEdge]] = {}
    for e in edges:
        incident.setdefault(e.a, []).append(e)
        incident.setdefault(e.b, []).append(e)
    # BFS edge order keeps the frontier small
    order: list[TEdge] = []
    seen_e: set[TEdge] = set()
    for start in sorted(incident):
        seen_v = {start}
        queue = [start]
        while queue:
            x = queue.pop(0)
            for e in sorted(incident[x]):
                if e not in seen_e:
                    seen_e.add(e)
                    order.append(e)
                y = e.b if e.a == x else e.a
                if y not in seen_v:
                    seen_v.add(y)
                    queue.append(y)
    color: dict[TEdge, int] = {}
    used: dict[int, set[int]] = {v: set() for v in incident}
    nodes = 0

    def rec(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            return True
        nodes += 1
        if nodes > budget:
            raise TimeoutError
        e = order[i]
        for col in range(3):
            if col in used[e.a] or col in used[e.b]:
                continue
            color[e] = col
            used[e.a].add(col)
            used[e.b].add(col)
            if rec(i + 1):
                return True
            used[e.a].discard(col)
            used[e.b].discard(col)
            del color[e]
        return False

    try:
        return dict(color) if rec(0) else None
    except TimeoutError:
        log.warning("3-edge-coloring search budget exhausted")
        return None


def _two_factor_cycles(edges: list[TEdge]) -> list[list[TEdge]]:
    incident: dict[int, list[TEdge]] = {}
    for e in edges:
        incident.setdefault(e.a, []).append(e)
        incident.setdefault(e.b, []).append(e)
    done: set[TEdge] = set()
    cycles = []
    for v in sorted(incident):
        if all(e in done for e in incident[v]):
            continue
        cyc = []
        x = v
        e = min(incident[v], key=lambda f: ((f.b if f.a == v else f.a), f))
        while e not in done:
            done.add(e)
            cyc.append(e)
            x = e.b if e.a == x else e.a
            nxt = [f for f in incident[x] if f not in done]
            if not nxt:
                break
            e = nxt[0]
        cycles.append(cyc)
    return cycles


def _cycle_vertices(cyc: list[TEdge]) -> list[int]:
    """Vertex order v0, v1, ... with cyc[i] joining v_i and v_{i+1}."""
    first, second = cyc[0], cyc[1]
    v0 = first.a if first.a not in second.pair else first.b
    verts = [v0]
    for e in cyc:
        x = verts[-1]
        verts.append(e.b if e.a == x else e.a)
    return verts[:-1]


def _is_perfect_matching(edges, vertices) -> bool:
    cover: list[int] = [x for e in edges for x in e.pair]
    return len(cover) == len(set(cover)) and set(cover) == set(vertices)


def three_edge_coloring(c: CubicReduction) -> MatchingTriple:
    """Three disjoint perfect matchings covering the (simple, cubic) transformed graph.

    A proper 3-edge-coloring is used when one exists. Otherwise a perfect
    matching M1 is taken, the remaining 2-factor is colored alternately, and the
    edge left over on each odd cycle is subdivided, the new vertices being
    paired by zero-cost edges that join M1.
    """
    if c.degenerate:
        return MatchingTriple(c, ((), (), ()), colorable=True)
    if not c.is_simple() or not c.is_cubic():
        raise ReductionError("transformed graph must be simple and cubic")
    coloring = _search_coloring(list(c.edges))
    if coloring is not None:
        classes = [tuple(sorted(e for e, col in coloring.items() if col == k)) for k in range(3)]
        classes.sort()
        return MatchingTriple(c, tuple(classes), colorable=True)

    found: list[Finding] = []
    nxg = nx.Graph()
    for e in c.edges:
        nxg.add_edge(e.a, e.b)
    by_pair = {e.pair: e for e in c.edges}
    m1 = {by_pair[(min(a, b), max(a, b))] for a, b in nx.max_weight_matching(nxg, maxcardinality=True)}
    if not _is_perfect_matching(m1, c.vertices()):
        raise ReductionError(f"no perfect matching in the cubic reduction ({len(m1)} edges matched)")
    rest = [e for e in c.edges if e not in m1]
    col2: list[TEdge] = []
    col3: list[TEdge] = []
    leftovers: list[tuple[TEdge, int, int]] = []
    for cyc in _two_factor_cycles(rest):
        verts = _cycle_vertices(cyc)
        odd = len(cyc) % 2 == 1
        for i, e in enumerate(cyc):
            if odd and i == len(cyc) - 1:
                # misses colour 2 at v_{L-1} and colour 3 at v_0
                leftovers.append((e, verts[-1], verts[0]))
            elif i % 2 == 0:
                col2.append(e)
            else:
                col3.append(e)
    if len(leftovers) != 2:
        found.append(Finding(fc.LEFTOVER_COUNT, f"{len(leftovers)} class-4 edges instead of two",
                             {"count": len(leftovers)}))
    if len(leftovers) % 2:
        raise ReductionError("odd number of class-4 edges")
    cur = c
    col1 = list(m1)
    for (ea, a2, a3), (eb, b2, b3) in zip(leftovers[::2], leftovers[1::2]):
        cur = subdivide_pair(cur, ea, eb, "leftover")
        sd = cur.subdivisions[-1]
        for e, miss2, vertex in ((ea, a2, sd.new_vertices[0]), (eb, b2, sd.new_vertices[1])):
            for h in _split(e, vertex):
                (col2 if miss2 in h.pair else col3).append(h)
        col1.append(sd.zero_edge)
    classes = (tuple(sorted(col1)), tuple(sorted(col2)), tuple(sorted(col3)))
    return MatchingTriple(cur, classes, colorable=False, leftover=len(leftovers), findings=tuple(found))


# ------------------------------------------------------------------ joins


def _link_paths(c: CubicReduction, sources: list[int]) -> dict[int, dict[int, tuple[int, list[int]]]]:
    """Cheapest link paths (cost, link ids) from each source over the link multigraph."""
    incident: dict[int, list[Link]] = {v: [] for v in c.nodes}
    for ln in c.links:
        incident[ln.u].append(ln)
        incident[ln.v].append(ln)
    out = {}
    for s in sources:
        best: dict[int, tuple[int, list[int]]] = {s: (0, [])}
        heap = [(0, [], s)]
        while heap:
            cost, path, x = heapq.heappop(heap)
            if best[x][0] < cost or best[x][1] != path:
                continue
            for ln in incident[x]:
                y = ln.v if ln.u == x else ln.u
                cand = (cost + ln.cost, path + [ln.index])
                if y not in best or cand < best[y]:
                    best[y] = cand
                    heapq.heappush(heap, (cand[0], cand[1], y))
        out[s] = best
    return out


def _min_tjoin_links(c: CubicReduction, terminals: list[int]) -> set[int]:
    """Minimum-cost T-join on the link multigraph (pairing by subset DP)."""
    paths = _link_paths(c, terminals)
    k = len(terminals)
    memo: dict[int, tuple[int, list[tuple[int, int]]]] = {0: (0, [])}

    def solve(mask: int) -> tuple[int, list[tuple[int, int]]]:
        if mask in memo:
            return memo[mask]
        i = next(j for j in range(k) if mask >> j & 1)
        best = None
        for j in range(i + 1, k):
            if mask >> j & 1:
                sub = solve(mask & ~(1 << i) & ~(1 << j))
                cand = (sub[0] + paths[terminals[i]][terminals[j]][0], [(i, j)] + sub[1])
                if best is None or cand[0] < best[0]:
                    best = cand
        memo[mask] = best
        return best

    _, pairs = solve((1 << k) - 1)
    join: set[int] = set()
    for i, j in pairs:
        join ^= set(paths[terminals[i]][terminals[j]][1])
    return join


def kjoin_from_matching(m, c: CubicReduction, d: Decomposition) -> KJoin:
    """K-join on F1 for one perfect matching of the transformed graph.

    Whole links in the matching join directly. For a subdivided parallel pair
    whose halves are matched, the link carrying the costed half joins. Any
    K-vertex still unpaired is fixed with a cheapest T-join over the links and
    the join is marked as repaired.
    """
    if c.degenerate:
        return KJoin(frozenset(), EdgeMultiset())
    at: dict[int, TEdge] = {}
    for e in m:
        at[e.a] = e
        at[e.b] = e
    partner = {x: (e.b if e.a == x else e.a) for x, e in at.items()}
    join: set[int] = set()
    pending: set[int] = set()
    for x in c.nodes:
        e = at[x]
        if e.whole:
            join.add(e.link)
        else:
            pending.add(x)
    links = {ln.index: ln for ln in c.links}
    for sd in c.subdivisions:
        if sd.kind != "parallel":
            continue
        p, q = sd.new_vertices
        if at.get(p) == sd.zero_edge:
            continue
        x, y = partner.get(p), partner.get(q)
        hp, hq = at.get(p), at.get(q)
        if x not in pending or y not in pending or x == y:
            continue
        ends = {x, y}
        lp, lq = links.get(hp.link), links.get(hq.link)
        if lp is None or lq is None or {lp.u, lp.v} != ends or {lq.u, lq.v} != ends:
            continue
        costed = hp if hp.cost > 0 else hq
        join.add(costed.link)
        pending -= ends
    repaired = False
    if pending:
        repaired = True
        join ^= _min_tjoin_links(c, sorted(pending))
    parity = {v: 0 for v in c.nodes}
    for i in join:
        parity[links[i].u] ^= 1
        parity[links[i].v] ^= 1
    if not all(parity.values()):
        raise ReductionError("mapped join does not have K as its odd set")
    extra = EdgeMultiset(e for i in sorted(join) for e in links[i].segment.edges)
    return KJoin(frozenset(join), extra, repaired)


def remove_redundant_doubles(t: EdgeMultiset, n: int) -> tuple[EdgeMultiset, list[EdgeInstance]]:
    """Drop both copies of doubled edges, ascending, while the tour stays Eulerian."""
    removed: list[EdgeInstance] = []
    changed = True
    while changed:
        changed = False
        for e in t.doubled():
            trial = t.minus(e, 2)
            if is_eulerian(trial, n):
                t = trial
                removed.append(e)
                changed = True
    return t, removed


# -------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class Algorithm3Result:
    decomposition: Decomposition
    tour: TourMultiset
    walk: list[int]
    reduction: CubicReduction | None
    triple: MatchingTriple | None
    candidate_costs: tuple[int, ...]
    findings: tuple[Finding, ...]


def f1_ratio(d: Decomposition, t: EdgeMultiset) -> Fraction | None:
    """Cost of the tour on F1 edges over |V(F1)| - |W(F1)|; None when that count is not positive."""
    denom = len(d.f1_vertices) - len(d.w_vertices)
    if denom <= 0:
        return None
    c_t = sum(e.weight * t.get(e, 0) for e in d.f1)
    return Fraction(c_t, denom)


def run_algorithm3(g: Graph) -> Algorithm3Result:
    """Full pipeline on a 2-vertex-connected graph with at least 3 vertices."""
    d = run_algorithm1(g)
    found: list[Finding] = list(d.findings)
    base = EdgeMultiset(d.f)
    c = build_cubic_reduction(d)
    found.extend(c.findings)
    triple = None
    if c.degenerate:
        candidates = [(base, [], None)]
    else:
        c = simplify_parallel_edges(c)
        triple = three_edge_coloring(c)
        found.extend(triple.findings)
        candidates = []
        for idx, cls in enumerate(triple.classes):
            kj = kjoin_from_matching(cls, triple.reduction, d)
            if kj.repaired:
                found.append(Finding(fc.MATCHING_REPAIR, f"matching {idx} needed a T-join repair",
                                     {"matching": idx}))
            t, removed = remove_redundant_doubles(base.plus(kj.edges), g.n)
            candidates.append((t, removed, idx))
    costs = tuple(t.cost for t, _r, _i in candidates)
    best = min(range(len(candidates)), key=lambda i: (costs[i], i))
    t, removed, idx = candidates[best]
    if not is_eulerian(t, g.n):
        raise ReductionError("selected tour is not Eulerian")
    ratio = f1_ratio(d, t)
    if ratio is not None and ratio > FOUR_THIRDS:
        found.append(Finding(fc.F1_RATIO, f"c_T(F1)/(|V(F1)|-|W(F1)|) = {ratio} > 4/3", {"ratio": str(ratio)}))
    catalog = classify_segments(d)
    diagnostics = {
        "redundant_doubles": len(removed),
        "c_t_f1": sum(e.weight * t.get(e, 0) for e in d.f1),
        "v_f1": len(d.f1_vertices),
        "w_f1": len(d.w_vertices),
        "lemma3_ratio": ratio,
        "removable_count": catalog.removable_count,
        "candidate_costs": costs,
    }
    tour = TourMultiset(t, idx, diagnostics)
    walk = expand_to_walk(t, g)
    return Algorithm3Result(d, tour, walk, c if not c.degenerate else None, triple, costs, tuple(_uniq(found)))


def _uniq(items):
    out = []
    for x in items:
        if x not in out:
            out.append(x)
    return out
