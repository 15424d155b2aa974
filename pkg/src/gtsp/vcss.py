"""Structured 2-vertex-connected spanning subgraph: degree reduction, decomposition
into a subcubic part F1 and identical-endpoint segment groups F2, and the
critical-edge improvement loop.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any

from . import findings as fc
from .findings import Finding
from .graph_core import (
    EdgeInstance,
    Graph,
    GraphError,
    is_biconnected_on,
    is_connected_on,
    is_two_vertex_connected,
)

log = logging.getLogger(__name__)

TRIVIAL, SHORT, LONG = "trivial", "short", "long"
STRONG, WEAK = "strong", "weak"


@dataclass(frozen=True)
class SubSegment:
    """Maximal run of original edges inside an F2 segment.

    Runs are separated by shortcut edges; ``sub_end`` flags the endpoints that
    are not end vertices of the parent segment.
    """

    path: tuple[int, ...]
    edges: tuple[EdgeInstance, ...]
    sub_end: tuple[bool, bool]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def internal(self) -> tuple[int, ...]:
        return self.path[1:-1]

    @property
    def side_vertices(self) -> tuple[int, ...]:
        if self.length < 2:
            return ()
        if self.length == 2:
            return (self.path[1],)
        return (self.path[1], self.path[-2])


@dataclass(frozen=True)
class Segment:
    """Maximal path whose internal vertices have degree 2 in the catalogued subgraph.

    A component that is a bare cycle is stored as a closed segment starting and
    ending at its smallest vertex.
    """

    path: tuple[int, ...]
    edges: tuple[EdgeInstance, ...]
    closed: bool = False
    strength: str | None = None
    couple_id: int | None = None

    @property
    def ends(self) -> tuple[int, int]:
        return (self.path[0], self.path[-1])

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def kind(self) -> str:
        if self.length == 1:
            return TRIVIAL
        return SHORT if self.length <= 3 else LONG

    @property
    def internal(self) -> tuple[int, ...]:
        return self.path[1:-1]

    @property
    def side_vertices(self) -> tuple[int, ...]:
        if self.length < 2:
            return ()
        return tuple(dict.fromkeys((self.path[1], self.path[-2])))

    @property
    def cost(self) -> int:
        return sum(e.weight for e in self.edges)

    def oriented_from(self, v: int) -> tuple[int, ...]:
        return self.path if self.path[0] == v else self.path[::-1]

    def subsegments(self) -> tuple[SubSegment, ...]:
        ends = set(self.ends)
        runs: list[SubSegment] = []
        path, edges = [self.path[0]], []

        def close():
            runs.append(SubSegment(tuple(path), tuple(edges), (path[0] not in ends, path[-1] not in ends)))

        for i, e in enumerate(self.edges):
            nxt = self.path[i + 1]
            if e.is_shortcut:
                close()
                path, edges = [nxt], []
            else:
                path.append(nxt)
                edges.append(e)
        close()
        return tuple(runs)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "path": list(self.path),
            "length": self.length,
            "cost": self.cost,
            "kind": "cycle" if self.closed else self.kind,
            "shortcuts": [[e.u, e.v, e.via] for e in self.edges if e.is_shortcut],
        }
        if self.strength is not None:
            out["strength"] = self.strength
        if self.couple_id is not None:
            out["couple_id"] = self.couple_id
        return out


def degree_map(edges, n: int) -> list[int]:
    deg = [0] * n
    for e in edges:
        deg[e.u] += 1
        deg[e.v] += 1
    return deg


def find_segments(edges) -> list[Segment]:
    """Segment catalog of a (multi)graph given as edge instances."""
    edges = sorted(edges)
    if not edges:
        return []
    n = max(e.v for e in edges) + 1
    deg = degree_map(edges, n)
    incident: dict[int, list[EdgeInstance]] = defaultdict(list)
    for e in edges:
        incident[e.u].append(e)
        incident[e.v].append(e)
    used: set[EdgeInstance] = set()
    segments: list[Segment] = []

    def walk(start: int, first: EdgeInstance) -> tuple[list[int], list[EdgeInstance]]:
        path, seq = [start], []
        x, e = start, first
        while True:
            used.add(e)
            seq.append(e)
            y = e.other(x)
            path.append(y)
            if deg[y] != 2 or y == start:
                return path, seq
            e = next(f for f in incident[y] if f not in used)
            x = y

    for b in range(n):
        if deg[b] in (0, 2):
            continue
        for e in incident[b]:
            if e in used:
                continue
            path, seq = walk(b, e)
            if path[-1] < path[0] or (path[-1] == path[0] and path[-2] < path[1]):
                path, seq = path[::-1], seq[::-1]
            segments.append(Segment(tuple(path), tuple(seq)))
    for v in range(n):
        if deg[v] != 2:
            continue
        rest = [e for e in incident[v] if e not in used]
        if not rest:
            continue
        # bare cycle component; go towards the smaller neighbour first
        first = min(rest, key=lambda f: (f.other(v), f.key))
        path, seq = walk(v, first)
        segments.append(Segment(tuple(path), tuple(seq), closed=True))
    return segments


@dataclass(frozen=True)
class Decomposition:
    """Working solution F = F1 + F2 after degree reduction.

    ``f`` and ``f1`` are edge-instance sets (F never holds doubled edges).
    ``h`` is the set of original edges of G not used by F.
    """

    f: frozenset[EdgeInstance]
    f1: frozenset[EdgeInstance]
    f2: tuple[Segment, ...]
    f1_segments: tuple[Segment, ...]
    h: frozenset[tuple[int, int]]
    x_vertices: frozenset[int]
    w_vertices: frozenset[int]
    n: int
    stuck_vertices: tuple[int, ...] = ()
    iterations: int = 0
    no_progress_steps: int = 0
    findings: tuple[Finding, ...] = ()

    @property
    def cost(self) -> int:
        return sum(e.weight for e in self.f)

    @property
    def f1_vertices(self) -> frozenset[int]:
        """V(F1): vertices with at least one F1 edge."""
        return frozenset(x for e in self.f1 for x in (e.u, e.v))

    def f2_groups(self) -> dict[tuple[int, int], list[Segment]]:
        groups: dict[tuple[int, int], list[Segment]] = defaultdict(list)
        for s in self.f2:
            groups[tuple(sorted(s.ends))].append(s)
        return dict(sorted(groups.items()))

    def subsegments(self) -> list[tuple[Segment, SubSegment]]:
        return [(s, p) for s in self.f2 for p in s.subsegments()]

    def f1_degrees(self) -> list[int]:
        return degree_map(self.f1, self.n)

    def is_subcubic(self) -> bool:
        return max(self.f1_degrees(), default=0) <= 3

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "cost": self.cost,
            "f": [[e.u, e.v, e.via] for e in sorted(self.f)],
            "f1": [[e.u, e.v, e.via] for e in sorted(self.f1)],
            "f1_segments": [s.to_json() for s in self.f1_segments],
            "f2": [
                {
                    **s.to_json(),
                    "subsegments": [
                        {"path": list(p.path), "sub_end": list(p.sub_end)} for p in s.subsegments()
                    ],
                }
                for s in self.f2
            ],
            "x_vertices": sorted(self.x_vertices),
            "w_vertices": sorted(self.w_vertices),
            "stuck_vertices": list(self.stuck_vertices),
            "iterations": self.iterations,
            "no_progress_steps": self.no_progress_steps,
            "findings": [f.to_json() for f in self.findings],
        }


# ------------------------------------------------------------- Algorithm 1/2


def minimal_two_vcss(g: Graph) -> frozenset[EdgeInstance]:
    """Inclusion-wise minimal 2-VCSS by greedy deletion in ascending edge id order."""
    if g.n < 3 or not is_two_vertex_connected(g.edges, g.n):
        raise GraphError("input graph is not 2-vertex-connected")
    current = {EdgeInstance.original(u, v) for u, v in g.edges}
    changed = True
    while changed:
        changed = False
        for e in sorted(current):
            trial = current - {e}
            if is_two_vertex_connected(trial, g.n):
                current = trial
                changed = True
    return frozenset(current)


def _try_shortcut(v: int, f: set, f1: set, n: int):
    """First neighbour pair (u, w) of v whose bypass keeps F 2-vertex-connected."""
    nbrs = sorted({e.other(v) for e in f1 if v in (e.u, e.v) and not e.is_shortcut})
    for u, w in combinations(nbrs, 2):
        removed = {EdgeInstance.original(u, v), EdgeInstance.original(w, v)}
        pair = (min(u, w), max(u, w))
        if any(e.pair == pair for e in f1):
            added: set[EdgeInstance] = set()  # concatenation onto the existing edge
        else:
            added = {EdgeInstance.shortcut(u, w, v)}
        if is_two_vertex_connected((f - removed) | added, n):
            return removed, added
    return None


def _identical_end_pair(v: int, f1: set) -> tuple[Segment, Segment] | None:
    by_end: dict[int, list[Segment]] = defaultdict(list)
    for s in find_segments(f1):
        if s.closed or v not in s.ends or s.ends[0] == s.ends[1]:
            continue
        other = s.ends[1] if s.ends[0] == v else s.ends[0]
        by_end[other].append(s)
    best = None
    for group in by_end.values():
        group.sort(key=lambda s: s.oriented_from(v))
        for a, b in combinations(group, 2):
            key = (a.oriented_from(v), b.oriented_from(v))
            if best is None or key < best[0]:
                best = (key, (a, b))
    return None if best is None else best[1]


def _remove_redundant_trivial(f: set, f1: set, n: int) -> int:
    removed = 0
    while True:
        trivial = sorted(s.edges[0] for s in find_segments(f1) if not s.closed and s.length == 1)
        for e in trivial:
            if is_two_vertex_connected(f - {e}, n):
                f.discard(e)
                f1.discard(e)
                removed += 1
                break
        else:
            return removed


def degree_reduce_decompose(f, g: Graph) -> Decomposition:
    """Degree reduction and decomposition of a 2-VCSS ``f`` into F1 and F2."""
    f = set(f)
    if not is_two_vertex_connected(f, g.n):
        raise GraphError("degree reduction needs a 2-vertex-connected solution")
    f1 = set(f)
    f2: list[Segment] = []
    stuck: list[int] = []
    found: list[Finding] = []
    while True:
        deg = degree_map(f1, g.n)
        todo = [v for v in range(g.n) if deg[v] >= 4 and v not in stuck]
        if not todo:
            break
        v = todo[0]
        op = _try_shortcut(v, f, f1, g.n)
        if op is not None:
            removed, added = op
            f -= removed
            f1 -= removed
            f |= added
            f1 |= added
            continue
        pair = _identical_end_pair(v, f1)
        if pair is not None:
            for s in pair:
                f1.difference_update(s.edges)
            f2.extend(pair)
            continue
        stuck.append(v)
        found.append(
            Finding(fc.ALG2_STUCK, f"vertex {v} has F1-degree {deg[v]} with no shortcut and no segment pair",
                    {"vertex": v, "degree": deg[v]})
        )
        log.info("degree reduction stuck at vertex %d (degree %d)", v, deg[v])
    _remove_redundant_trivial(f, f1, g.n)
    return _assemble(f, f1, f2, g, stuck, found)


def _assemble(f, f1, f2, g: Graph, stuck, found) -> Decomposition:
    f2 = tuple(sorted(f2, key=lambda s: (tuple(sorted(s.ends)), s.path)))
    x = frozenset(v for s in f2 for v in s.ends)
    w = frozenset(
        v
        for s in f2
        for p in s.subsegments()
        for v, flag in zip((p.path[0], p.path[-1]), p.sub_end)
        if flag
    )
    used = {e.pair for e in f if not e.is_shortcut}
    return Decomposition(
        f=frozenset(f),
        f1=frozenset(f1),
        f2=f2,
        f1_segments=tuple(find_segments(f1)),
        h=frozenset(e for e in g.edges if e not in used),
        x_vertices=x,
        w_vertices=w,
        n=g.n,
        stuck_vertices=tuple(stuck),
        findings=tuple(found),
    )


def side_vertices(d: Decomposition) -> set[int]:
    return {u for _s, p in d.subsegments() for u in p.side_vertices}


def find_critical_edges(d: Decomposition, g: Graph) -> list[tuple[int, int]]:
    """Edges of E minus F with an endpoint at a side vertex of an F2 sub-segment."""
    sides = side_vertices(d)
    if not sides:
        return []
    return [e for e in g.edges if e in d.h and (e[0] in sides or e[1] in sides)]


def improvement_step(d: Decomposition, e: tuple[int, int], g: Graph) -> Decomposition:
    """Add ``e``, delete edges of F then ``e`` while 2-VC survives, re-decompose."""
    new = EdgeInstance.original(*e)
    if e not in d.h:
        raise GraphError(f"{e} is already part of F")
    current = set(d.f) | {new}
    for inst in sorted(d.f) + [new]:
        trial = current - {inst}
        if is_two_vertex_connected(trial, g.n):
            current = trial
    return degree_reduce_decompose(current, g)


def _segment_edges_f2(d: Decomposition) -> set[tuple[int, int]]:
    return {x.pair for s in d.f2 for x in s.edges if not x.is_shortcut}


def run_algorithm1(g: Graph) -> Decomposition:
    """Minimal 2-VCSS, decomposition, then improvement steps until no critical edge is left.

    Steps where the added edge is immediately deleted again leave F unchanged,
    and steps that lead back to an F seen before would cycle; either way that
    edge is skipped until F changes. Steps that change F are capped at |E|.
    """
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    found: list[Finding] = list(d.findings)
    skipped: set[tuple[int, int]] = set()
    included: set[tuple[int, int]] = set()
    visited = {d.f}
    steps = no_progress = 0
    while True:
        crit = [e for e in find_critical_edges(d, g) if e not in skipped]
        if not crit:
            break
        if steps >= g.m:
            found.append(Finding(fc.ITERATION_CAP, f"more than |E| = {g.m} improvement steps", {"cap": g.m}))
            break
        e = crit[0]
        nd = improvement_step(d, e, g)
        if nd.f in visited:
            skipped.add(e)
            no_progress += 1
            continue
        steps += 1
        visited.add(nd.f)
        skipped.clear()
        if EdgeInstance.original(*e) in nd.f:
            included.add(e)
        found.extend(x for x in nd.findings if x not in found)
        bad = sorted(included & _segment_edges_f2(nd))
        if bad:
            found.append(
                Finding(fc.CRITICAL_ON_F2, f"included critical edges {bad} lie on F2 segments", {"edges": bad, "step": steps})
            )
        d = nd
    leftover = find_critical_edges(d, g)
    if leftover:
        found.append(
            Finding(fc.CRITICAL_EDGE_LEFT, f"{len(leftover)} critical edge(s) survive the improvement loop",
                    {"edges": [list(x) for x in leftover]})
        )
    return replace(d, iterations=steps, no_progress_steps=no_progress, findings=_dedupe(found))


def _dedupe(items: list[Finding]) -> tuple[Finding, ...]:
    out: list[Finding] = []
    for x in items:
        if x not in out:
            out.append(x)
    return tuple(out)


# ---------------------------------------------------------- classification


@dataclass(frozen=True)
class SegmentCatalog:
    segments: tuple[Segment, ...]
    couples: tuple[tuple[int, int], ...]
    w_count: int
    single_cycle: bool = False
    extra: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def strong_count(self) -> int:
        return sum(1 for s in self.segments if s.strength == STRONG)

    @property
    def couple_count(self) -> int:
        return len(self.couples)

    @property
    def removable_count(self) -> int:
        """Strong segments + weak couples + sub-end vertices."""
        return self.strong_count + self.couple_count + self.w_count


def classify_segments(d: Decomposition) -> SegmentCatalog:
    """Label segments of F1 and F2 as weak or strong and pair weak couples.

    Removing a segment deletes its edges and its internal vertices. It is weak
    when what is left is not 2-vertex-connected; two weak segments form a couple
    when removing both leaves a disconnected graph.
    """
    segs = list(d.f1_segments) + list(d.f2)
    if len(segs) == 1 and segs[0].closed:
        return SegmentCatalog(segments=tuple(segs), couples=(), w_count=len(d.w_vertices), single_cycle=True)
    everything = {x for e in d.f for x in (e.u, e.v)}
    labelled = []
    for s in segs:
        rest = d.f - set(s.edges)
        keep = everything - set(s.internal)
        weak = not is_biconnected_on(rest, keep)
        labelled.append(replace(s, strength=WEAK if weak else STRONG))
    couples = []
    weak_ids = [i for i, s in enumerate(labelled) if s.strength == WEAK]
    for i, j in combinations(weak_ids, 2):
        a, b = labelled[i], labelled[j]
        rest = d.f - set(a.edges) - set(b.edges)
        keep = everything - set(a.internal) - set(b.internal)
        if not is_connected_on(rest, keep):
            couples.append((i, j))
    for cid, (i, j) in enumerate(couples):
        for k in (i, j):
            if labelled[k].couple_id is None:
                labelled[k] = replace(labelled[k], couple_id=cid)
    return SegmentCatalog(segments=tuple(labelled), couples=tuple(couples), w_count=len(d.w_vertices))
