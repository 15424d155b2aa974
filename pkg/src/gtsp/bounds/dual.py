"""Explicit dual solution of the cut LP built from a decomposition F = F1 + F2,
with exact feasibility checking.

Singletons of F1 get 1/2. For each group of F2 segments sharing end vertices
{t, t'}: short segments without sub-end vertices (S1) get 1 on their internal
vertices and the group set (ends plus those internal vertices) gets 1/2; long
segments (S2) and the sub-segments of segments with sub-end vertices (S3) get
1 on side vertices and 1/2 on the rest; sub-end vertices get 0. Edge
variables z absorb the overlap along segment edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .. import findings as fc
from ..findings import Finding
from ..graph_core import Graph
from ..vcss import Decomposition, Segment
from .lp import LpSolution, crossing

HALF = Fraction(1, 2)
ONE = Fraction(1)


@dataclass(frozen=True)
class DualSolution:
    y: dict[frozenset[int], Fraction]
    z: dict[tuple[int, int], Fraction]
    notes: tuple[str, ...] = ()
    findings: tuple[Finding, ...] = field(default=(), compare=False)

    @property
    def value(self) -> Fraction:
        return 2 * sum(self.y.values(), Fraction(0)) - sum(self.z.values(), Fraction(0))


@dataclass(frozen=True)
class Violation:
    where: str  # "edge", "y" or "z"
    item: object
    lhs: Fraction
    rhs: Fraction

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs


def _internal_assign(path, y: dict, z: dict, ends_in_group: set[int], group_bonus: bool) -> None:
    """Side vertices 1, other internal vertices 1/2; z covers each overloaded edge."""
    internal = path[1:-1]
    if not internal:
        return
    sides = {path[1], path[-2]}
    for v in internal:
        y[frozenset((v,))] = ONE if v in sides else HALF
    for a, b in zip(path, path[1:]):
        e = (min(a, b), max(a, b))
        if a in internal and b in internal:
            over = y[frozenset((a,))] + y[frozenset((b,))] - 1
        else:
            end, inner = (a, b) if b in internal else (b, a)
            # the group set contributes 1/2 on edges leaving it from t or t'
            over = y[frozenset((inner,))] + (HALF if group_bonus and end in ends_in_group else 0) - 1
        if over > 0:
            z[e] = z.get(e, Fraction(0)) + over


def build_dual_certificate(d: Decomposition) -> DualSolution:
    """Dual assignment for the given decomposition (no feasibility repair)."""
    y: dict[frozenset[int], Fraction] = {}
    z: dict[tuple[int, int], Fraction] = {}
    notes: list[str] = []
    found: list[Finding] = []
    w, x = d.w_vertices, d.x_vertices
    for v in sorted(d.f1_vertices - w - x):
        y[frozenset((v,))] = HALF
    for (t, t2), group in d.f2_groups().items():
        cost = sum(s.cost for s in group)
        if cost < 4:
            found.append(Finding(fc.SMALL_GROUP_COST, f"segments at {{{t},{t2}}} cost {cost} < 4",
                                 {"ends": [t, t2], "cost": cost}))
        plain = [s for s in group if not any(f for p in s.subsegments() for f in p.sub_end)]
        s1 = [s for s in plain if 2 <= s.length <= 3]
        s2 = [s for s in plain if s.length >= 4]
        s3 = [s for s in group if s not in plain]
        ends = {t, t2}
        if s1:
            members = set(ends)
            for s in s1:
                members.update(s.internal)
            y[frozenset(members)] = y.get(frozenset(members), Fraction(0)) + HALF
        else:
            notes.append(f"no short plain segment at {{{t},{t2}}}; group set left at 0")
        for s in s1:
            # internal vertices sit inside the group set, so its edges to t, t' do not cross it
            _internal_assign(s.path, y, z, ends, False)
        for s in s2:
            _internal_assign(s.path, y, z, ends, bool(s1))
        for s in s3:
            for p in s.subsegments():
                _internal_assign(p.path, y, z, ends, bool(s1))
    y = {k: v for k, v in y.items() if v}
    z = {k: v for k, v in z.items() if v}
    return DualSolution(y, z, tuple(notes), tuple(found))


def verify_dual_feasibility(ds: DualSolution, g: Graph) -> tuple[bool, list[Violation]]:
    """Exact check of every edge constraint and sign constraint."""
    bad: list[Violation] = []
    for s, v in ds.y.items():
        if v < 0:
            bad.append(Violation("y", sorted(s), v, Fraction(0)))
    for e, v in ds.z.items():
        if v < 0:
            bad.append(Violation("z", e, v, Fraction(0)))
        if not g.has_edge(*e):
            bad.append(Violation("z", e, v, Fraction(0)))
    for e in g.edges:
        lhs = sum((v for s, v in ds.y.items() if crossing(s, e)), Fraction(0))
        rhs = 1 + ds.z.get(e, Fraction(0))
        if lhs > rhs:
            bad.append(Violation("edge", e, lhs, rhs))
    return not bad, bad


def repair_dual(ds: DualSolution, violations: list[Violation]) -> DualSolution:
    """Raise z on every violated edge constraint until it holds (lowers the value)."""
    z = dict(ds.z)
    for viol in violations:
        if viol.where != "edge":
            raise ValueError(f"cannot repair a {viol.where} sign violation")
        z[viol.item] = z.get(viol.item, Fraction(0)) - viol.slack
    return DualSolution(dict(ds.y), z, ds.notes + ("repaired",), ds.findings)


def weak_duality_check(lp: LpSolution, ds: DualSolution) -> bool:
    return ds.value <= lp.objective


def segment_dual_value(ds: DualSolution, segment: Segment) -> Fraction:
    """Dual mass sitting on one segment's internal vertices and edges."""
    ys = sum((ds.y.get(frozenset((v,)), Fraction(0)) for v in segment.internal), Fraction(0))
    zs = sum((ds.z.get(p, Fraction(0)) for p in _original_pairs(segment)), Fraction(0))
    return 2 * ys - zs


def _original_pairs(segment: Segment) -> set[tuple[int, int]]:
    out = set()
    for e in segment.edges:
        hops = e.hops(e.u)
        out.update((min(a, b), max(a, b)) for a, b in zip(hops, hops[1:]))
    return out


@dataclass(frozen=True)
class GroupAccount:
    ends: tuple[int, int]
    cost: int  # C, total cost of the group's segments
    dual: Fraction  # D2, the group's segments plus the group set


def group_accounts(ds: DualSolution, d: Decomposition) -> list[GroupAccount]:
    """Per end-vertex pair of F2: segment cost C against the dual value D2 placed on it."""
    out = []
    for ends, group in sorted(d.f2_groups().items()):
        value = sum((segment_dual_value(ds, s) for s in group), Fraction(0))
        for s, v in ds.y.items():
            if len(s) > 1 and set(ends) <= s:
                value += 2 * v
        out.append(GroupAccount(ends, sum(s.cost for s in group), value))
    return out
