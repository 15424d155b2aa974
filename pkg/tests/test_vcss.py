import itertools

import pytest
from hypothesis import given

from gtsp import findings as fc
from gtsp.graph_core import EdgeInstance, Graph, GraphError, is_two_vertex_connected
from gtsp.harness.generators import generate_tight_example
from gtsp.vcss import (
    LONG,
    SHORT,
    STRONG,
    TRIVIAL,
    WEAK,
    classify_segments,
    degree_reduce_decompose,
    find_critical_edges,
    find_segments,
    improvement_step,
    minimal_two_vcss,
    run_algorithm1,
    side_vertices,
)

from .conftest import complete, cycle, theta, two_connected_graphs, two_vc_oracle

# Frozen small instances found by searching random graphs (see decisions ledger).
PROGRESS_G = Graph.from_edges(6, [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5),
                                  (3, 4), (3, 5), (4, 5)])
PROGRESS_E = (0, 3)
NO_PROGRESS_G = Graph.from_edges(7, [(0, 1), (0, 2), (0, 6), (1, 4), (1, 5), (1, 6), (2, 5), (2, 6), (3, 5),
                                     (3, 6), (4, 5), (4, 6)])
NO_PROGRESS_E = (2, 6)
SHORTCUT_G = Graph.from_edges(7, [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 6), (3, 5),
                                  (4, 5), (5, 6)])
SKIP_G = Graph.from_edges(7, [(0, 1), (0, 2), (0, 3), (0, 5), (1, 2), (1, 3), (1, 4), (1, 6), (3, 5), (4, 5),
                              (5, 6)])
COUPLE_G = Graph.from_edges(8, [(0, 1), (0, 3), (0, 4), (0, 5), (1, 4), (1, 7), (2, 3), (2, 4), (2, 5), (2, 6),
                                (2, 7), (4, 6), (6, 7)])


def pairs(edges):
    return sorted(e.pair for e in edges)


def is_minimal_oracle(n, edges):
    return two_vc_oracle(n, edges) and not any(two_vc_oracle(n, [x for x in edges if x != e]) for e in edges)


# minimal 2-VCSS

@pytest.mark.parametrize("n", [3, 5, 8])
def test_minimal_of_cycle_is_cycle(n):
    assert pairs(minimal_two_vcss(cycle(n))) == list(cycle(n).edges)


def test_minimal_of_k4_has_four_edges():
    k4 = complete(4)
    sizes = {len(sub) for r in range(k4.m + 1) for sub in itertools.combinations(k4.edges, r)
             if is_minimal_oracle(4, sub)}
    assert sizes == {4}
    f = minimal_two_vcss(k4)
    assert len(f) == 4 and is_minimal_oracle(4, pairs(f))


def test_minimal_of_theta_is_theta():
    th = theta(3, 3)
    assert is_minimal_oracle(th.n, th.edges)
    assert pairs(minimal_two_vcss(th)) == list(th.edges)


def test_minimal_rejects_non_2vc():
    with pytest.raises(GraphError):
        minimal_two_vcss(Graph.from_edges(3, [(0, 1), (1, 2)]))


@given(two_connected_graphs())
def test_minimal_property(g):
    f = minimal_two_vcss(g)
    assert is_two_vertex_connected(f, g.n)
    assert all(not is_two_vertex_connected(f - {e}, g.n) for e in f)
    assert all(g.has_edge(*e.pair) and not e.is_shortcut for e in f)
    assert minimal_two_vcss(g) == f


# segments

def test_segments_of_theta():
    th = theta(3, 3)
    segs = find_segments([EdgeInstance.original(*e) for e in th.edges])
    assert len(segs) == 3
    assert all(set(s.ends) == {0, 1} and s.length == 3 and s.kind == SHORT for s in segs)


def test_segment_kinds_and_sides():
    segs = find_segments([EdgeInstance.original(*e) for e in theta(3, 5).edges])
    assert {s.kind for s in segs} == {LONG}
    s = segs[0]
    assert s.side_vertices == (s.path[1], s.path[-2])
    k4 = find_segments([EdgeInstance.original(*e) for e in complete(4).edges])
    assert len(k4) == 6 and {x.kind for x in k4} == {TRIVIAL}


def test_cycle_is_closed_segment():
    (s,) = find_segments([EdgeInstance.original(*e) for e in cycle(6).edges])
    assert s.closed and s.ends == (0, 0) and s.length == 6


# degree reduction

def test_decompose_cycle_and_theta_unchanged():
    for g in (cycle(7), theta(3, 4)):
        d = degree_reduce_decompose(minimal_two_vcss(g), g)
        assert d.f2 == () and pairs(d.f1) == list(g.edges)


def test_decompose_four_paths_moves_pair_to_f2():
    g = theta(4, 3)
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    assert len(d.f2) == 2
    assert {tuple(sorted(s.ends)) for s in d.f2} == {(0, 1)}
    assert d.x_vertices == {0, 1}
    assert d.is_subcubic()
    assert not any(e.is_shortcut for e in d.f)


def test_decompose_shortcut_branch():
    g = SHORTCUT_G
    f = minimal_two_vcss(g)
    assert max(sum(v in e.pair for e in f) for v in range(g.n)) >= 4
    d = degree_reduce_decompose(f, g)
    assert d.is_subcubic()
    cuts = [e for e in d.f if e.is_shortcut]
    assert cuts
    for e in cuts:
        assert e.weight == 2
        assert EdgeInstance.original(e.u, e.via) in f and EdgeInstance.original(e.v, e.via) in f


def test_decompose_rejects_non_2vc():
    with pytest.raises(GraphError):
        degree_reduce_decompose([EdgeInstance.original(0, 1)], cycle(3))


@given(two_connected_graphs(4, 10))
def test_decomposition_invariants(g):
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    assert is_two_vertex_connected(d.f, g.n)
    f2_edges = {e for s in d.f2 for e in s.edges}
    assert d.f1 | f2_edges == d.f and not d.f1 & f2_edges
    assert sum(e.weight for e in d.f1) + sum(s.cost for s in d.f2) == d.cost
    assert d.is_subcubic() or d.stuck_vertices
    for group in d.f2_groups().values():
        assert len(group) >= 2
    for e in d.f:
        if e.is_shortcut:
            assert g.has_edge(e.u, e.via) and g.has_edge(e.via, e.v)
    assert degree_reduce_decompose(minimal_two_vcss(g), g) == d


# critical edges and improvement

def test_no_critical_edges_without_f2():
    g = generate_tight_example(3)
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    assert d.f2 == () and side_vertices(d) == set()
    assert find_critical_edges(d, g) == []


def test_critical_edges_follow_definition():
    # K_{2,5} plus the edge (2, 3): F2 holds 0-3-2-1 and 0-4-1
    g = Graph.from_edges(7, list(theta(5, 2).edges) + [(2, 3)])
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    sides = side_vertices(d)
    assert sides == {2, 3, 4}
    crit = find_critical_edges(d, g)
    expected = [e for e in g.edges if e in d.h and (e[0] in sides or e[1] in sides)]
    assert crit == expected == [(0, 2), (1, 3)]


def test_improvement_step_progress():
    d = degree_reduce_decompose(minimal_two_vcss(PROGRESS_G), PROGRESS_G)
    assert PROGRESS_E in find_critical_edges(d, PROGRESS_G)
    nd = improvement_step(d, PROGRESS_E, PROGRESS_G)
    assert EdgeInstance.original(*PROGRESS_E) in nd.f
    assert len(nd.f) <= len(d.f)
    assert is_two_vertex_connected(nd.f, PROGRESS_G.n)


def test_improvement_step_no_progress():
    d = degree_reduce_decompose(minimal_two_vcss(NO_PROGRESS_G), NO_PROGRESS_G)
    assert NO_PROGRESS_E in find_critical_edges(d, NO_PROGRESS_G)
    nd = improvement_step(d, NO_PROGRESS_E, NO_PROGRESS_G)
    assert nd.f == d.f


def test_improvement_step_rejects_edge_in_f():
    g = cycle(4)
    d = degree_reduce_decompose(minimal_two_vcss(g), g)
    with pytest.raises(GraphError):
        improvement_step(d, (0, 1), g)


def test_algorithm1_counts_no_progress():
    d = run_algorithm1(SKIP_G)
    assert d.no_progress_steps == 1
    assert find_critical_edges(d, SKIP_G) == []


def test_algorithm1_examples():
    d = run_algorithm1(cycle(6))
    assert d.iterations == 0 and d.f2 == ()
    d = run_algorithm1(complete(4))
    assert len(d.f) == 4 and find_critical_edges(d, complete(4)) == []


@pytest.mark.parametrize("k", [3, 5, 7])
def test_algorithm1_tight_selects_theta(k):
    g = generate_tight_example(k)
    d = run_algorithm1(g)
    assert d.f2 == ()
    segs = d.f1_segments
    assert sorted(s.length for s in segs) == [k, k, k]
    assert find_critical_edges(d, g) == []


@given(two_connected_graphs(4, 10))
def test_algorithm1_postconditions(g):
    d = run_algorithm1(g)
    assert is_two_vertex_connected(d.f, g.n)
    assert d.iterations <= g.m
    codes = {f.code for f in d.findings}
    assert fc.ITERATION_CAP not in codes
    assert (find_critical_edges(d, g) == []) == (fc.CRITICAL_EDGE_LEFT not in codes)
    assert run_algorithm1(g) == d


def test_algorithm1_escapes_two_state_cycle():
    # the improvement loop alternates between two solutions of equal cost here
    g = Graph.from_edges(12, [(0, 1), (0, 2), (0, 5), (0, 6), (0, 7), (0, 8), (0, 9), (0, 10), (1, 3), (1, 5),
                              (1, 8), (1, 9), (2, 3), (2, 4), (2, 6), (2, 8), (3, 6), (3, 8), (3, 9), (3, 10),
                              (4, 7), (4, 8), (4, 9), (4, 10), (4, 11), (5, 6), (5, 8), (5, 9), (5, 11), (6, 7),
                              (6, 8), (6, 10), (7, 8), (7, 9), (7, 10), (8, 9), (8, 11), (10, 11)])
    d = run_algorithm1(g)
    assert find_critical_edges(d, g) == []
    assert not {fc.ITERATION_CAP, fc.CRITICAL_EDGE_LEFT} & {f.code for f in d.findings}


# classification

def test_theta_segments_are_strong_and_k_is_three():
    g = theta(3, 3)
    cat = classify_segments(run_algorithm1(g))
    assert [s.strength for s in cat.segments] == [STRONG] * 3
    assert cat.couples == ()
    assert cat.removable_count == 3


def test_weak_couple_detected():
    # two 4-cycles joined by the edges (0,4) and (2,7): each joining edge is weak, together a couple
    cat = classify_segments(run_algorithm1(COUPLE_G))
    by_path = {s.path: s for s in cat.segments}
    assert by_path[(0, 4)].strength == WEAK and by_path[(2, 7)].strength == WEAK
    assert [s.strength for s in cat.segments].count(STRONG) == 4
    assert cat.couple_count == 1
    assert by_path[(0, 4)].couple_id == by_path[(2, 7)].couple_id == 0
    assert cat.removable_count == 5


def test_cycle_is_excluded_case():
    cat = classify_segments(run_algorithm1(cycle(6)))
    assert cat.single_cycle
