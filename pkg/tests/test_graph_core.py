import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtsp.graph_core import (
    EdgeInstance,
    EdgeMultiset,
    Graph,
    GraphError,
    InstanceFormatError,
    biconnected_blocks,
    euler_circuit,
    expand_to_walk,
    graphic_metric,
    is_eulerian,
    is_two_vertex_connected,
    is_valid_closed_walk,
    parse_graph,
    serialize_graph,
)
from gtsp.harness.generators import generate_tight_example
from gtsp.tour import run_algorithm3

from .conftest import complete, cycle, floyd, petersen, theta, two_connected_graphs, two_vc_oracle


def ms(pairs, doubled=()):
    counts = {EdgeInstance.original(*p): 1 for p in pairs}
    for p in doubled:
        counts[EdgeInstance.original(*p)] = 2
    return EdgeMultiset(counts)


# parsing

def test_parse_triangle():
    g = parse_graph("p 3 3\n0 1\n1 2\n2 0\n")
    assert (g.n, g.m) == (3, 3)
    assert g.edges == ((0, 1), (0, 2), (1, 2))


def test_parse_k4_with_comments():
    text = "# complete graph\np 4 6\n" + "".join(f"{u} {v}  # e\n" for u, v in itertools.combinations(range(4), 2))
    assert parse_graph(text) == complete(4)


def test_parse_duplicate_reports_line():
    with pytest.raises(InstanceFormatError) as err:
        parse_graph("p 3 3\n0 1\n0 1\n1 2\n")
    assert err.value.lineno == 3
    assert "duplicate" in str(err.value)


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("p 3 1\n0 0\n", 2),
        ("p 3 1\n0 3\n", 2),
        ("p 3 1\n0 x\n", 2),
        ("p 3 1\n0 1 2\n", 2),
        ("q 3 1\n0 1\n", 1),
        ("p 3 2\n0 1\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(InstanceFormatError) as err:
        parse_graph(text)
    assert err.value.lineno == lineno


@given(two_connected_graphs())
def test_serialize_round_trip(g):
    text = serialize_graph(g, "round trip")
    assert parse_graph(text) == g
    assert serialize_graph(parse_graph(text), "round trip") == text


def test_graph_rejects_bad_edges():
    for edges in ([(0, 0)], [(0, 5)], [(0, 1), (1, 0)]):
        with pytest.raises(GraphError):
            Graph.from_edges(3, edges)


def test_adjacency_consistent():
    g = petersen()
    for u in range(g.n):
        for v in g.neighbors(u):
            assert u in g.neighbors(v)
            assert g.has_edge(u, v)
    assert sum(len(a) for a in g.adjacency) == 2 * g.m


# blocks

def test_blocks_cycle():
    assert biconnected_blocks(cycle(5)) == [(0, 1, 2, 3, 4)]


def test_blocks_two_triangles():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    assert biconnected_blocks(g) == [(0, 1, 2), (2, 3, 4)]


def test_blocks_path():
    assert biconnected_blocks(Graph.from_edges(3, [(0, 1), (1, 2)])) == [(0, 1), (1, 2)]


def test_blocks_disconnected():
    with pytest.raises(GraphError):
        biconnected_blocks(Graph.from_edges(4, [(0, 1), (2, 3)]))


@given(two_connected_graphs(3, 8))
def test_blocks_of_two_connected_is_one(g):
    assert biconnected_blocks(g) == [tuple(range(g.n))]


# two-vertex-connectivity

def test_two_vc_examples():
    c4 = cycle(4)
    assert is_two_vertex_connected(c4.edges, 4)
    assert not is_two_vertex_connected(c4.edges[1:], 4)
    th = theta(3, 3)
    assert two_vc_oracle(th.n, th.edges)
    assert is_two_vertex_connected(th.edges, th.n)
    assert not is_two_vertex_connected([(0, 1)], 2)


def test_two_vc_counts_shortcuts_as_edges():
    sub = [EdgeInstance.original(0, 1), EdgeInstance.original(1, 2), EdgeInstance.shortcut(0, 2, 3),
           EdgeInstance.original(2, 3), EdgeInstance.original(0, 3)]
    assert is_two_vertex_connected(sub, 4)


@given(st.integers(3, 7), st.integers(0, 2**20))
def test_two_vc_matches_oracle(n, mask):
    pairs = list(itertools.combinations(range(n), 2))
    edges = [p for i, p in enumerate(pairs) if mask >> (i % 20) & 1]
    assert is_two_vertex_connected(edges, n) == two_vc_oracle(n, edges)


def test_two_vc_is_pure():
    m = ms(cycle(5).edges)
    before = dict(m)
    is_two_vertex_connected(m, 5)
    is_eulerian(m, 5)
    assert dict(m) == before


# metric

def test_metric_examples():
    assert graphic_metric(cycle(6))[0, 3] == 3
    d = graphic_metric(complete(4))
    assert all(d[i, j] == (i != j) for i in range(4) for j in range(4))
    p = graphic_metric(petersen())
    oracle = floyd(10, petersen().edges)
    assert all(p[i, j] == oracle[i][j] for i in range(10) for j in range(10))
    assert {int(p[i, j]) for i in range(10) for j in range(10) if i != j} == {1, 2}


def test_metric_disconnected():
    with pytest.raises(GraphError):
        graphic_metric(Graph.from_edges(3, [(0, 1)]))


@given(two_connected_graphs(3, 12))
def test_metric_triangle_inequality(g):
    d = graphic_metric(g)
    assert (d == d.T).all()
    for u, v, w in itertools.product(range(g.n), repeat=3):
        assert d[u, w] <= d[u, v] + d[v, w]


# Euler machinery

def test_eulerian_examples():
    c5 = cycle(5).edges
    assert is_eulerian(ms(c5), 5)
    assert not is_eulerian(ms(c5, doubled=[c5[0]]), 5)
    th = theta(3, 3)
    first_path = [(0, 2), (2, 3), (1, 3)]
    assert is_eulerian(ms(th.edges, doubled=first_path), th.n)
    assert not is_eulerian(ms(th.edges), th.n)


def _fold(circuit, sub):
    assert circuit[0][0] == circuit[-1][1]
    for (a, b, _), (c, _, _) in zip(circuit, circuit[1:]):
        assert b == c
    used = {}
    for a, b, e in circuit:
        assert {a, b} == {e.u, e.v}
        used[e] = used.get(e, 0) + 1
    assert used == dict(sub)


def test_euler_circuit_examples():
    c4 = ms(cycle(4).edges)
    circ = euler_circuit(c4)
    assert len(circ) == 4
    _fold(circ, c4)
    double = ms([], doubled=[(0, 1)])
    assert [a for a, _b, _e in euler_circuit(double)] + [0] == [0, 1, 0]
    k4 = ms(complete(4).edges, doubled=[(0, 1), (2, 3)])
    circ = euler_circuit(k4)
    assert len(circ) == 8
    _fold(circ, k4)


def test_euler_circuit_precondition():
    with pytest.raises(GraphError):
        euler_circuit(ms([(0, 1), (1, 2)]))


@given(two_connected_graphs())
def test_euler_circuit_consumes_multiplicities(g):
    t = run_algorithm3(g).tour.edges
    _fold(euler_circuit(t), t)


def test_expand_identity_and_shortcut():
    g = cycle(5)
    t = ms(g.edges)
    walk = expand_to_walk(t, g)
    assert [a for a, _b, _e in euler_circuit(t)] + [walk[0]] == walk
    g2 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    t2 = EdgeMultiset([EdgeInstance.shortcut(0, 2, 1), EdgeInstance.original(2, 3), EdgeInstance.original(0, 3)])
    walk = expand_to_walk(t2, g2)
    s = ",".join(map(str, walk))
    assert "0,1,2" in s or "2,1,0" in s
    assert len(walk) - 1 == t2.cost


def test_expand_stale_shortcut():
    g = cycle(4)
    t = EdgeMultiset([EdgeInstance.shortcut(0, 2, 3), EdgeInstance.original(0, 1), EdgeInstance.original(1, 2)])
    with pytest.raises(GraphError):
        expand_to_walk(t, Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]))
    assert len(expand_to_walk(t, g)) - 1 == 4


def test_expand_tight_example():
    g = generate_tight_example(3)
    res = run_algorithm3(g)
    assert is_valid_closed_walk(res.walk, g)
    assert len(res.walk) - 1 == res.tour.cost


def test_multiset_bounds():
    e = EdgeInstance.original(0, 1)
    with pytest.raises(GraphError):
        EdgeMultiset({e: 3})
    m = EdgeMultiset([e, e])
    assert m.size == 2 and m.cost == 2 and m.doubled() == [e]
    assert m.minus(e, 2) == EdgeMultiset()
    assert EdgeInstance.shortcut(2, 0, 1).weight == 2
    with pytest.raises(GraphError):
        EdgeInstance(2, 1)
